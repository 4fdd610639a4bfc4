"""Low-pass integral-equation solver and conductivity recovery.

For each image pixel z the complex field mu(z, .) on the frequency
grid satisfies a real-linear integral equation

    mu = 1 + G * (w . conj(mu)),      w(k) = t(k) e(z,-k) / (4 pi kbar)

with e(z,k) = exp(i(kz + conj(k)conj(z))) and Green's factor
G(k) = 1/(pi k).  The convolution is discretized on the grid-doubled
domain so the cyclic FFT product equals the true discrete sum; because
the data vanish outside the cutoff disc the same sums restrict to a
few hundred frequency nodes, which a dense batched solver exploits to
process many pixels per matrix product.  The conductivity at z is the
squared real part of mu(z, 0) times the background.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from eitkit.phantom import GridSpec
from eitkit.scattering import KGrid, ScatteringData


@dataclass
class MuField:
    """Solution of the integral equation at one fixed z."""

    values: np.ndarray  # complex, (size, size) on the KGrid
    z: complex
    kgrid: KGrid

    @property
    def at_origin(self) -> complex:
        return self.values[self.kgrid.size // 2, self.kgrid.size // 2]


@dataclass
class ReconImage:
    """Reconstructed conductivity on the square [-1, 1]^2."""

    values: np.ndarray
    sigma0: float
    mu_imag_max: float
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ValueError("values must match the grid resolution")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("reconstruction must be finite")


class DbarConvergenceError(RuntimeError):
    """Iterative solve missed the residual target."""

    def __init__(self, residual: float, tol: float, pixels: int = 1):
        self.residual = residual
        super().__init__(
            f"no convergence to {tol:g} within the iteration budget "
            f"(worst relative residual {residual:.3e} over {pixels} pixel(s))"
        )


def _green_samples(kgrid: KGrid) -> np.ndarray:
    """h^2 / (pi d) on the doubled grid, zero at d = 0.

    Doubling makes every difference of two in-grid nodes a sampled
    point of the kernel exactly once, so cyclic convolution by FFT
    reproduces the plain discrete sum.
    """
    size, h = kgrid.size, kgrid.h_k
    ax = (np.arange(2 * size) - size) * h
    d = ax[None, :] + 1j * ax[:, None]
    out = np.zeros_like(d)
    nz = d != 0
    out[nz] = h * h / (np.pi * d[nz])
    return out


def _exp_phase(z: complex, k: np.ndarray) -> np.ndarray:
    """e(z, -k) = exp(-i(kz + conj(kz))), unimodular."""
    return np.exp(-2j * (k * z).real)


def _weights(t: ScatteringData, z: complex) -> np.ndarray:
    """w(k) = t(k) e(z,-k) / (4 pi kbar) on the full grid."""
    k = t.kgrid.nodes()
    w = np.zeros_like(t.values)
    nz = t.values != 0
    w[nz] = t.values[nz] * _exp_phase(z, k[nz]) / (4.0 * np.pi * np.conj(k[nz]))
    return w


def _real_dot(a: np.ndarray, b: np.ndarray, axis=0) -> np.ndarray:
    return (a.real * b.real + a.imag * b.imag).sum(axis=axis)


def solve_dbar(
    t: ScatteringData,
    z: complex,
    engine: str = "fft",
    tol: float = 1e-6,
    maxiter: int = 200,
    restart: int = 30,
) -> MuField:
    """Solve the integral equation at one z; returns the full mu field.

    The "fft" engine iterates with grid-doubled FFT convolutions over
    the whole frequency grid; the "dense" engine solves the same sums
    restricted to the data support and then fills the rest of the
    field with one explicit kernel application.  Both target relative
    residual ``tol``.
    """
    size = t.kgrid.size
    if not np.any(t.values != 0):
        return MuField(np.ones((size, size), dtype=complex), z, t.kgrid)
    if engine == "fft":
        return _solve_fft(t, z, tol, maxiter, restart)
    if engine == "dense":
        return _solve_dense(t, z, tol, maxiter, restart)
    raise ValueError(f"unknown engine {engine!r}")


def _solve_fft(t, z, tol, maxiter, restart):
    size = t.kgrid.size
    n = size * size
    w = _weights(t, z)
    kernel_hat = np.fft.fft2(np.fft.ifftshift(_green_samples(t.kgrid)))

    def convolve(f):
        padded = np.zeros((2 * size, 2 * size), dtype=complex)
        padded[:size, :size] = f
        full = np.fft.ifft2(kernel_hat * np.fft.fft2(padded))
        return full[:size, :size]

    def matvec(u):
        mu = (u[:n] + 1j * u[n:]).reshape(size, size)
        out = mu - convolve(w * np.conj(mu))
        return np.concatenate([out.real.ravel(), out.imag.ravel()])

    op = LinearOperator((2 * n, 2 * n), matvec=matvec, dtype=float)
    rhs = np.concatenate([np.ones(n), np.zeros(n)])
    sol, info = gmres(
        op, rhs, x0=rhs.copy(), rtol=tol, atol=0.0, restart=restart, maxiter=maxiter
    )
    if info != 0:
        res = np.linalg.norm(matvec(sol) - rhs) / np.linalg.norm(rhs)
        raise DbarConvergenceError(res, tol)
    mu = (sol[:n] + 1j * sol[n:]).reshape(size, size)
    return MuField(mu, z, t.kgrid)


class _SupportSystem:
    """Kernel blocks for the support-restricted dense formulation."""

    def __init__(self, t: ScatteringData):
        self.kgrid = t.kgrid
        k = t.kgrid.nodes()
        self.support = t.values != 0
        ks = k[self.support]
        self.k_support = ks
        self.t_support = t.values[self.support]
        h = t.kgrid.h_k
        # kernel between support nodes (the only ones that interact)
        diff = ks[:, None] - ks[None, :]
        core = np.zeros_like(diff)
        nz = diff != 0
        core[nz] = h * h / (np.pi * diff[nz])
        self.kernel = core
        # row that evaluates the convolution at k = 0: G(0 - k) h^2
        self.row_origin = h * h / (np.pi * (-ks))

    def weights(self, z: np.ndarray) -> np.ndarray:
        """w on the support for a batch of pixels; shape (S, P)."""
        zb = np.atleast_1d(np.asarray(z, dtype=complex))
        phase = np.exp(-2j * np.multiply.outer(self.k_support, zb).real)
        scale = self.t_support / (4.0 * np.pi * np.conj(self.k_support))
        return scale[:, None] * phase

    def full_field(self, w_col: np.ndarray, mu_support: np.ndarray) -> np.ndarray:
        """mu everywhere from the support solution, one explicit sum."""
        k = self.kgrid.nodes().ravel()
        diff = k[:, None] - self.k_support[None, :]
        h = self.kgrid.h_k
        core = np.zeros_like(diff)
        nz = diff != 0
        core[nz] = h * h / (np.pi * diff[nz])
        mu = 1.0 + core @ (w_col * np.conj(mu_support))
        size = self.kgrid.size
        full = mu.reshape(size, size)
        full[self.support] = mu_support
        return full


def _batched_gmres(kernel, w, tol, maxiter, restart):
    """Solve mu - K (w . conj mu) = 1 for every column of w at once.

    The operator is real-linear, so the Krylov recurrence runs over the
    real inner product with real coefficients; vectors stay complex.
    Returns (mu, worst_residual); columns converge independently and
    finished ones are frozen between restarts.
    """
    S, P = w.shape
    x = np.ones((S, P), dtype=complex)  # rhs is the constant 1, also the init
    b_norm = np.sqrt(float(S))
    active = np.arange(P)
    mu = np.empty((S, P), dtype=complex)
    worst = 0.0

    def op(v, wa):
        return v - kernel @ (wa * np.conj(v))

    iters_done = 0
    while active.size and iters_done < maxiter:
        m = min(restart, maxiter - iters_done)
        wa = w[:, active]
        xa = x[:, active]
        r = np.ones((S, active.size), dtype=complex) - op(xa, wa)
        beta = np.sqrt(_real_dot(r, r))
        res = beta / b_norm
        done_now = res <= tol
        if np.any(done_now):
            mu[:, active[done_now]] = xa[:, done_now]
            keep = ~done_now
            active = active[keep]
            if active.size == 0:
                break
            wa = wa[:, keep]
            xa = xa[:, keep]
            r = r[:, keep]
            beta = beta[keep]
        A = active.size
        V = np.zeros((m + 1, S, A), dtype=complex)
        H = np.zeros((m + 1, m, A))
        cs = np.zeros((m, A))
        sn = np.zeros((m, A))
        g = np.zeros((m + 1, A))
        g[0] = beta
        V[0] = r / beta
        converged = np.zeros(A, dtype=bool)
        n_basis = 0
        for j in range(m):
            u = op(V[j], wa)
            # modified Gram-Schmidt over the real inner product
            for i in range(j + 1):
                hij = _real_dot(V[i], u)
                H[i, j] = hij
                u -= hij * V[i]
            hnext = np.sqrt(_real_dot(u, u))
            H[j + 1, j] = hnext
            safe = np.where(hnext > 0, hnext, 1.0)
            V[j + 1] = u / safe
            # apply stored rotations, then the new one
            for i in range(j):
                hi = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = hi
            denom = np.hypot(H[j, j], H[j + 1, j])
            denom = np.where(denom > 0, denom, 1.0)
            cs[j] = H[j, j] / denom
            sn[j] = H[j + 1, j] / denom
            H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            n_basis = j + 1
            converged = np.abs(g[j + 1]) / b_norm <= tol
            if np.all(converged):
                break
        # back-substitute per column for the basis actually built
        y = np.zeros((n_basis, A))
        for i in range(n_basis - 1, -1, -1):
            acc = g[i].copy()
            for j2 in range(i + 1, n_basis):
                acc -= H[i, j2] * y[j2]
            diag = H[i, i]
            y[i] = acc / np.where(np.abs(diag) > 0, diag, 1.0)
        x[:, active] = xa + np.einsum("jsa,ja->sa", V[:n_basis], y)
        iters_done += n_basis

    if active.size:
        wa = w[:, active]
        xa = x[:, active]
        r = np.ones((S, active.size), dtype=complex) - op(xa, wa)
        res = np.sqrt(_real_dot(r, r)) / b_norm
        done_now = res <= tol
        mu[:, active[done_now]] = xa[:, done_now]
        if np.any(~done_now):
            raise DbarConvergenceError(
                float(res[~done_now].max()), tol, int(np.sum(~done_now))
            )
    return mu


def _solve_dense(t, z, tol, maxiter, restart):
    system = _SupportSystem(t)
    w = system.weights(z)
    mu_s = _batched_gmres(system.kernel, w, tol, maxiter, restart)
    full = system.full_field(w[:, 0], mu_s[:, 0])
    return MuField(full, complex(z), t.kgrid)


def recover_sigma(mu: MuField, sigma0: float) -> float:
    """Conductivity at the field's z: (Re mu(z, 0))^2 * sigma0."""
    return float(mu.at_origin.real**2 * sigma0)


def reconstruct_image(
    t: ScatteringData,
    sigma0: float,
    grid: GridSpec = None,
    tol: float = 1e-6,
    maxiter: int = 200,
    restart: int = 30,
    chunk: int = 512,
    workers: int = 1,
) -> ReconImage:
    """Per-pixel solve over the square image grid.

    Pixels are independent; they are processed in batches through the
    support-restricted dense solver (one matrix product advances every
    pixel of a batch).  ``workers`` > 1 splits batches across
    processes.
    """
    grid = grid or GridSpec()
    if sigma0 <= 0:
        raise ValueError("sigma0 must be positive")
    X, Y = grid.centers()
    zs = (X + 1j * Y).ravel()

    if not np.any(t.values != 0):
        values = np.full(grid.n * grid.n, sigma0)
        return ReconImage(values.reshape(grid.n, grid.n), sigma0, 0.0, grid)

    system = _SupportSystem(t)
    origin_vals = np.empty(zs.size, dtype=complex)
    chunks = [slice(i, min(i + chunk, zs.size)) for i in range(0, zs.size, chunk)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(
                _reconstruct_chunk,
                [(system, zs[sl], tol, maxiter, restart) for sl in chunks],
            )
            for sl, part in zip(chunks, results):
                origin_vals[sl] = part
    else:
        for sl in chunks:
            origin_vals[sl] = _reconstruct_chunk(
                (system, zs[sl], tol, maxiter, restart)
            )

    values = origin_vals.real**2 * sigma0
    mu_imag_max = float(np.abs(origin_vals.imag).max())
    return ReconImage(values.reshape(grid.n, grid.n), sigma0, mu_imag_max, grid)


def _reconstruct_chunk(args):
    system, zs, tol, maxiter, restart = args
    w = system.weights(zs)
    mu_s = _batched_gmres(system.kernel, w, tol, maxiter, restart)
    # mu at the origin node: 1 + sum G(0 - k) w conj(mu) over the support
    return 1.0 + system.row_origin @ (w * np.conj(mu_s))
