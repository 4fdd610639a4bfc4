"""Boundary measurement operators in the trigonometric basis.

Builds Neumann-to-Dirichlet (ND) matrices either from finite-element
solutions (continuum electrode model) or from current/voltage tables
(discrete inner-product formula), inverts them to Dirichlet-to-Neumann
(DN) matrices with the radius and background-conductivity scalings,
estimates the best homogeneous background, and injects measurement
noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from eitkit.fem import NeumannSolver, flux_load
from eitkit.mesh import TriMesh

SQRT_PI = np.sqrt(np.pi)


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class TrigBasis:
    """Orthonormal trig functions paired with electrode arcs.

    Basis functions are phi_n(theta) = sin(n*theta)/sqrt(pi) for n < 0
    and cos(n*theta)/sqrt(pi) for n > 0, with n running over
    -L/2..-1, 1..L/2.  Electrode arcs (center angle, angular width) tie
    the basis to a physical electrode belt; a belt that covers the full
    circle (no gaps) is treated as the ideal continuum limit and skips
    the arc projection.
    """

    L: int
    arcs: np.ndarray  # (L, 2): center angle, angular width

    def __post_init__(self):
        if self.L < 4 or self.L % 2:
            raise ValueError("L must be even and >= 4")
        arcs = np.asarray(self.arcs, dtype=float)
        if arcs.shape != (self.L, 2):
            raise ValueError("arcs must have shape (L, 2)")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def equispaced(cls, L: int, arc_width: Optional[float] = None) -> "TrigBasis":
        """Electrodes centered at 2*pi*l/L for l = 1..L.

        ``arc_width`` is angular; None means gap-free coverage 2*pi/L.
        """
        if arc_width is None:
            arc_width = 2.0 * np.pi / L
        centers = np.mod(2.0 * np.pi * np.arange(1, L + 1) / L, 2.0 * np.pi)
        arcs = np.stack([centers, np.full(L, float(arc_width))], axis=1)
        return cls(L, arcs)

    @property
    def indices(self) -> np.ndarray:
        """Basis orders n, negative (sine) first: -L/2..-1, 1..L/2."""
        h = self.L // 2
        return np.concatenate([np.arange(-h, 0), np.arange(1, h + 1)])

    @property
    def center_angles(self) -> np.ndarray:
        return self.arcs[:, 0]

    @property
    def full_coverage(self) -> bool:
        return bool(np.isclose(self.arcs[:, 1].sum(), 2.0 * np.pi, rtol=1e-9))

    def eval(self, theta: np.ndarray) -> np.ndarray:
        """Basis values, shape (L, len(theta))."""
        n = self.indices[:, None]
        t = np.asarray(theta)[None, :]
        return np.where(n < 0, np.sin(n * t), np.cos(n * t)) / SQRT_PI

    def arc_averages(self, values_fn) -> np.ndarray:
        """Per-arc averages of a function of angle, shape (L,)."""
        c, w = self.arcs[:, 0], self.arcs[:, 1]
        # 5-point Gauss per arc handles arbitrary integrands
        x, wt = np.polynomial.legendre.leggauss(5)
        theta = c[:, None] + 0.5 * w[:, None] * x[None, :]
        return values_fn(theta) @ wt / 2.0


@dataclass(frozen=True)
class DiscretePatternSet:
    """Orthonormal current patterns applied electrode-wise.

    ``current_matrix`` is L x (L-1) with orthonormal, mean-free
    columns; ``electrode_areas`` holds |e_l| used by the discrete
    inner-product formula (arc length on the unit disc for simulated
    data, mm^2 for hardware exports).
    """

    L: int
    current_matrix: np.ndarray
    electrode_areas: np.ndarray
    arc_width: Optional[float] = None  # angular width on the unit disc

    def __post_init__(self):
        cm = np.asarray(self.current_matrix, dtype=float)
        if cm.shape != (self.L, self.L - 1):
            raise ValueError("current_matrix must be L x (L-1)")
        areas = np.broadcast_to(
            np.asarray(self.electrode_areas, dtype=float), (self.L,)
        ).copy()
        if np.any(areas <= 0):
            raise ValueError("electrode areas must be positive")
        gram = cm.T @ cm
        if np.abs(gram - np.eye(self.L - 1)).max() > 1e-12:
            raise ValueError("pattern columns must be orthonormal")
        if np.abs(cm.sum(axis=0)).max() > 1e-10:
            raise ValueError("pattern columns must be mean-free")
        object.__setattr__(self, "current_matrix", cm)
        object.__setattr__(self, "electrode_areas", areas)


def trig_current_patterns(
    L: int, electrode_areas=None, arc_width: Optional[float] = None
) -> DiscretePatternSet:
    """Normalized trig current patterns at angles theta_l = 2*pi*l/L.

    Columns m = 1..L/2 are cosines of frequency m (the top one with the
    reduced normalization), columns L/2+1..L-1 are sines of frequency
    m - L/2.  Columns are orthonormal and sum to zero.  Electrode
    areas default to the arc length on the unit disc; dividing by that
    in the discrete pairing is what lands the ND matrix on the
    continuum operator's scale.
    """
    if L < 4 or L % 2:
        raise ValueError("L must be even and >= 4")
    if electrode_areas is None:
        electrode_areas = arc_width if arc_width is not None else 2.0 * np.pi / L
    theta = 2.0 * np.pi * np.arange(1, L + 1) / L
    cols = []
    for m in range(1, L):
        if m < L // 2:
            cols.append(np.sqrt(2.0 / L) * np.cos(m * theta))
        elif m == L // 2:
            cols.append(np.sqrt(1.0 / L) * np.cos(m * theta))
        else:
            cols.append(np.sqrt(2.0 / L) * np.sin((m - L // 2) * theta))
    return DiscretePatternSet(L, np.stack(cols, axis=1), electrode_areas, arc_width)


# ---------------------------------------------------------------------------
# measurement operators


@dataclass
class NDMatrix:
    """Neumann-to-Dirichlet matrix with its scaling metadata."""

    entries: np.ndarray
    basis: Union[TrigBasis, DiscretePatternSet]
    kind: str  # "continuum" | "discrete"
    radius_r: float = 1.0
    sigma0: Optional[float] = None

    @property
    def L(self) -> int:
        return self.basis.L


@dataclass
class DNMatrix:
    """Dirichlet-to-Neumann matrix, scaled to the unit-disc problem."""

    entries: np.ndarray
    basis: Union[TrigBasis, DiscretePatternSet]
    kind: str
    radius_r: float
    sigma0: float
    scaled_to_unit: bool = True
    cond: float = field(default=np.nan)

    @property
    def L(self) -> int:
        return self.basis.L


def _projected_flux_loads(mesh: TriMesh, basis: TrigBasis) -> np.ndarray:
    """Assembled boundary loads for each basis current, shape (V, L)."""
    if basis.full_coverage:
        fluxes = [
            (lambda t, n=n: np.where(n < 0, np.sin(n * t), np.cos(n * t)) / SQRT_PI)
            for n in basis.indices
        ]
    else:
        c, w = basis.arcs[:, 0], basis.arcs[:, 1]
        a = 0.5 * w

        def arc_flux(n):
            # arc average of phi_n: phi_n(center) * sinc(n*a)
            vals = (
                np.where(n < 0, np.sin(n * c), np.cos(n * c))
                / SQRT_PI
                * np.sinc(n * a / np.pi)
            )

            def f(theta):
                # angular distance to each arc center
                d = np.abs(
                    np.mod(theta[:, None] - c[None, :] + np.pi, 2 * np.pi) - np.pi
                )
                inside = d <= a[None, :]
                return inside @ vals

            return f

        fluxes = [arc_flux(n) for n in basis.indices]
    return np.stack([flux_load(mesh, f) for f in fluxes], axis=1)


def continuum_boundary_voltages(mesh: TriMesh, sigma, basis: TrigBasis) -> np.ndarray:
    """Boundary-node traces of the forward solves, shape (B, L).

    One finite-element solve per basis current, rows ordered like
    ``mesh.boundary_nodes``.  This matrix is the simulation's voltage
    data: noise it if desired, then pair it with the basis through
    nd_from_boundary_voltages.
    """
    loads = _projected_flux_loads(mesh, basis)
    solver = NeumannSolver(mesh, sigma)
    potentials = solver.solve_many(loads)
    return potentials[mesh.boundary_nodes, :]


def nd_from_boundary_voltages(
    voltages: np.ndarray, mesh: TriMesh, basis: TrigBasis
) -> NDMatrix:
    """Pair boundary voltages with the basis functions to form the ND matrix.

    The entry in row m, column n pairs the trace under basis current n
    with basis function m in L2 of the circle.  Gap-free layouts pair
    the trace directly by trapezoid quadrature at the equiangular
    boundary nodes; arc layouts pair the per-arc trace averages against
    the exact arc integrals of the basis functions.  The result is
    symmetrized.
    """
    theta = mesh.boundary_angles()
    traces = np.asarray(voltages, dtype=float)
    if traces.shape != (len(theta), basis.L):
        raise ValueError(
            f"voltages must be {len(theta)} x {basis.L}, got {traces.shape}"
        )
    if basis.full_coverage:
        phi = basis.eval(theta)  # (L, B)
        entries = (phi @ traces) * (2.0 * np.pi / len(theta))
    else:
        c, w = basis.arcs[:, 0], basis.arcs[:, 1]
        a = 0.5 * w[0]
        avgs = _arc_average_weights(mesh, c, a) @ traces  # (n_arcs, L)
        n = basis.indices
        # integral of phi_m over arc l: 2a * sinc(m a) * phi_m(theta_l)
        arc_int = 2.0 * a * np.sinc(n[:, None] * a / np.pi) * basis.eval(c)
        entries = arc_int @ avgs
    entries = 0.5 * (entries + entries.T)
    return NDMatrix(entries, basis, "continuum")


def nd_matrix_continuum(mesh: TriMesh, sigma, basis: TrigBasis) -> NDMatrix:
    """ND matrix from finite-element solves, one per basis current.

    Each basis current is applied as a Neumann flux (projected onto the
    electrode arcs unless the belt is gap-free); the resulting traces
    are paired with the basis by nd_from_boundary_voltages.
    """
    return nd_from_boundary_voltages(
        continuum_boundary_voltages(mesh, sigma, basis), mesh, basis
    )


def nd_matrix_discrete(
    patterns: DiscretePatternSet, voltages: np.ndarray
) -> NDMatrix:
    """ND matrix from per-electrode voltages via the discrete pairing.

    ``voltages`` column n holds the electrode voltages measured under
    current pattern n, zero-meaned and scaled by the pattern's l2 norm
    (caller contract).  Entry (m, n) is sum_l t^m_l v^n_l / |e_l|; the
    result is symmetrized.
    """
    v = np.asarray(voltages, dtype=float)
    L = patterns.L
    if v.shape != (L, L - 1):
        raise ValueError(f"voltages must be {L} x {L - 1}, got {v.shape}")
    entries = patterns.current_matrix.T @ (v / patterns.electrode_areas[:, None])
    entries = 0.5 * (entries + entries.T)
    return NDMatrix(entries, patterns, "discrete")


def synthesize_trig_voltages(
    raw_currents: np.ndarray,
    raw_voltages: np.ndarray,
    patterns: Optional[DiscretePatternSet] = None,
    order: str = "zero_mean_then_scale",
) -> np.ndarray:
    """Voltages that the orthonormal trig patterns would have produced.

    Solves raw_currents @ M = trig_patterns and applies the same
    recombination M to the measured voltages, then zero-means each
    column.  ``order`` selects whether zero-meaning happens before or
    after the per-pattern norm scaling; the two commute for scalar
    norms and are both accepted.
    """
    C = np.asarray(raw_currents, dtype=float)
    V = np.asarray(raw_voltages, dtype=float)
    if C.shape != V.shape:
        raise ValueError("current and voltage tables must have equal shapes")
    L = C.shape[0]
    if patterns is None:
        patterns = trig_current_patterns(L)
    if order not in ("zero_mean_then_scale", "scale_then_zero_mean"):
        raise ValueError(f"unknown order {order!r}")
    M, residuals, rank, sv = np.linalg.lstsq(C, patterns.current_matrix, rcond=None)
    if rank < min(C.shape):
        raise np.linalg.LinAlgError("raw current patterns are rank deficient")
    resid = np.linalg.norm(C @ M - patterns.current_matrix)
    if resid > 1e-8 * max(1.0, np.linalg.norm(patterns.current_matrix)):
        raise np.linalg.LinAlgError(
            "trig patterns are not in the span of the raw currents"
        )
    W = V @ M
    return W - W.mean(axis=0, keepdims=True)


def electrode_centers(L: int) -> np.ndarray:
    """Electrode center points exp(i*theta_l), theta_l = 2*pi*l/L, l = 1..L."""
    return np.exp(2j * np.pi * np.arange(1, L + 1) / L)


def _arc_average_weights(mesh: TriMesh, centers: np.ndarray, a: float) -> np.ndarray:
    """Matrix W with W @ trace = per-arc averages of the PL boundary trace."""
    B = len(mesh.boundary_nodes)
    delta = 2.0 * np.pi / B
    node_theta = delta * np.arange(B)  # equiangular by construction
    W = np.zeros((len(centers), B))
    for li, c in enumerate(centers):
        lo, hi = c - a, c + a
        # walk the boundary intervals overlapping [lo, hi] (may wrap)
        i0 = int(np.floor(lo / delta))
        i1 = int(np.ceil(hi / delta))
        for i in range(i0, i1):
            t0, t1 = i * delta, (i + 1) * delta
            alpha, beta = max(t0, lo), min(t1, hi)
            if beta <= alpha:
                continue
            # integral of the two hat functions over [alpha, beta]
            x0, x1 = alpha - t0, beta - t0
            right = (x1**2 - x0**2) / (2.0 * delta)
            left = (x1 - x0) - right
            W[li, i % B] += left
            W[li, (i + 1) % B] += right
    return W / (2.0 * a)


def simulate_electrode_voltages(
    mesh: TriMesh,
    sigma,
    patterns: DiscretePatternSet,
    arc_width: Optional[float] = None,
    zero_mean: bool = True,
) -> np.ndarray:
    """Per-electrode voltages under each current pattern, by FEM.

    Pattern values are applied as piecewise-constant current density
    (2*pi/L) * t^m_l on the electrode arcs; returned voltages are the
    arc averages of the boundary trace, one column per pattern.  With
    this convention the discrete inner-product matrix of the voltages
    sits on the same scale as the continuum operator.
    """
    L = patterns.L
    if arc_width is None:
        arc_width = patterns.arc_width
    if arc_width is None:
        arc_width = 2.0 * np.pi / L
    a = 0.5 * arc_width
    centers = np.mod(2.0 * np.pi * np.arange(1, L + 1) / L, 2.0 * np.pi)
    T = patterns.current_matrix

    def pattern_flux(m):
        vals = (2.0 * np.pi / L) * T[:, m]

        def f(theta):
            d = np.abs(
                np.mod(theta[:, None] - centers[None, :] + np.pi, 2 * np.pi) - np.pi
            )
            return (d <= a) @ vals

        return f

    loads = np.stack([flux_load(mesh, pattern_flux(m)) for m in range(L - 1)], axis=1)
    potentials = NeumannSolver(mesh, sigma).solve_many(loads)
    traces = potentials[mesh.boundary_nodes, :]
    W = _arc_average_weights(mesh, centers, a)
    v = W @ traces
    if zero_mean:
        v = v - v.mean(axis=0, keepdims=True)
    return v


# ---------------------------------------------------------------------------
# homogeneous reference, scalings, noise


def homogeneous_nd(
    basis: Union[TrigBasis, DiscretePatternSet], kind: str = "continuum"
) -> np.ndarray:
    """Analytic unit-disc ND entries for sigma = 1, in the given basis.

    Continuum, gap-free coverage: exactly diag(1/|n|).  Continuum with
    arcs: the 1/|n| law filtered through the arc-average projection.
    Discrete: the same filtering expressed on the current patterns,
    summed over boundary harmonics (the tail decays like 1/j^3).
    """
    if kind == "continuum":
        assert isinstance(basis, TrigBasis)
        n = basis.indices
        if basis.full_coverage:
            return np.diag(1.0 / np.abs(n))
        return _homogeneous_nd_arcs(basis)
    if kind == "discrete":
        if isinstance(basis, TrigBasis):
            raise ValueError("discrete reference needs a DiscretePatternSet")
        return _homogeneous_nd_discrete(basis)
    raise ValueError(f"unknown kind {kind!r}")


def _homogeneous_nd_arcs(basis: TrigBasis, n_terms: int = 3000) -> np.ndarray:
    """Arc-projected sigma=1 entries: sum over boundary harmonics.

    Entry (i, j) = sum_q (1/|q|) (P phi_i, phi_q)(P phi_j, phi_q) with
    P the per-arc averaging; the tail decays like 1/q^3.  The top sine
    order is invisible to equispaced arcs, so that row and column are
    structurally zero (the matrix is meant for background fitting, not
    inversion).
    """
    n = basis.indices
    c = basis.center_angles
    a = 0.5 * basis.arcs[0, 1]
    h = basis.L // 2
    q = np.concatenate([np.arange(-n_terms, 0), np.arange(1, n_terms + 1)])
    trig_n = np.where(
        n[:, None] < 0, np.sin(n[:, None] * c), np.cos(n[:, None] * c)
    )  # (L, L) sample values without the 1/sqrt(pi)
    trig_q = np.where(
        q[:, None] < 0, np.sin(q[:, None] * c), np.cos(q[:, None] * c)
    )  # (2Q, L)
    S = trig_n @ trig_q.T / np.pi  # (L, 2Q)
    A = (
        2.0
        * a
        * np.sinc(n[:, None] * a / np.pi)
        * np.sinc(q[None, :] * a / np.pi)
        * S
    )
    R = (A / np.abs(q)[None, :]) @ A.T
    return 0.5 * (R + R.T)


def _homogeneous_nd_discrete(
    patterns: DiscretePatternSet, n_terms: int = 4000
) -> np.ndarray:
    """Unit-disc sigma=1 reference for the discrete pairing."""
    L = patterns.L
    arc_width = patterns.arc_width
    if arc_width is None:
        arc_width = 2.0 * np.pi / L
    a = 0.5 * arc_width
    theta = 2.0 * np.pi * np.arange(1, L + 1) / L
    dtheta = theta[:, None] - theta[None, :]
    j = np.arange(1, n_terms + 1)
    sinc2_over_j = np.sinc(j * a / np.pi) ** 2 / j
    # trace kernel between arc-averaged indicators
    K = np.cos(dtheta[..., None] * j) @ sinc2_over_j * (2.0 * a / np.pi)
    T = patterns.current_matrix
    R = (2.0 * np.pi / L) * (T.T @ (K / patterns.electrode_areas[:, None]) @ T)
    return 0.5 * (R + R.T)


def dn_from_nd(nd: NDMatrix, sigma0: Optional[float] = None) -> DNMatrix:
    """Invert an ND matrix and apply the unit-disc scalings.

    Entries are the matrix inverse multiplied by the domain radius and
    divided by the background conductivity, after which the DN matrix
    refers to the unit disc with background 1.
    """
    if sigma0 is None:
        sigma0 = nd.sigma0
    if sigma0 is None or sigma0 <= 0:
        raise ValueError("sigma0 must be known and positive to scale the DN matrix")
    R = 0.5 * (nd.entries + nd.entries.T)
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError(
            f"ND matrix numerically singular (cond={cond:.3e})"
        )
    entries = np.linalg.inv(R) * (nd.radius_r / sigma0)
    return DNMatrix(
        entries, nd.basis, nd.kind, nd.radius_r, float(sigma0), True, cond
    )


def estimate_sigma0(nd: NDMatrix) -> float:
    """Best constant background fitted to an ND matrix.

    Returns the c minimizing ||nd_unit - (1/c) H||_F, where H is the
    analytic homogeneous reference in the same basis and convention and
    nd_unit is the measured matrix brought to the unit disc (divided by
    the domain radius).  Closed-form least squares.
    """
    H = homogeneous_nd(nd.basis, nd.kind)
    R = 0.5 * (nd.entries + nd.entries.T) / nd.radius_r
    num = float(np.sum(R * H))
    if num <= 0:
        raise ValueError("degenerate ND matrix: no positive background fits")
    return float(np.sum(H * H) / num)


def add_voltage_noise(
    voltages: np.ndarray, level: float, seed: int
) -> np.ndarray:
    """White Gaussian noise on simulated voltages, one column per pattern.

    ``level`` is the noise-to-signal amplitude ratio: each sample gets
    independent zero-mean noise with standard deviation level times the
    root-mean-square of its column.  This is where measurement noise
    enters the simulation pipeline -- applied to the voltages, before
    any basis pairing.  Per-entry relative noise on the matrix itself
    is a separate, harsher model (add_measurement_noise).
    """
    if level < 0:
        raise ValueError("noise level must be >= 0")
    v = np.asarray(voltages, dtype=float)
    if level == 0:
        return v.copy()
    rng = np.random.default_rng(seed)
    rms = np.sqrt(np.mean(v**2, axis=0, keepdims=True))
    return v + level * rms * rng.standard_normal(v.shape)


def add_measurement_noise(
    nd: NDMatrix, relative_variance: float, seed: int
) -> NDMatrix:
    """Perturb each entry with zero-mean Gaussian noise.

    The per-entry standard deviation is sqrt(relative_variance) times
    the entry magnitude.  Symmetry is deliberately not restored: noise
    models measurement, which breaks reciprocity.
    """
    if relative_variance < 0:
        raise ValueError("relative_variance must be >= 0")
    if relative_variance == 0:
        return replace(nd, entries=nd.entries.copy())
    rng = np.random.default_rng(seed)
    std = np.sqrt(relative_variance) * np.abs(nd.entries)
    noisy = nd.entries + rng.standard_normal(nd.entries.shape) * std
    return replace(nd, entries=noisy)


# ---------------------------------------------------------------------------
# file formats


def nd_to_json(nd: Union[NDMatrix, DNMatrix]) -> str:
    """Serialize an ND or DN matrix with its metadata."""
    basis = nd.basis
    if isinstance(basis, TrigBasis):
        basis_meta = {"type": "trig", "arcs": basis.arcs.tolist()}
    else:
        basis_meta = {
            "type": "patterns",
            "current_matrix": basis.current_matrix.tolist(),
            "electrode_areas": basis.electrode_areas.tolist(),
            "arc_width": basis.arc_width,
        }
    doc = {
        "kind": nd.kind,
        "L": nd.L,
        "radius_r": nd.radius_r,
        "sigma0": nd.sigma0,
        "scaled_to_unit": getattr(nd, "scaled_to_unit", False),
        "row_major_entries": nd.entries.ravel().tolist(),
        "basis": basis_meta,
    }
    return json.dumps(doc, indent=2)


def nd_from_json(text: str) -> Union[NDMatrix, DNMatrix]:
    doc = json.loads(text)
    L = int(doc["L"])
    bm = doc["basis"]
    if bm["type"] == "trig":
        basis = TrigBasis(L, np.asarray(bm["arcs"], dtype=float))
        dim = L
    else:
        basis = DiscretePatternSet(
            L,
            np.asarray(bm["current_matrix"], dtype=float),
            np.asarray(bm["electrode_areas"], dtype=float),
            bm.get("arc_width"),
        )
        dim = L - 1
    entries = np.asarray(doc["row_major_entries"], dtype=float).reshape(dim, dim)
    if doc.get("scaled_to_unit"):
        return DNMatrix(
            entries, basis, doc["kind"], float(doc["radius_r"]), float(doc["sigma0"])
        )
    sigma0 = doc.get("sigma0")
    return NDMatrix(
        entries,
        basis,
        doc["kind"],
        float(doc.get("radius_r", 1.0)),
        None if sigma0 is None else float(sigma0),
    )


@dataclass(frozen=True)
class RawMeasurement:
    """Hardware export: applied currents, measured voltages, geometry."""

    L: int
    currents: np.ndarray  # (L, L-1), amps
    voltages: np.ndarray  # (L, L-1), volts
    electrode_area_mm2: float


def load_measurement_json(text: str) -> RawMeasurement:
    """Parse a hardware export file.

    Feed the result through synthesize_trig_voltages and then
    nd_matrix_discrete with the normalized trig pattern set.
    """
    doc = json.loads(text)
    L = int(doc["L"])
    currents = np.asarray(doc["currents"], dtype=float)
    voltages = np.asarray(doc["voltages"], dtype=float)
    if currents.shape != (L, L - 1) or voltages.shape != (L, L - 1):
        raise ValueError("currents and voltages must be L x (L-1)")
    area = float(doc.get("electrode_area_mm2", 1.0))
    return RawMeasurement(L, currents, voltages, area)
