"""Born-approximation frequency data from boundary-map differences.

Pairs complex-exponential boundary traces against the difference
between a measured Dirichlet-to-Neumann matrix and the homogeneous
reference, producing low-pass frequency data on a square grid: values
are kept inside a cutoff disc, zeroed at the origin, and zeroed
wherever the real or imaginary part exceeds an amplitude threshold.
The grid is wider than the cutoff disc so that the downstream
integral-equation solver can periodize its kernel without wrap-around.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Union

import numpy as np

from eitkit.electrodes import DiscretePatternSet, DNMatrix, TrigBasis

# computational half-width of the frequency grid as a multiple of the
# cutoff radius; leaves room for kernel periodization
GRID_OVERSIZE = 2.3


@dataclass(frozen=True)
class KGrid:
    """Square frequency grid holding the origin exactly.

    Entry (i, j) sits at k = k1[j] + i*k2[i] with both coordinates
    running over (index - size/2) * h_k, so index size/2 is k = 0.
    """

    cutoff_radius: float
    size: int = 64
    half_width: float = None  # default: GRID_OVERSIZE * cutoff_radius

    def __post_init__(self):
        if self.half_width is None:
            object.__setattr__(
                self, "half_width", GRID_OVERSIZE * self.cutoff_radius
            )
        if self.size % 2 != 0 or self.size < 4:
            raise ValueError("grid size must be even (origin must be a node)")
        if not 0 < self.cutoff_radius <= self.half_width:
            raise ValueError("cutoff radius must lie within the grid half-width")

    @property
    def h_k(self) -> float:
        return 2.0 * self.half_width / self.size

    def axis(self) -> np.ndarray:
        return (np.arange(self.size) - self.size // 2) * self.h_k

    def nodes(self) -> np.ndarray:
        """Complex node coordinates, shape (size, size)."""
        ax = self.axis()
        return ax[None, :] + 1j * ax[:, None]

    def support_mask(self) -> np.ndarray:
        """True where 0 < |k| <= cutoff radius."""
        k = self.nodes()
        return (np.abs(k) <= self.cutoff_radius) & (k != 0)


@dataclass
class ScatteringData:
    """Thresholded low-pass frequency data on a KGrid."""

    values: np.ndarray
    kgrid: KGrid
    threshold: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.kgrid.size, self.kgrid.size):
            raise ValueError("values must match the grid size")
        if np.any(self.values[~self.kgrid.support_mask()] != 0):
            raise ValueError("values must vanish at the origin and beyond the cutoff")
        finite = self.values[np.isfinite(self.values)]
        if finite.size != self.values.size:
            raise ValueError("values must be finite")
        if np.any(np.abs(self.values.real) > self.threshold) or np.any(
            np.abs(self.values.imag) > self.threshold
        ):
            raise ValueError("values must respect the amplitude threshold")

    @property
    def cutoff_radius(self) -> float:
        return self.kgrid.cutoff_radius


def _apply_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    """Zero (not clamp) entries whose real or imaginary part is too large."""
    bad = (np.abs(values.real) > threshold) | (np.abs(values.imag) > threshold)
    out = values.copy()
    out[bad] = 0.0
    return out


def _check_dn_pair(dn_sigma: DNMatrix, dn_one: DNMatrix, kind: str):
    for dn in (dn_sigma, dn_one):
        if dn.kind != kind:
            raise ValueError(f"expected {kind}-kind boundary matrices")
        if not dn.scaled_to_unit:
            raise ValueError("boundary matrices must be scaled to the unit problem")
    if dn_sigma.entries.shape != dn_one.entries.shape:
        raise ValueError("boundary matrix shapes differ")


def _same_trig_basis(a: TrigBasis, b: TrigBasis) -> bool:
    return a.L == b.L and np.array_equal(a.arcs, b.arcs)


def scattering_born_continuum(
    dn_sigma: DNMatrix,
    dn_one: DNMatrix,
    kgrid: KGrid,
    threshold: float,
    quad_points: int = 512,
) -> ScatteringData:
    """Frequency data from trig-basis boundary matrices.

    For each grid node k inside the cutoff disc, expands the boundary
    traces of exp(ikz) and exp(i k̄ z̄) in the trig basis by trapezoid
    quadrature on the circle (spectrally accurate here) and evaluates
    the bilinear form against the matrix difference.
    """
    _check_dn_pair(dn_sigma, dn_one, "continuum")
    if not isinstance(dn_sigma.basis, TrigBasis) or not _same_trig_basis(
        dn_sigma.basis, dn_one.basis
    ):
        raise ValueError("boundary matrices must share one trig basis")
    delta = dn_sigma.entries - dn_one.entries

    theta = 2.0 * np.pi * np.arange(quad_points) / quad_points
    z = np.exp(1j * theta)
    phi_w = dn_sigma.basis.eval(theta).T * (2.0 * np.pi / quad_points)  # (B, N)

    k = kgrid.nodes()
    mask = kgrid.support_mask()
    ks = k[mask]
    coef_fwd = np.exp(1j * np.outer(ks, z)) @ phi_w  # rows: exp(ikz) coefficients
    coef_rev = np.exp(1j * np.outer(np.conj(ks), np.conj(z))) @ phi_w
    tvals = np.einsum("km,mn,kn->k", coef_rev, delta, coef_fwd)

    values = np.zeros_like(k)
    values[mask] = tvals
    return ScatteringData(_apply_threshold(values, threshold), kgrid, threshold)


def expand_asymptotics(
    k: Union[complex, np.ndarray],
    electrode_centers: np.ndarray,
    patterns: DiscretePatternSet,
) -> np.ndarray:
    """Project the electrode samples of exp(ikz) onto the pattern span.

    Returns Phi Phi^T E for E_l = exp(i k z_l); with a complete
    mean-free pattern set this equals E minus its electrode mean, which
    is the part of E the measured data can actually see.  At k = 0 the
    samples are constant and the projection vanishes.
    """
    centers = np.asarray(electrode_centers)
    if centers.shape != (patterns.L,):
        raise ValueError("need one unit-circle point per electrode")
    if np.any(np.abs(np.abs(centers) - 1.0) > 1e-9):
        raise ValueError("electrode centers must lie on the unit circle")
    phi = patterns.current_matrix
    samples = np.exp(1j * np.multiply.outer(np.asarray(k), centers))
    return (samples @ phi) @ phi.T


def scattering_born_discrete(
    dn_sigma: DNMatrix,
    dn_one: DNMatrix,
    patterns: DiscretePatternSet,
    electrode_centers: np.ndarray,
    kgrid: KGrid,
    threshold: float,
) -> ScatteringData:
    """Frequency data from electrode-discrete boundary matrices.

    Applies the periodic-trapezoid quadrature form
    (2 pi / L) * E(conj k)^T Phi (M_sigma - M_1) Phi^T E(k), with the
    exponential samples projected onto the pattern span.
    """
    _check_dn_pair(dn_sigma, dn_one, "discrete")
    L = patterns.L
    if dn_sigma.entries.shape != (L - 1, L - 1):
        raise ValueError("boundary matrices must be square in the pattern basis")
    centers = np.asarray(electrode_centers)
    if centers.shape != (L,) or np.any(np.abs(np.abs(centers) - 1.0) > 1e-9):
        raise ValueError("electrode centers must be unit-circle points, one per electrode")
    delta = dn_sigma.entries - dn_one.entries
    phi = patterns.current_matrix

    k = kgrid.nodes()
    mask = kgrid.support_mask()
    ks = k[mask]
    coef_fwd = np.exp(1j * np.outer(ks, centers)) @ phi  # Phi^T E(k), per row
    coef_rev = np.exp(1j * np.outer(np.conj(ks), np.conj(centers))) @ phi
    tvals = (2.0 * np.pi / L) * np.einsum("km,mn,kn->k", coef_rev, delta, coef_fwd)

    values = np.zeros_like(k)
    values[mask] = tvals
    return ScatteringData(_apply_threshold(values, threshold), kgrid, threshold)


# ---------------------------------------------------------------------------
# file format: JSON header + raw complex payload


def write_scattering(data: ScatteringData, path: str) -> None:
    """Write a JSON header at `path` and the payload at `path + '.raw'`.

    Payload: row-major (Re, Im) pairs, little-endian float64.
    """
    payload_name = os.path.basename(path) + ".raw"
    header = {
        "size": data.kgrid.size,
        "s": data.kgrid.half_width,
        "R": data.kgrid.cutoff_radius,
        "T_max": data.threshold,
        "dtype": "c16le",
        "payload": payload_name,
    }
    pairs = np.empty((data.kgrid.size, data.kgrid.size, 2))
    pairs[..., 0] = data.values.real
    pairs[..., 1] = data.values.imag
    with open(path, "w") as fh:
        json.dump(header, fh, indent=1)
    with open(os.path.join(os.path.dirname(path), payload_name), "wb") as fh:
        fh.write(pairs.astype("<f8").tobytes())


def read_scattering(path: str) -> ScatteringData:
    with open(path) as fh:
        header = json.load(fh)
    kgrid = KGrid(
        cutoff_radius=header["R"], size=header["size"], half_width=header["s"]
    )
    payload = os.path.join(os.path.dirname(path), header["payload"])
    raw = np.fromfile(payload, dtype="<f8").reshape(kgrid.size, kgrid.size, 2)
    values = raw[..., 0] + 1j * raw[..., 1]
    return ScatteringData(values, kgrid, header["T_max"])
