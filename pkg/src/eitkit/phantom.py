"""Random conductivity phantoms and their rasterization.

Two families: chest-like phantoms (five organ polygons with jittered
boundaries, random presence, and optional lung "injuries" split by a
horizontal line) and circular-inclusion phantoms (one to three
non-overlapping discs on a low-conductivity background).  Values are
drawn uniformly from per-tissue ranges; every draw is reproducible
from (config, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np
import shapely
from shapely.geometry import Point, Polygon, box

_DISC = Point(0.0, 0.0).buffer(0.98, quad_segs=64)


@dataclass(frozen=True)
class Region:
    """One conductivity region: a polygon or a circle with its value."""

    sigma: float
    polygon: Optional[Polygon] = None
    center: Optional[tuple[float, float]] = None
    radius: Optional[float] = None
    label: str = ""

    @property
    def is_circle(self) -> bool:
        return self.radius is not None

    def area(self) -> float:
        if self.is_circle:
            return np.pi * self.radius**2
        return self.polygon.area

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.is_circle:
            cx, cy = self.center
            return (x - cx) ** 2 + (y - cy) ** 2 < self.radius**2
        return shapely.contains_xy(self.polygon, x, y)


@dataclass
class Phantom:
    """Piecewise-constant conductivity on the unit disc."""

    background_sigma: float
    regions: list[Region]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.background_sigma <= 0:
            raise ValueError("background conductivity must be positive")
        for r in self.regions:
            if r.sigma <= 0:
                raise ValueError("region conductivity must be positive")

    def sigma_at(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Conductivity at points; innermost (smallest) region wins."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.full(x.shape, self.background_sigma)
        # paint large regions first so smaller (inner) ones overwrite
        for region in sorted(self.regions, key=lambda r: -r.area()):
            out[region.contains(x, y)] = region.sigma
        return out


@dataclass
class GridSpec:
    """Square pixel grid; row i is y = ymin + i*h, column j is x = xmin + j*h."""

    n: int = 64
    xmin: float = -1.0
    xmax: float = 1.0
    ymin: float = -1.0
    ymax: float = 1.0

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.n - 1)

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.linspace(self.xmin, self.xmax, self.n)
        y = np.linspace(self.ymin, self.ymax, self.n)
        return np.meshgrid(x, y)


@dataclass
class ConductivityImage:
    """Conductivity sampled on the square [-1, 1]^2."""

    values: np.ndarray
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ValueError("values must match the grid resolution")
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise ValueError("conductivity values must be finite and positive")


# ---------------------------------------------------------------------------
# configurations


def canonical_chest_organs() -> dict[str, np.ndarray]:
    """The five stock organ outlines (name -> (N, 2) vertex array)."""
    text = resources.files("eitkit.data").joinpath("chest_organs.json").read_text()
    return {k: np.asarray(v, dtype=float) for k, v in json.loads(text).items()}


@dataclass
class ChestConfig:
    """Distribution parameters for chest-like phantoms."""

    inclusion_probabilities: dict = field(
        default_factory=lambda: {
            "heart": 0.95,
            "aorta": 0.95,
            "left_lung": 0.90,
            "right_lung": 0.90,
            "spine": 1.00,
        }
    )
    sigma_ranges: dict = field(
        default_factory=lambda: {
            "heart": (0.5, 0.8),
            "aorta": (0.5, 0.8),
            "left_lung": (0.01, 0.2),
            "right_lung": (0.01, 0.2),
            "spine": (0.01, 0.2),
            "background": (0.29, 0.31),
            "injury": (0.01, 1.5),
        }
    )
    boundary_noise_db: Optional[float] = 25.0  # None disables jitter
    injury_probability: float = 0.3
    organs: Optional[dict] = None  # name -> vertices; default stock anatomy

    def __post_init__(self):
        for p in self.inclusion_probabilities.values():
            if not 0.0 <= p <= 1.0:
                raise ValueError("inclusion probabilities must be in [0, 1]")
        if not 0.0 <= self.injury_probability <= 1.0:
            raise ValueError("injury probability must be in [0, 1]")
        for lo, hi in self.sigma_ranges.values():
            if not 0 < lo <= hi:
                raise ValueError("sigma ranges must be positive and ordered")

    @classmethod
    def from_json(cls, text: str) -> "ChestConfig":
        doc = json.loads(text)
        ranges = {k: tuple(v) for k, v in doc.get("sigma_ranges", {}).items()}
        kwargs = {}
        if "inclusion_probabilities" in doc:
            kwargs["inclusion_probabilities"] = doc["inclusion_probabilities"]
        if ranges:
            kwargs["sigma_ranges"] = ranges
        if "boundary_noise_db" in doc:
            kwargs["boundary_noise_db"] = doc["boundary_noise_db"]
        if "injury_probability" in doc:
            kwargs["injury_probability"] = doc["injury_probability"]
        if "organs" in doc:
            kwargs["organs"] = {
                k: np.asarray(v, dtype=float) for k, v in doc["organs"].items()
            }
        return cls(**kwargs)


@dataclass
class CircleConfig:
    """Distribution parameters for circular-inclusion phantoms."""

    count_range: tuple[int, int] = (1, 3)
    radius_range: tuple[float, float] = (0.2, 0.4)
    distance_range: tuple[float, float] = (0.0, 0.6)
    angle_range: tuple[float, float] = (0.0, 2.0 * np.pi)
    conductive_range: tuple[float, float] = (0.05, 0.12)
    resistive_range: tuple[float, float] = (0.005, 0.015)
    background_range: tuple[float, float] = (0.027, 0.033)

    def __post_init__(self):
        if self.radius_range[1] + self.distance_range[1] > 1.0:
            raise ValueError("radius + max center distance must stay inside the disc")

    @classmethod
    def from_json(cls, text: str) -> "CircleConfig":
        doc = json.loads(text)
        kwargs = {k: tuple(v) for k, v in doc.items()}
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# generators


def _jitter_polygon(
    verts: np.ndarray, noise_db: Optional[float], rng: np.random.Generator
) -> Polygon:
    """Additive Gaussian jitter at the given SNR, with validity retries.

    Noise power per coordinate sequence is its mean square divided by
    10^(SNR/10), matching the common signal-processing tool semantics.
    """
    if noise_db is None or np.isinf(noise_db):
        return Polygon(verts)
    factor = 10.0 ** (noise_db / 10.0)
    std_x = np.sqrt(np.mean(verts[:, 0] ** 2) / factor)
    std_y = np.sqrt(np.mean(verts[:, 1] ** 2) / factor)
    for _ in range(20):
        noisy = verts + rng.standard_normal(verts.shape) * [std_x, std_y]
        poly = Polygon(noisy)
        if poly.is_valid and poly.area > 1e-4:
            return poly
    raise RuntimeError("degenerate organ polygon after repeated jitter")


def _clip_to_disc(poly: Polygon) -> Optional[Polygon]:
    if _DISC.contains(poly):  # common case; keeps vertices untouched
        return poly
    clipped = poly.intersection(_DISC)
    if clipped.is_empty:
        return None
    if clipped.geom_type == "MultiPolygon":
        clipped = max(clipped.geoms, key=lambda g: g.area)
    return clipped


def _split_horizontal(poly: Polygon, y: float) -> tuple[Polygon, Polygon]:
    minx, miny, maxx, maxy = poly.bounds
    pad = 0.1
    lower = poly.intersection(box(minx - pad, miny - pad, maxx + pad, y))
    upper = poly.intersection(box(minx - pad, y, maxx + pad, maxy + pad))
    return lower, upper


def _largest_piece(geom) -> Optional[Polygon]:
    if geom.is_empty:
        return None
    if geom.geom_type == "Polygon":
        return geom
    pieces = [g for g in getattr(geom, "geoms", []) if g.geom_type == "Polygon"]
    return max(pieces, key=lambda g: g.area) if pieces else None


def gen_chest_phantom(config: ChestConfig, seed: int) -> Phantom:
    """Draw one chest-like phantom.

    Organ presence, boundary jitter, conductivity values, and lung
    injuries are all drawn from the given seed in a fixed order, so
    identical inputs reproduce the phantom exactly.
    """
    rng = np.random.default_rng(seed)
    organs = config.organs or canonical_chest_organs()
    background = rng.uniform(*config.sigma_ranges["background"])
    regions: list[Region] = []
    for name in ("heart", "aorta", "left_lung", "right_lung", "spine"):
        if name not in organs:
            continue
        included = rng.uniform() < config.inclusion_probabilities.get(name, 1.0)
        if not included:
            continue
        poly = _jitter_polygon(organs[name], config.boundary_noise_db, rng)
        poly = _clip_to_disc(poly)
        if poly is None:
            continue
        sigma = rng.uniform(*config.sigma_ranges[name])
        is_lung = name.endswith("lung")
        injured = is_lung and rng.uniform() < config.injury_probability
        if injured:
            miny, maxy = poly.bounds[1], poly.bounds[3]
            # split height uniform over the middle 60% of the bbox
            y = rng.uniform(miny + 0.2 * (maxy - miny), maxy - 0.2 * (maxy - miny))
            lower, upper = _split_horizontal(poly, y)
            lo, hi = config.sigma_ranges["injury"]
            for part_name, part in (("lower", lower), ("upper", upper)):
                piece = _largest_piece(part)
                if piece is None:
                    continue
                regions.append(
                    Region(
                        sigma=rng.uniform(lo, hi),
                        polygon=piece,
                        label=f"{name}_{part_name}",
                    )
                )
        else:
            regions.append(Region(sigma=sigma, polygon=poly, label=name))
    return Phantom(
        background_sigma=background,
        regions=regions,
        provenance={"seed": int(seed), "config": "chest"},
    )


def gen_circle_phantom(
    config: CircleConfig, seed: int, max_rejections: int = 200_000
) -> Phantom:
    """Draw one circular-inclusion phantom.

    Each circle's (radius, center distance, angle) triple is redrawn
    wholesale until it overlaps no accepted circle; values are drawn
    after the geometry is settled.
    """
    rng = np.random.default_rng(seed)
    background = rng.uniform(*config.background_range)
    n = int(rng.integers(config.count_range[0], config.count_range[1] + 1))
    # Radii are drawn once and kept; only positions are rejection-
    # resampled.  Rejecting radii too would bias the accepted radius
    # distribution visibly below its uniform mean, and any radius
    # combination from the configured ranges admits a non-overlapping
    # placement, so position-only resampling always terminates.
    radii = rng.uniform(*config.radius_range, size=n)
    batch = 64
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(0, max_rejections, batch):
        dists = rng.uniform(*config.distance_range, size=(batch, n))
        angles = rng.uniform(*config.angle_range, size=(batch, n))
        cx = dists * np.cos(angles)
        cy = dists * np.sin(angles)
        gaps = (
            np.hypot(cx[:, :, None] - cx[:, None, :], cy[:, :, None] - cy[:, None, :])
            - (radii[:, None] + radii)
        )
        ok = np.flatnonzero(np.all(gaps[:, iu, ju] > 0, axis=1))
        if ok.size:
            first = ok[0]
            cx, cy = cx[first], cy[first]
            break
    else:
        raise RuntimeError("rejection budget exhausted placing circles")
    placed = list(zip(cx, cy, radii))
    regions = []
    for i, (cx, cy, radius) in enumerate(placed):
        conductive = rng.uniform() < 0.5
        rng_range = config.conductive_range if conductive else config.resistive_range
        regions.append(
            Region(
                sigma=rng.uniform(*rng_range),
                center=(cx, cy),
                radius=radius,
                label=f"circle_{i}",
            )
        )
    return Phantom(
        background_sigma=background,
        regions=regions,
        provenance={"seed": int(seed), "config": "circles"},
    )


# ---------------------------------------------------------------------------
# sampling


def rasterize(phantom: Phantom, grid: Optional[GridSpec] = None) -> ConductivityImage:
    """Sample the phantom at pixel centers of the square grid.

    The background extends over the whole square, including outside
    the disc.
    """
    grid = grid or GridSpec()
    X, Y = grid.centers()
    values = phantom.sigma_at(X.ravel(), Y.ravel()).reshape(grid.n, grid.n)
    return ConductivityImage(values, grid)


def phantom_to_mesh_sigma(phantom: Phantom, mesh) -> np.ndarray:
    """Per-triangle conductivity: the region value at each centroid."""
    cen = mesh.centroids()
    return phantom.sigma_at(cen[:, 0], cen[:, 1])
