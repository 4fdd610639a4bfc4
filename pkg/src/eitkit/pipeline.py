"""Dataset generation, file-based reconstruction, and evaluation.

Chains the library stages behind the three operations the command-line
interface exposes:

* generate -- phantom draws, forward solves, boundary matrices,
  frequency data, and image pairs written in the flat-file format with
  a JSON manifest;
* reconstruct -- one image from a boundary-matrix file or a raw
  measurement file;
* evaluate -- metric report for a manifest plus a predictions
  directory.

All interchange happens through image files and the manifest, so the
learned post-processor never imports this package.

Two modeling choices are load-bearing here.  The continuum simulation
uses the gap-free belt layout: with electrodes projected onto arcs the
top sine mode vanishes at every arc center, which makes the projected
matrix singular and the scaled boundary matrix unobtainable, so arc
geometry enters only through each preset's electrode count (and through
the discrete measurement path, which drops that mode by construction).
And the dataset generator subtracts a homogeneous reference simulated
on the same mesh and basis rather than the analytic one, cancelling the
discretization bias shared by both solves; file-based reconstruction
has no mesh in hand and uses the analytic reference instead.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .dbar import ReconImage, reconstruct_image
from .eitimg import atomic_write_bytes, read_eitimg, write_eitimg
from .electrodes import (
    DNMatrix,
    NDMatrix,
    add_voltage_noise,
    continuum_boundary_voltages,
    dn_from_nd,
    electrode_centers,
    estimate_sigma0,
    homogeneous_nd,
    load_measurement_json,
    nd_from_boundary_voltages,
    nd_from_json,
    nd_matrix_continuum,
    nd_matrix_discrete,
    synthesize_trig_voltages,
    trig_current_patterns,
    TrigBasis,
)
from .mesh import TriMesh, disc_mesh, level_for_tris
from .metrics import rel_l2_error, ssim
from .phantom import (
    ChestConfig,
    CircleConfig,
    ConductivityImage,
    GridSpec,
    Phantom,
    gen_chest_phantom,
    gen_circle_phantom,
    phantom_to_mesh_sigma,
    rasterize,
)
from .presets import Preset, get_preset
from .scattering import (
    KGrid,
    scattering_born_continuum,
    scattering_born_discrete,
)

__all__ = [
    "DatasetManifest",
    "MetricsReport",
    "PredictionMismatchError",
    "ReconstructionResult",
    "SimulationSetup",
    "derive_seed",
    "evaluate_dataset",
    "generate_dataset",
    "render_png",
    "reconstruct_from_file",
    "sample_phantom",
    "simulate_pair",
]

logger = logging.getLogger(__name__)

DATASET_FORMAT = "eitkit-dataset/1"
MANIFEST_NAME = "manifest.json"


def derive_seed(seed: int, index: int, stream: int = 0) -> int:
    """Per-entry seed, stable under reordering and dataset size changes."""
    return int(np.random.SeedSequence((seed, index, stream)).generate_state(1)[0])


def sample_phantom(
    preset: Union[str, Preset],
    seed: int,
    chest_config: Optional[ChestConfig] = None,
    circle_config: Optional[CircleConfig] = None,
) -> Phantom:
    """Draw one phantom from the preset's family."""
    p = get_preset(preset)
    if p.phantom == "chest":
        return gen_chest_phantom(chest_config or ChestConfig(), seed)
    return gen_circle_phantom(circle_config or CircleConfig(), seed)


# ---------------------------------------------------------------------------
# simulation chain


@dataclass
class SimulationSetup:
    """State reused across phantoms: mesh, basis, k-grid, reference.

    Building one of these costs a full homogeneous forward solve; every
    simulate_pair call afterwards reuses it, so construct once per
    dataset (or per mesh/electrode-count combination).
    """

    mesh: TriMesh
    basis: TrigBasis
    kgrid: KGrid
    dn_reference: DNMatrix
    threshold: float
    noise_level: float

    @classmethod
    def for_preset(
        cls,
        preset: Union[str, Preset],
        mesh_tris: int = 16384,
        cutoff_radius: Optional[float] = None,
        threshold: Optional[float] = None,
        noise_level: Optional[float] = None,
    ) -> "SimulationSetup":
        p = get_preset(preset)
        mesh = disc_mesh(level_for_tris(mesh_tris))
        basis = TrigBasis.equispaced(p.n_electrodes)
        kgrid = KGrid(p.cutoff_radius if cutoff_radius is None else cutoff_radius)
        dn_reference = dn_from_nd(nd_matrix_continuum(mesh, 1.0, basis), sigma0=1.0)
        return cls(
            mesh=mesh,
            basis=basis,
            kgrid=kgrid,
            dn_reference=dn_reference,
            threshold=p.threshold if threshold is None else threshold,
            noise_level=p.noise_level if noise_level is None else noise_level,
        )


def simulate_pair(
    phantom: Phantom, setup: SimulationSetup, noise_seed: int
) -> tuple[ConductivityImage, ReconImage, float]:
    """Truth raster and low-pass reconstruction for one phantom.

    Forward solve on the mesh, white noise on the boundary voltages,
    basis pairing, background fit, scaled boundary matrices, frequency
    data against the same-mesh homogeneous reference, and the per-pixel
    solve.  Returns (truth, reconstruction, fitted background).
    """
    sigma_tri = phantom_to_mesh_sigma(phantom, setup.mesh)
    volts = continuum_boundary_voltages(setup.mesh, sigma_tri, setup.basis)
    volts = add_voltage_noise(volts, setup.noise_level, noise_seed)
    nd = nd_from_boundary_voltages(volts, setup.mesh, setup.basis)
    sigma0 = estimate_sigma0(nd)
    dn = dn_from_nd(nd, sigma0=sigma0)
    t = scattering_born_continuum(
        dn, setup.dn_reference, setup.kgrid, threshold=setup.threshold
    )
    recon = reconstruct_image(t, sigma0)
    return rasterize(phantom), recon, sigma0


# ---------------------------------------------------------------------------
# manifest


class PredictionMismatchError(ValueError):
    """Predictions directory does not line up with the manifest ids."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(
            "no prediction found for ids: " + ", ".join(self.missing)
        )


@dataclass
class DatasetManifest:
    """Index of a generated dataset: entries, config snapshot, counts."""

    preset: str
    config: dict
    counts: dict
    entries: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_json(self) -> str:
        doc = {
            "format": DATASET_FORMAT,
            "preset": self.preset,
            "config": self.config,
            "counts": self.counts,
            "entries": self.entries,
            "failures": self.failures,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        doc = json.loads(text)
        if doc.get("format") != DATASET_FORMAT:
            raise ValueError(f"not a dataset manifest (format={doc.get('format')!r})")
        return cls(
            preset=doc["preset"],
            config=doc["config"],
            counts=doc["counts"],
            entries=doc["entries"],
            failures=doc.get("failures", []),
        )

    def save(self, path) -> None:
        atomic_write_bytes(str(path), self.to_json().encode())

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        with open(path) as fh:
            return cls.from_json(fh.read())

    def validate(self, base_dir) -> None:
        """Check id uniqueness and that every referenced image parses."""
        ids = [e["id"] for e in self.entries]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate entry ids: {', '.join(dupes)}")
        for e in self.entries:
            for key in ("truth_path", "dbar_path"):
                path = os.path.join(base_dir, e[key])
                try:
                    read_eitimg(path)
                except (OSError, ValueError) as exc:
                    raise ValueError(
                        f"entry {e['id']}: unreadable {key} {e[key]}: {exc}"
                    ) from exc


# ---------------------------------------------------------------------------
# generation


def generate_dataset(
    preset: Union[str, Preset],
    count: int,
    seed: int,
    out_dir,
    mesh_tris: int = 16384,
    cutoff_radius: Optional[float] = None,
    threshold: Optional[float] = None,
    noise_level: Optional[float] = None,
    chest_config: Optional[ChestConfig] = None,
    circle_config: Optional[CircleConfig] = None,
) -> DatasetManifest:
    """Write ``count`` truth/reconstruction image pairs plus a manifest.

    Every entry draws its phantom and its noise from seeds derived from
    (seed, index), so entries are independent of each other and of the
    total count; rerunning with the same arguments reproduces every
    byte.  Entries whose stage chain fails are recorded under
    ``failures`` and excluded from ``entries``.
    """
    p = get_preset(preset)
    if count < 1:
        raise ValueError("count must be >= 1")
    out_dir = str(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    setup = SimulationSetup.for_preset(
        p,
        mesh_tris=mesh_tris,
        cutoff_radius=cutoff_radius,
        threshold=threshold,
        noise_level=noise_level,
    )
    config = {
        "preset": p.name,
        "seed": int(seed),
        "count": int(count),
        "mesh_tris": setup.mesh.n_tris,
        "n_electrodes": p.n_electrodes,
        "tank_radius": p.tank_radius,
        "electrode_width": p.electrode_width,
        "cutoff_radius": setup.kgrid.cutoff_radius,
        "threshold": setup.threshold,
        "noise_level": setup.noise_level,
        "image_size": GridSpec().n,
    }
    entries, failures = [], []
    for i in range(1, count + 1):
        eid = f"{p.name}_{i:04d}"
        phantom_seed = derive_seed(seed, i, 0)
        noise_seed = derive_seed(seed, i, 1)
        try:
            phantom = sample_phantom(
                p, phantom_seed, chest_config=chest_config, circle_config=circle_config
            )
            truth, recon, sigma0 = simulate_pair(phantom, setup, noise_seed)
            truth_name = f"{eid}_truth.eitimg"
            dbar_name = f"{eid}_dbar.eitimg"
            write_eitimg(os.path.join(out_dir, truth_name), truth.values, truth.grid)
            write_eitimg(os.path.join(out_dir, dbar_name), recon.values, recon.grid)
        except Exception as exc:
            logger.warning("entry %s failed: %s", eid, exc)
            failures.append(
                {
                    "id": eid,
                    "seed": phantom_seed,
                    "error": f"{type(exc).__name__}: {exc}",
                }
            )
            continue
        entries.append(
            {
                "id": eid,
                "truth_path": truth_name,
                "dbar_path": dbar_name,
                "seed": phantom_seed,
                "sigma0": float(sigma0),
                "threshold": setup.threshold,
            }
        )
        logger.info("generated %s (%d/%d)", eid, i, count)
    manifest = DatasetManifest(
        preset=p.name,
        config=config,
        counts={
            "requested": int(count),
            "written": len(entries),
            "failed": len(failures),
        },
        entries=entries,
        failures=failures,
    )
    manifest.validate(out_dir)
    manifest.save(os.path.join(out_dir, MANIFEST_NAME))
    return manifest


# ---------------------------------------------------------------------------
# file-based reconstruction


@dataclass
class ReconstructionResult:
    image: ReconImage
    sigma0: float
    sigma0_estimated: bool
    kind: str  # "continuum" or "discrete"
    cutoff_radius: float
    threshold: float


def _unit_reference(basis, kind: str) -> DNMatrix:
    """Scaled boundary matrix of the unit-disc homogeneous problem."""
    nd_one = NDMatrix(homogeneous_nd(basis, kind), basis, kind, 1.0, 1.0)
    return dn_from_nd(nd_one, sigma0=1.0)


def reconstruct_from_file(
    input_path,
    sigma0: Optional[float] = None,
    preset: Optional[Union[str, Preset]] = None,
    cutoff_radius: Optional[float] = None,
    threshold: Optional[float] = None,
) -> ReconstructionResult:
    """Reconstruct one image from a boundary-matrix or measurement file.

    Measurement files (raw per-electrode currents and voltages) run the
    discrete path: recombination to the orthonormal patterns, discrete
    pairing, background fit, scaled matrices, frequency data, per-pixel
    solve.  Matrix files skip straight to the frequency data.  When no
    background conductivity is supplied it is fitted to the measured
    matrix and logged.  A preset supplies tank geometry, cutoff radius,
    and threshold defaults; without one the domain radius defaults to 1
    and the frequency data is not thresholded.
    """
    p = get_preset(preset) if preset is not None else None
    radius = cutoff_radius if cutoff_radius is not None else (
        p.cutoff_radius if p else 4.5
    )
    t_max = threshold if threshold is not None else (p.threshold if p else np.inf)
    kgrid = KGrid(radius)

    with open(input_path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"input file {input_path} is not JSON: {exc}") from exc

    if "currents" in doc and "voltages" in doc:
        raw = load_measurement_json(text)
        patterns = trig_current_patterns(
            raw.L, arc_width=p.arc_width if p else None
        )
        volts = synthesize_trig_voltages(raw.currents, raw.voltages, patterns)
        nd = nd_matrix_discrete(patterns, volts)
        if p is not None:
            nd = replace(nd, radius_r=p.tank_radius)
    elif "row_major_entries" in doc:
        nd = nd_from_json(text)
    else:
        raise ValueError(
            f"unrecognized input file {input_path}: expected a boundary-matrix "
            "or measurement JSON document"
        )

    if isinstance(nd, DNMatrix):
        dn, s0, estimated = nd, nd.sigma0, False
    else:
        estimated = sigma0 is None
        s0 = estimate_sigma0(nd) if estimated else float(sigma0)
        if estimated:
            logger.info("fitted background conductivity %.6g", s0)
        dn = dn_from_nd(nd, sigma0=s0)

    dn_one = _unit_reference(dn.basis, dn.kind)
    if dn.kind == "continuum":
        t = scattering_born_continuum(dn, dn_one, kgrid, threshold=t_max)
    else:
        t = scattering_born_discrete(
            dn, dn_one, dn.basis, electrode_centers(dn.basis.L), kgrid, threshold=t_max
        )
    image = reconstruct_image(t, s0)
    return ReconstructionResult(
        image=image,
        sigma0=float(s0),
        sigma0_estimated=estimated,
        kind=dn.kind,
        cutoff_radius=radius,
        threshold=float(t_max),
    )


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class MetricsReport:
    """Per-image and aggregate scores for inputs and predictions."""

    per_image: list
    aggregates: dict
    counts: dict
    extra_predictions: list = field(default_factory=list)

    def __post_init__(self):
        for row in self.per_image:
            for side in ("input", "output"):
                if not -1.0 <= row[side]["ssim"] <= 1.0:
                    raise ValueError(f"ssim out of range for {row['id']}")
                if row[side]["rel_l2"] < 0.0:
                    raise ValueError(f"negative rel_l2 for {row['id']}")

    def to_json(self) -> str:
        doc = {
            "per_image": self.per_image,
            "aggregates": self.aggregates,
            "counts": self.counts,
            "extra_predictions": self.extra_predictions,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        atomic_write_bytes(str(path), self.to_json().encode())

    def table(self) -> str:
        """Fixed-width text table, one row per image plus aggregates."""
        header = (
            f"{'id':<16} {'rel_l2 in':>10} {'rel_l2 out':>11} "
            f"{'ssim in':>8} {'ssim out':>9}"
        )
        lines = [header, "-" * len(header)]
        for row in self.per_image:
            lines.append(
                f"{row['id']:<16} {row['input']['rel_l2']:>10.4f} "
                f"{row['output']['rel_l2']:>11.4f} {row['input']['ssim']:>8.4f} "
                f"{row['output']['ssim']:>9.4f}"
            )
        lines.append("-" * len(header))
        for stat in ("mean", "std"):
            a = self.aggregates
            lines.append(
                f"{stat:<16} {a['input']['rel_l2'][stat]:>10.4f} "
                f"{a['output']['rel_l2'][stat]:>11.4f} "
                f"{a['input']['ssim'][stat]:>8.4f} "
                f"{a['output']['ssim'][stat]:>9.4f}"
            )
        return "\n".join(lines)


_ROLE_SUFFIXES = ("_dbar", "_truth", "_pred")


def _prediction_index(pred_dir) -> dict:
    """Map ids to image headers, stripping a trailing role suffix."""
    index = {}
    for name in sorted(os.listdir(pred_dir)):
        if not name.endswith(".eitimg"):
            continue
        stem = name[: -len(".eitimg")]
        for suffix in _ROLE_SUFFIXES:
            if stem.endswith(suffix):
                stem = stem[: -len(suffix)]
                break
        if stem in index:
            raise ValueError(f"multiple prediction files map to id {stem!r}")
        index[stem] = os.path.join(pred_dir, name)
    return index


def _score(values: np.ndarray, truth: np.ndarray) -> dict:
    return {
        "rel_l2": rel_l2_error(values, truth),
        "ssim": ssim(values, truth),
    }


def _aggregate(rows: list, side: str, metric: str) -> dict:
    vals = np.array([row[side][metric] for row in rows], dtype=float)
    return {"mean": float(vals.mean()), "std": float(vals.std())}


def evaluate_dataset(manifest_path, pred_dir) -> MetricsReport:
    """Score D-bar inputs and predictions against the manifest's truths.

    Predictions are matched to manifest ids by filename after stripping
    a trailing ``_dbar``/``_truth``/``_pred`` role suffix, so a copied
    inputs directory evaluates as-is.  Missing ids raise
    PredictionMismatchError listing them; unmatched prediction files are
    reported but otherwise ignored.
    """
    manifest = DatasetManifest.load(manifest_path)
    base_dir = os.path.dirname(os.path.abspath(str(manifest_path)))
    ids = [e["id"] for e in manifest.entries]
    if len(set(ids)) != len(ids):
        raise ValueError("manifest has duplicate entry ids")
    index = _prediction_index(pred_dir)
    missing = [i for i in ids if i not in index]
    if missing:
        raise PredictionMismatchError(missing)
    extra = sorted(set(index) - set(ids))

    per_image = []
    for entry in manifest.entries:
        truth = read_eitimg(os.path.join(base_dir, entry["truth_path"])).values
        dbar = read_eitimg(os.path.join(base_dir, entry["dbar_path"])).values
        pred = read_eitimg(index[entry["id"]]).values
        if pred.shape != truth.shape:
            raise ValueError(f"prediction for {entry['id']} has shape {pred.shape}")
        per_image.append(
            {
                "id": entry["id"],
                "input": _score(dbar, truth),
                "output": _score(pred, truth),
            }
        )
    aggregates = {
        side: {m: _aggregate(per_image, side, m) for m in ("rel_l2", "ssim")}
        for side in ("input", "output")
    }
    return MetricsReport(
        per_image=per_image,
        aggregates=aggregates,
        counts={"evaluated": len(per_image), "extra_predictions": len(extra)},
        extra_predictions=extra,
    )


# ---------------------------------------------------------------------------
# rendering


def render_png(
    input_path,
    out_path,
    cmap: str = "gray",
    clip_disc: bool = False,
    vmin: Optional[float] = None,
    vmax: Optional[float] = None,
) -> None:
    """Write a stored image as a PNG raster.

    Row 0 of the payload is the bottom of the picture (y increases
    upward).  With ``clip_disc`` the pixels outside the inscribed disc
    become transparent.
    """
    from matplotlib import colormaps
    from matplotlib import image as mpl_image

    if cmap not in colormaps:
        raise ValueError(f"unknown colormap {cmap!r}")
    img = read_eitimg(input_path)
    values = np.asarray(img.values, dtype=float)
    if clip_disc:
        X, Y = img.grid.centers()
        values = np.where(X**2 + Y**2 <= 1.0, values, np.nan)
    out_path = str(out_path)
    tmp = out_path + ".tmp.png"
    try:
        mpl_image.imsave(
            tmp, values, cmap=cmap, vmin=vmin, vmax=vmax, origin="lower", format="png"
        )
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
