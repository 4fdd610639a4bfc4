"""2D electrical impedance tomography toolkit.

Simulates boundary measurements for conductivity phantoms on the unit
disc, reconstructs conductivities with a regularized low-pass D-bar
method, and generates labelled datasets for learned post-processing.
"""

from eitkit.mesh import TriMesh, disc_mesh, refine
from eitkit.fem import solve_neumann, NeumannSolver, PotentialSolution
from eitkit.electrodes import (
    TrigBasis,
    DiscretePatternSet,
    NDMatrix,
    DNMatrix,
    RawMeasurement,
    nd_matrix_continuum,
    nd_matrix_discrete,
    continuum_boundary_voltages,
    nd_from_boundary_voltages,
    trig_current_patterns,
    synthesize_trig_voltages,
    simulate_electrode_voltages,
    dn_from_nd,
    estimate_sigma0,
    homogeneous_nd,
    add_measurement_noise,
    add_voltage_noise,
    electrode_centers,
    nd_to_json,
    nd_from_json,
    load_measurement_json,
)
from eitkit.phantom import (
    Phantom,
    Region,
    GridSpec,
    ConductivityImage,
    ChestConfig,
    CircleConfig,
    canonical_chest_organs,
    gen_chest_phantom,
    gen_circle_phantom,
    rasterize,
    phantom_to_mesh_sigma,
)
from eitkit.scattering import (
    KGrid,
    ScatteringData,
    scattering_born_continuum,
    scattering_born_discrete,
    expand_asymptotics,
    write_scattering,
    read_scattering,
)
from eitkit.dbar import (
    MuField,
    ReconImage,
    DbarConvergenceError,
    solve_dbar,
    recover_sigma,
    reconstruct_image,
)
from eitkit.metrics import rel_l2_error, ssim
from eitkit.eitimg import EITImage, write_eitimg, read_eitimg, payload_path
from eitkit.presets import Preset, ACT4, KIT4, PRESETS, get_preset
from eitkit.pipeline import (
    DatasetManifest,
    MetricsReport,
    PredictionMismatchError,
    ReconstructionResult,
    SimulationSetup,
    derive_seed,
    evaluate_dataset,
    generate_dataset,
    reconstruct_from_file,
    render_png,
    sample_phantom,
    simulate_pair,
)

__all__ = [
    "TriMesh",
    "disc_mesh",
    "refine",
    "solve_neumann",
    "NeumannSolver",
    "PotentialSolution",
    "TrigBasis",
    "DiscretePatternSet",
    "NDMatrix",
    "DNMatrix",
    "RawMeasurement",
    "nd_matrix_continuum",
    "nd_matrix_discrete",
    "continuum_boundary_voltages",
    "nd_from_boundary_voltages",
    "trig_current_patterns",
    "synthesize_trig_voltages",
    "simulate_electrode_voltages",
    "dn_from_nd",
    "estimate_sigma0",
    "homogeneous_nd",
    "add_measurement_noise",
    "add_voltage_noise",
    "electrode_centers",
    "nd_to_json",
    "nd_from_json",
    "load_measurement_json",
    "Phantom",
    "Region",
    "GridSpec",
    "ConductivityImage",
    "ChestConfig",
    "CircleConfig",
    "canonical_chest_organs",
    "gen_chest_phantom",
    "gen_circle_phantom",
    "rasterize",
    "phantom_to_mesh_sigma",
    "KGrid",
    "ScatteringData",
    "scattering_born_continuum",
    "scattering_born_discrete",
    "expand_asymptotics",
    "write_scattering",
    "read_scattering",
    "MuField",
    "ReconImage",
    "DbarConvergenceError",
    "solve_dbar",
    "recover_sigma",
    "reconstruct_image",
    "rel_l2_error",
    "ssim",
    "EITImage",
    "write_eitimg",
    "read_eitimg",
    "payload_path",
    "Preset",
    "ACT4",
    "KIT4",
    "PRESETS",
    "get_preset",
    "DatasetManifest",
    "MetricsReport",
    "PredictionMismatchError",
    "ReconstructionResult",
    "SimulationSetup",
    "derive_seed",
    "evaluate_dataset",
    "generate_dataset",
    "reconstruct_from_file",
    "render_png",
    "sample_phantom",
    "simulate_pair",
]

__version__ = "0.1.0"
