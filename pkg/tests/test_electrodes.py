"""Measurement-operator checks.

The anchor is the homogeneous unit disc, whose ND operator is
diagonal 1/|n| in the trig basis; everything else (arc projection,
discrete pairing, scalings, background estimation) is checked for
consistency against that and against closed-form references.
"""

import numpy as np
import pytest

from eitkit.electrodes import (
    DiscretePatternSet,
    NDMatrix,
    TrigBasis,
    _projected_flux_loads,
    add_measurement_noise,
    add_voltage_noise,
    continuum_boundary_voltages,
    dn_from_nd,
    estimate_sigma0,
    homogeneous_nd,
    nd_from_boundary_voltages,
    nd_from_json,
    nd_matrix_continuum,
    nd_matrix_discrete,
    nd_to_json,
    simulate_electrode_voltages,
    synthesize_trig_voltages,
    trig_current_patterns,
)
from eitkit.fem import NeumannSolver
from eitkit.mesh import disc_mesh

KIT4_ARC = 0.025 / 0.14  # angular electrode width used in several tests


@pytest.fixture(scope="module")
def mesh6():
    return disc_mesh(6)


@pytest.fixture(scope="module")
def mesh5():
    return disc_mesh(5)


# ---------------------------------------------------------------------------
# basis


def test_basis_orthonormal():
    basis = TrigBasis.equispaced(16)
    theta = 2 * np.pi * np.arange(8192) / 8192
    phi = basis.eval(theta)
    gram = phi @ phi.T * (2 * np.pi / len(theta))
    assert np.abs(gram - np.eye(16)).max() <= 1e-10


def test_basis_rejects_bad_L():
    with pytest.raises(ValueError):
        TrigBasis.equispaced(7)
    with pytest.raises(ValueError):
        TrigBasis.equispaced(2)


def test_basis_indices_skip_zero():
    basis = TrigBasis.equispaced(8)
    assert basis.indices.tolist() == [-4, -3, -2, -1, 1, 2, 3, 4]


def test_full_coverage_flag():
    assert TrigBasis.equispaced(16).full_coverage
    assert not TrigBasis.equispaced(16, arc_width=KIT4_ARC).full_coverage


# ---------------------------------------------------------------------------
# continuum ND


def test_homogeneous_nd_diagonal(mesh6):
    basis = TrigBasis.equispaced(32)
    nd = nd_matrix_continuum(mesh6, 1.0, basis)
    n = np.abs(basis.indices)
    diag_rel = np.abs(np.diag(nd.entries) * n - 1.0)
    assert diag_rel.max() <= 0.02
    off = np.abs(nd.entries - np.diag(np.diag(nd.entries)))
    scale = np.minimum.outer(1.0 / n, 1.0 / n)
    assert (off / scale).max() <= 0.01


def test_homogeneous_nd_improves_under_refinement(mesh5, mesh6):
    basis = TrigBasis.equispaced(32)
    errs = []
    for mesh in (mesh5, mesh6):
        nd = nd_matrix_continuum(mesh, 1.0, basis)
        n = np.abs(basis.indices)
        errs.append(np.abs(np.diag(nd.entries) * n - 1.0).max())
    assert errs[1] < errs[0]


def test_constant_sigma_scales_entries(mesh5):
    basis = TrigBasis.equispaced(16)
    r1 = nd_matrix_continuum(mesh5, 1.0, basis).entries
    r2 = nd_matrix_continuum(mesh5, 2.0, basis).entries
    assert np.allclose(r2, r1 / 2.0, atol=1e-13)


def test_output_exactly_symmetric(mesh5):
    rng = np.random.default_rng(11)
    sigma = 0.5 + rng.random(mesh5.n_tris)
    nd = nd_matrix_continuum(mesh5, sigma, TrigBasis.equispaced(16))
    assert np.array_equal(nd.entries, nd.entries.T)


def _raw_unsymmetrized(mesh, sigma):
    basis = TrigBasis.equispaced(16)
    loads = _projected_flux_loads(mesh, basis)
    traces = NeumannSolver(mesh, sigma).solve_many(loads)[mesh.boundary_nodes, :]
    theta = mesh.boundary_angles()
    return (basis.eval(theta) @ traces) * (2 * np.pi / len(theta))


def test_reciprocity_before_symmetrization(mesh5, mesh6):
    # the raw pairing satisfies reciprocity up to the trace
    # discretization error, which shrinks under refinement; the exact
    # symmetry of the returned matrix is enforced separately
    def asym(mesh):
        cen = mesh.centroids()
        sigma = np.where(
            np.hypot(cen[:, 0] - 0.3, cen[:, 1] + 0.1) < 0.35, 2.0, 1.0
        )
        raw = _raw_unsymmetrized(mesh, sigma)
        return np.linalg.norm(raw - raw.T) / np.linalg.norm(raw)

    coarse, fine = asym(mesh5), asym(mesh6)
    assert fine <= 1e-5
    assert fine < coarse


def test_monotone_in_sigma(mesh5):
    basis = TrigBasis.equispaced(8)
    diags = [
        np.diag(nd_matrix_continuum(mesh5, s, basis).entries)
        for s in (0.5, 1.0, 2.0)
    ]
    assert np.all(diags[0] > diags[1])
    assert np.all(diags[1] > diags[2])


def test_arc_projection_matches_reference(mesh6):
    basis = TrigBasis.equispaced(16, arc_width=KIT4_ARC)
    nd = nd_matrix_continuum(mesh6, 1.0, basis)
    ref = homogeneous_nd(basis, "continuum")
    assert np.linalg.norm(nd.entries - ref) <= 0.03 * np.linalg.norm(ref)
    # the top sine order is invisible to equispaced arcs
    assert np.abs(nd.entries[0]).max() <= 1e-12


# ---------------------------------------------------------------------------
# discrete patterns and ND


@pytest.mark.parametrize("L", [8, 16, 32])
def test_patterns_orthonormal_and_mean_free(L):
    T = trig_current_patterns(L).current_matrix
    assert np.abs(T.T @ T - np.eye(L - 1)).max() <= 1e-12
    assert np.abs(T.sum(axis=0)).max() <= 1e-12


def test_patterns_middle_column_alternates():
    L = 16
    T = trig_current_patterns(L).current_matrix
    # electrode l = 1..L sits at angle 2*pi*l/L, so row 0 carries l = 1
    want = np.array([(-1) ** l for l in range(1, L + 1)]) / np.sqrt(L)
    assert np.allclose(T[:, L // 2 - 1], want, atol=1e-14)


def test_patterns_reject_bad_L():
    with pytest.raises(ValueError):
        trig_current_patterns(7)
    with pytest.raises(ValueError):
        trig_current_patterns(2)


def test_discrete_nd_identity_case():
    pat = trig_current_patterns(8, electrode_areas=0.37)
    v = pat.current_matrix * 0.37
    nd = nd_matrix_discrete(pat, v)
    assert np.allclose(nd.entries, np.eye(7), atol=1e-12)


def test_discrete_nd_hand_summation():
    # independent evaluation of the pairing as an explicit triple loop
    pat = trig_current_patterns(4, electrode_areas=[0.5, 1.0, 1.5, 2.0])
    rng = np.random.default_rng(0)
    v = rng.standard_normal((4, 3))
    nd = nd_matrix_discrete(pat, v)
    want = np.zeros((3, 3))
    for m in range(3):
        for n in range(3):
            acc = 0.0
            for l in range(4):
                acc += (
                    pat.current_matrix[l, m]
                    * v[l, n]
                    / pat.electrode_areas[l]
                )
            want[m, n] = acc
    want = 0.5 * (want + want.T)
    assert np.allclose(nd.entries, want, atol=1e-14)


def test_discrete_nd_shape_check():
    pat = trig_current_patterns(8)
    with pytest.raises(ValueError):
        nd_matrix_discrete(pat, np.zeros((8, 8)))


def test_simulated_discrete_matches_reference(mesh6):
    pat = trig_current_patterns(16, electrode_areas=KIT4_ARC, arc_width=KIT4_ARC)
    v = simulate_electrode_voltages(mesh6, 1.0, pat, KIT4_ARC)
    nd = nd_matrix_discrete(pat, v)
    ref = homogeneous_nd(pat, "discrete")
    assert np.linalg.norm(nd.entries - ref) <= 0.03 * np.linalg.norm(ref)


# ---------------------------------------------------------------------------
# voltage synthesis


def test_synthesize_identity():
    pat = trig_current_patterns(8)
    rng = np.random.default_rng(2)
    v = rng.standard_normal((8, 7))
    out = synthesize_trig_voltages(pat.current_matrix, v)
    assert np.allclose(out, v - v.mean(axis=0), atol=1e-12)


def test_synthesize_adjacent_pairs():
    # KIT4-style drive: current in at electrode j, out at j+1
    L = 16
    C = np.zeros((L, L - 1))
    for j in range(L - 1):
        C[j, j] = 1.0
        C[j + 1, j] = -1.0
    rng = np.random.default_rng(3)
    # synthetic linear device: V = G C for a random symmetric G
    G = rng.standard_normal((L, L))
    G = G + G.T
    V = G @ C
    pat = trig_current_patterns(L)
    W = synthesize_trig_voltages(C, V)
    want = G @ pat.current_matrix
    assert np.allclose(W, want - want.mean(axis=0), atol=1e-9)


def test_synthesize_scale_invariance():
    L = 8
    rng = np.random.default_rng(5)
    C = trig_current_patterns(L).current_matrix @ rng.standard_normal((7, 7))
    V = rng.standard_normal((L, 7))
    a = synthesize_trig_voltages(C, V)
    b = synthesize_trig_voltages(3.0 * C, 3.0 * V)
    assert np.allclose(a, b, atol=1e-10)


def test_synthesize_rejects_rank_deficient():
    L = 8
    C = np.zeros((L, L - 1))
    C[:, :] = 1.0
    with pytest.raises(np.linalg.LinAlgError):
        synthesize_trig_voltages(C, np.ones((L, L - 1)))


# ---------------------------------------------------------------------------
# DN, sigma0, noise


def _diag_nd(L=16, c=1.0):
    basis = TrigBasis.equispaced(L)
    entries = np.diag(1.0 / np.abs(basis.indices)) / c
    return NDMatrix(entries, basis, "continuum")


def test_dn_diagonal_oracle():
    dn = dn_from_nd(_diag_nd(), sigma0=1.0)
    n = np.abs(TrigBasis.equispaced(16).indices)
    assert np.allclose(dn.entries, np.diag(n), atol=1e-12)


def test_dn_nd_roundtrip(mesh6):
    nd = nd_matrix_continuum(mesh6, 1.0, TrigBasis.equispaced(16))
    nd.radius_r = 0.15
    dn = dn_from_nd(nd, sigma0=0.3)
    prod = dn.entries @ (nd.entries / nd.radius_r * dn.sigma0)
    assert np.abs(prod - np.eye(16)).max() <= 1e-8
    back = np.linalg.inv(dn.entries) * (nd.radius_r / dn.sigma0)
    assert np.allclose(back, nd.entries, rtol=1e-8)


def test_dn_scaling_factors():
    nd = _diag_nd()
    plain = dn_from_nd(nd, sigma0=1.0).entries
    nd.radius_r = 0.15
    scaled = dn_from_nd(nd, sigma0=0.3).entries
    assert np.allclose(scaled, plain * 0.5, atol=1e-12)


def test_dn_rejects_singular():
    nd = _diag_nd()
    nd.entries = nd.entries.copy()
    nd.entries[0, 0] = 0.0
    with pytest.raises(np.linalg.LinAlgError):
        dn_from_nd(nd, sigma0=1.0)


def test_sigma0_exact_model():
    assert estimate_sigma0(_diag_nd(c=0.73)) == pytest.approx(0.73, abs=1e-12)


def test_sigma0_from_simulation(mesh6):
    basis = TrigBasis.equispaced(16)
    nd = nd_matrix_continuum(mesh6, 0.3, basis)
    assert estimate_sigma0(nd) == pytest.approx(0.3, rel=0.03)


def test_sigma0_from_arc_simulation(mesh6):
    basis = TrigBasis.equispaced(16, arc_width=KIT4_ARC)
    nd = nd_matrix_continuum(mesh6, 0.3, basis)
    assert estimate_sigma0(nd) == pytest.approx(0.3, rel=0.03)
    pat = trig_current_patterns(16, electrode_areas=KIT4_ARC, arc_width=KIT4_ARC)
    v = simulate_electrode_voltages(mesh6, 0.3, pat, KIT4_ARC)
    assert estimate_sigma0(nd_matrix_discrete(pat, v)) == pytest.approx(0.3, rel=0.03)


def test_sigma0_symmetrization_invariant():
    nd = _diag_nd(c=0.5)
    noisy = add_measurement_noise(nd, 1e-4, seed=9)
    sym = NDMatrix(
        0.5 * (noisy.entries + noisy.entries.T), noisy.basis, noisy.kind
    )
    assert estimate_sigma0(noisy) == pytest.approx(estimate_sigma0(sym), abs=1e-14)


def test_noise_zero_and_determinism():
    rng = np.random.default_rng(8)
    dense = rng.standard_normal((16, 16))
    nd = NDMatrix(dense + dense.T, TrigBasis.equispaced(16), "continuum")
    same = add_measurement_noise(nd, 0.0, seed=1)
    assert np.array_equal(same.entries, nd.entries)
    a = add_measurement_noise(nd, 1e-4, seed=42)
    b = add_measurement_noise(nd, 1e-4, seed=42)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, nd.entries)
    # noise is not re-symmetrized
    assert not np.array_equal(a.entries, a.entries.T)


def test_noise_statistics():
    nd = _diag_nd(L=8)
    draws = np.stack(
        [
            add_measurement_noise(nd, 1e-4, seed=s).entries - nd.entries
            for s in range(10_000)
        ]
    )
    std = draws.std(axis=0)
    rel = std[np.abs(nd.entries) > 0] / np.abs(nd.entries[np.abs(nd.entries) > 0])
    assert np.abs(rel / 1e-2 - 1.0).max() <= 0.05


def test_voltage_noise_zero_and_determinism():
    rng = np.random.default_rng(3)
    v = rng.standard_normal((32, 15))
    assert np.array_equal(add_voltage_noise(v, 0.0, seed=1), v)
    a = add_voltage_noise(v, 1e-4, seed=7)
    b = add_voltage_noise(v, 1e-4, seed=7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, v)
    with pytest.raises(ValueError):
        add_voltage_noise(v, -1e-4, seed=0)


def test_voltage_noise_scales_with_column_rms():
    # column 0 has 10x the amplitude of column 1; noise must follow suit
    theta = np.linspace(0.0, 2.0 * np.pi, 400, endpoint=False)
    v = np.stack([10.0 * np.cos(theta), np.sin(theta)], axis=1)
    draws = np.stack(
        [add_voltage_noise(v, 1e-2, seed=s) - v for s in range(2000)]
    )
    std = draws.std(axis=(0, 1))
    rms = np.sqrt(np.mean(v**2, axis=0))
    assert np.abs(std / (1e-2 * rms) - 1.0).max() <= 0.05


# ---------------------------------------------------------------------------
# serialization


def test_nd_json_roundtrip(mesh5):
    nd = nd_matrix_continuum(mesh5, 1.3, TrigBasis.equispaced(8))
    nd.sigma0 = 1.3
    back = nd_from_json(nd_to_json(nd))
    assert np.allclose(back.entries, nd.entries, atol=0)
    assert back.kind == "continuum"
    assert back.L == 8
    dn = dn_from_nd(nd)
    dback = nd_from_json(nd_to_json(dn))
    assert np.allclose(dback.entries, dn.entries, atol=0)
    assert dback.scaled_to_unit


def test_pattern_json_roundtrip():
    pat = trig_current_patterns(8, electrode_areas=2.5, arc_width=0.3)
    nd = nd_matrix_discrete(pat, np.zeros((8, 7)))
    back = nd_from_json(nd_to_json(nd))
    assert isinstance(back.basis, DiscretePatternSet)
    assert np.allclose(back.basis.current_matrix, pat.current_matrix)


def test_voltage_pairing_composition(mesh5):
    """Splitting the solve from the pairing reproduces the one-shot path."""
    basis = TrigBasis.equispaced(8)
    volts = continuum_boundary_voltages(mesh5, 1.0, basis)
    assert volts.shape == (mesh5.boundary_nodes.size, 8)
    nd = nd_from_boundary_voltages(volts, mesh5, basis)
    whole = nd_matrix_continuum(mesh5, 1.0, basis)
    assert np.array_equal(nd.entries, whole.entries)
    with pytest.raises(ValueError):
        nd_from_boundary_voltages(volts[:-1], mesh5, basis)
    with pytest.raises(ValueError):
        nd_from_boundary_voltages(volts[:, :-1], mesh5, basis)
