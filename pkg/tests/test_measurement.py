import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grovermeasure.grover import optimal_iterations
from grovermeasure.measurement import (
    DensityMatrix,
    DetectorModel,
    ExperimentDescriptor,
    RegisterTooSmallError,
    SystemSpec,
    build_entangled_state,
    bundled_descriptor,
    coherence_norm,
    compare_models,
    project_reduce,
    pure_density_matrix,
    run_experiment,
    run_measurement_event,
    stern_gerlach_spec,
    success_by_iterations,
    total_variation,
)
from grovermeasure.statevector import random_source

R2 = 1 / math.sqrt(2)


@st.composite
def system_specs(draw, max_out=8):
    n_out = draw(st.integers(2, max_out))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    c = r.normal(size=n_out) + 1j * r.normal(size=n_out)
    c /= np.linalg.norm(c)
    return SystemSpec(c)


def test_system_spec_validation():
    with pytest.raises(ValueError):
        SystemSpec([1.0])
    with pytest.raises(ValueError):
        SystemSpec([math.sqrt(0.9), 0.0])
    with pytest.raises(ValueError):
        SystemSpec([R2, R2], outcome_labels=["a"])
    spec = SystemSpec([0.6, 0.8])
    assert spec.outcome_labels == ["a0", "a1"]
    np.testing.assert_allclose(spec.born_weights, [0.36, 0.64])


# density matrices

def test_pure_density_matrix_values():
    np.testing.assert_allclose(pure_density_matrix(stern_gerlach_spec()).entries, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)
    np.testing.assert_array_equal(pure_density_matrix(SystemSpec([1, 0])).entries, [[1, 0], [0, 0]])


def test_pure_density_matrix_index_convention():
    # rho = |Psi><Psi| puts c_i conj(c_j) at (i, j)
    rho = pure_density_matrix(SystemSpec([R2, 1j * R2])).entries
    assert abs(rho[0, 1] - (R2 * np.conj(1j * R2))) < 1e-15
    assert abs(rho[0, 1] + 0.5j) < 1e-15


@given(spec=system_specs())
def test_pure_density_matrix_properties(spec):
    rho = pure_density_matrix(spec).entries
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-15
    assert np.max(np.abs(rho @ rho - rho)) < 1e-12


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix([[0.5, 1], [0, 0.5]])
    with pytest.raises(ValueError):
        DensityMatrix([[0.5, 0], [0, 0.4]])
    with pytest.raises(ValueError):
        DensityMatrix([[1.5, 0], [0, -0.5]])


def test_project_reduce_values():
    out = project_reduce(DensityMatrix([[0.5, 0.5], [0.5, 0.5]])).entries
    np.testing.assert_array_equal(out, [[0.5, 0], [0, 0.5]])
    diag = DensityMatrix(np.diag([0.2, 0.3, 0.5]))
    np.testing.assert_array_equal(project_reduce(diag).entries, diag.entries)


@given(spec=system_specs())
def test_project_reduce_pipeline(spec):
    rho = pure_density_matrix(spec)
    red = project_reduce(rho)
    assert coherence_norm(red) <= 1e-12
    assert np.max(np.abs(red.diagonal() - spec.born_weights)) <= 1e-12
    assert abs(np.trace(red.entries) - np.trace(rho.entries)) <= 1e-12


@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 6))
def test_project_reduce_random_mixed(seed, dim):
    r = np.random.default_rng(seed)
    a = r.normal(size=(dim, dim)) + 1j * r.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    red = project_reduce(DensityMatrix(rho))
    np.testing.assert_allclose(red.diagonal(), np.diag(rho).real, atol=1e-15)
    assert abs(np.trace(red.entries) - 1) <= 1e-12


def test_coherence_norm():
    assert abs(coherence_norm(DensityMatrix([[0.5, 0.5], [0.5, 0.5]])) - 1.0) < 1e-15
    assert coherence_norm(DensityMatrix([[1, 0], [0, 0]])) == 0


# entangled state

def test_build_entangled_state():
    np.testing.assert_allclose(build_entangled_state(stern_gerlach_spec(), 1).amplitudes, [R2, R2])
    s = build_entangled_state(SystemSpec([1, 0]), 5)
    assert s.amplitudes[0] == 1 and np.count_nonzero(s.amplitudes) == 1
    with pytest.raises(RegisterTooSmallError):
        build_entangled_state(SystemSpec(np.ones(5) / math.sqrt(5)), 2)


@given(spec=system_specs(), extra=st.integers(0, 4))
def test_build_entangled_state_norm(spec, extra):
    n = max(1, math.ceil(math.log2(spec.n_out))) + extra
    s = build_entangled_state(spec, n)
    assert abs(np.linalg.norm(s.amplitudes) - 1) < 1e-12


# detector and events

def test_detector_validation():
    for bad in (0.0, 1.0, -0.1, 2):
        with pytest.raises(ValueError):
            DetectorModel(bad)


def test_stern_gerlach_event_conclusive():
    det = DetectorModel(0.01)
    for trial in range(50):
        ev = run_measurement_event(stern_gerlach_spec(), 8, det, random_source(5, trial))
        assert ev.conclusive
        assert ev.registered_index == ev.target_index
        other = 1 - ev.target_index
        assert ev.final_probabilities[other] <= 1 / 256 < 0.01


def test_deterministic_spec_event():
    for trial in range(20):
        ev = run_measurement_event(SystemSpec([1, 0]), 6, DetectorModel(), random_source(0, trial))
        assert ev.registered_index == 0


def test_strict_n2_event_inconclusive():
    ev = run_measurement_event(stern_gerlach_spec(), 1, DetectorModel(0.01), random_source(3))
    assert not ev.conclusive and ev.registered_index is None
    assert ev.detectable_set == {0, 1}
    np.testing.assert_allclose(ev.final_probabilities, [0.5, 0.5], atol=1e-12)


def test_event_errors():
    spec = SystemSpec(np.ones(3) / math.sqrt(3))
    with pytest.raises(RegisterTooSmallError):
        run_measurement_event(spec, 1, DetectorModel(), random_source(0))
    with pytest.raises(TypeError):
        run_measurement_event(stern_gerlach_spec(), 4, 0.01, random_source(0))


@pytest.mark.parametrize("eps", [0.005, 0.01, 0.05, 0.2])
def test_conclusiveness_condition(eps):
    spec = SystemSpec(np.ones(4) / 2)
    for n in range(4, 13):
        plan = optimal_iterations(1 << n, 1)
        p_star = plan.predicted_success[plan.k_star]
        leftover = (1 - p_star) / ((1 << n) - 1)
        if not leftover < eps <= p_star:
            continue
        for trial in range(8):
            ev = run_measurement_event(spec, n, DetectorModel(eps), random_source(11, n, trial))
            assert ev.conclusive and ev.registered_index == ev.target_index


def test_target_probability_lower_bound_over_sweep():
    # success at k* stays above 1 - 1/N and approaches 1 as the register grows
    spec = stern_gerlach_spec()
    best = []
    for n in range(4, 13):
        ev_probs = [run_measurement_event(spec, n, DetectorModel(), random_source(1, n, t)) for t in range(4)]
        p = min(ev.final_probabilities[ev.target_index] for ev in ev_probs)
        assert p >= 1 - 2.0 ** -n - 1e-9
        best.append(p)
    assert best[-1] > 0.9999


def test_target_probability_not_monotone_in_register_size():
    # success at k* oscillates with N; n=5 -> n=6 is a concrete decrease
    spec = stern_gerlach_spec()
    p5 = run_measurement_event(spec, 5, DetectorModel(), random_source(0)).final_probabilities.max()
    p6 = run_measurement_event(spec, 6, DetectorModel(), random_source(0)).final_probabilities.max()
    assert p6 < p5 - 1e-4


# experiments

def test_run_experiment_stern_gerlach():
    stats = run_experiment(stern_gerlach_spec(), 8, DetectorModel(0.01), 10_000, seed=42)
    assert stats.inconclusive_count == 0
    assert sum(stats.counts) + stats.inconclusive_count == stats.trials
    for f in stats.empirical_frequencies:
        assert 0.485 <= f <= 0.515


def test_run_experiment_unequal_weights():
    trials = 10_000
    stats = run_experiment(SystemSpec([0.6, 0.8]), 8, DetectorModel(), trials, seed=7)
    sigma = math.sqrt(0.36 * 0.64 / trials)
    assert abs(stats.empirical_frequencies[0] - 0.36) <= 3 * sigma
    assert abs(stats.empirical_frequencies[1] - 0.64) <= 3 * sigma


def test_run_experiment_deterministic_and_parallel_invariant():
    spec = SystemSpec([0.6, 0.8])
    a = run_experiment(spec, 6, DetectorModel(), 500, seed=3, keep_events=True)
    b = run_experiment(spec, 6, DetectorModel(), 500, seed=3, keep_events=True)
    c = run_experiment(spec, 6, DetectorModel(), 500, seed=3, parallel=3, keep_events=True)
    assert a == b == c
    assert [e[0] for e in a.events] == list(range(500))


def test_run_experiment_rejects_zero_trials():
    with pytest.raises(ValueError):
        run_experiment(stern_gerlach_spec(), 8, DetectorModel(), 0)


@pytest.mark.parametrize("weights", [[0.5, 0.5], [0.05, 0.95], [0.2, 0.3, 0.5], [0.1, 0.2, 0.3, 0.4]])
def test_frequency_convergence(weights):
    trials = 10_000
    spec = SystemSpec(np.sqrt(weights))
    stats = run_experiment(spec, 8, DetectorModel(1 / 32), trials, seed=99)
    assert stats.inconclusive_count == 0
    for f, w in zip(stats.empirical_frequencies, weights):
        assert abs(f - w) <= 4 * math.sqrt(w * (1 - w) / trials)


def test_compare_models_stern_gerlach():
    cmp = compare_models(stern_gerlach_spec(), 8, DetectorModel(0.01), 10_000, seed=42)
    assert cmp.tv_distance <= 0.03
    np.testing.assert_allclose(cmp.decoherence_distribution, [0.5, 0.5], atol=1e-12)
    assert cmp.to_dict()["decoherence"]["kind"] == "distribution-only"


def test_compare_models_deterministic_spec():
    cmp = compare_models(SystemSpec([1, 0]), 4, DetectorModel(), 300, seed=1)
    assert cmp.projection_counts == [300, 0]
    assert cmp.grover.counts == [300, 0]
    assert cmp.decoherence_distribution == [1.0, 0.0]
    assert cmp.tv_distance == 0


@given(spec=system_specs(max_out=4))
def test_decoherence_arm_is_reduced_diagonal(spec):
    cmp = compare_models(spec, 3, DetectorModel(), 20, seed=0)
    expected = project_reduce(pure_density_matrix(spec)).diagonal()
    np.testing.assert_array_equal(cmp.decoherence_distribution, expected)


def test_total_variation():
    assert total_variation([0.5, 0.5], [0.5, 0.5]) == 0
    assert total_variation([1, 0], [0, 1]) == 1


def test_success_by_iterations_n2_stationary():
    for p in success_by_iterations(1, 8):
        assert abs(p - 0.5) <= 1e-12


# descriptors

def test_bundled_descriptor_loads():
    desc = ExperimentDescriptor.load(bundled_descriptor("stern_gerlach.json"))
    assert desc.register_qubits == 8 and desc.epsilon == 0.01 and desc.seed == 42
    assert desc.spec.pointer_labels == ["(x1,y1)", "(x2,y2)"]
    with pytest.raises(FileNotFoundError):
        bundled_descriptor("nope.json")


@pytest.mark.parametrize("doc", [
    {"coefficients": [[0.9, 0], [0, 0]]},
    {"coefficients": [[1, 0]]},
    {"coefficients": [[1, 0], [0, 0]], "epsilon": 1.5},
    {"coefficients": [[1, 0], [0, 0]], "bogus": 1},
    {"coefficients": [[1, 0, 0], [0, 0, 0]]},
    {"coefficients": [[1, 0], [0, 0]], "labels": ["a"]},
])
def test_descriptor_rejects_invalid(doc):
    with pytest.raises(ValueError):
        ExperimentDescriptor.from_dict(doc)


def test_descriptor_strict_mode():
    desc = ExperimentDescriptor.from_dict({"coefficients": [[R2, 0], [R2, 0]], "strict_paper_n2": True})
    assert desc.effective_register_qubits == 1
