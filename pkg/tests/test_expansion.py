import numpy as np
import pytest

from cliffgrad.circuit import AnsatzCircuit, RotationGate, generate_hwe_ansatz
from cliffgrad.dense import energy, finite_diff_gradient, finite_diff_hessian
from cliffgrad.errors import SolveError
from cliffgrad.expansion import (
    apply_dropout,
    compute_gradient,
    compute_hessian,
    conjugate_generators,
    expand,
    solve_quadratic,
)
from cliffgrad.observable import Observable, parse_observable
from cliffgrad.pauli import parse_pauli
from cliffgrad.tableau import CliffordGate

from conftest import dense_unitary, random_instance


def ry_circuit():
    return AnsatzCircuit(1, [RotationGate("Y", 0, 0)])


def test_generator_with_empty_suffix():
    gens = conjugate_generators(ry_circuit())
    assert gens.paulis == [parse_pauli("Y0", 1)]


def test_generator_conjugated_through_trailing_h():
    circ = AnsatzCircuit(1, [RotationGate("Y", 0, 0), CliffordGate("H", (0,))])
    gens = conjugate_generators(circ)
    assert gens.paulis == [parse_pauli("Y0", 1).with_phase(2)]  # HYH = -Y


def test_generators_match_dense_suffix_conjugation(rng):
    circ = generate_hwe_ansatz(3, 1, 5, "complex")
    gens = conjugate_generators(circ)
    for k, pk in enumerate(gens.paulis):
        pos = gens.positions[k]
        rot = circ.elements[pos]
        suffix = [e for e in circ.elements[pos + 1 :] if isinstance(e, CliffordGate)]
        U = dense_unitary(suffix, 3)
        base = parse_pauli(f"{rot.axis}{rot.wire}", 3)
        assert np.allclose(pk.to_matrix(), U @ base.to_matrix() @ U.conj().T, atol=1e-9)


def test_gradient_analytic_examples():
    obs_z = parse_observable("qubits 1\n1.0 Z0\n")
    obs_x = parse_observable("qubits 1\n1.0 X0\n")
    circ = ry_circuit()
    state0 = circ.clifford_point_state("0")
    gens = conjugate_generators(circ)
    assert compute_gradient(obs_z, state0, gens) == pytest.approx([0.0])
    assert compute_gradient(obs_x, state0, gens) == pytest.approx([-2.0])


def test_gradient_zero_for_commuting_diagonal_observable():
    # all-Z observable, Z rotations only: every term commutes with every
    # conjugated generator and is stabilizer-diagonal
    circ = AnsatzCircuit(2, [RotationGate("Z", 0, 0), RotationGate("Z", 1, 1)])
    obs = parse_observable("qubits 2\n0.5 Z0\n0.25 Z0 Z1\n")
    g = compute_gradient(obs, circ.clifford_point_state("00"), conjugate_generators(circ))
    assert np.array_equal(g, [0.0, 0.0])


def test_hessian_analytic_examples():
    circ = ry_circuit()
    state0 = circ.clifford_point_state("0")
    gens = conjugate_generators(circ)
    obs_z = parse_observable("qubits 1\n1.0 Z0\n")
    obs_x = parse_observable("qubits 1\n1.0 X0\n")
    a_z = compute_hessian(obs_z, state0, gens)
    a_x = compute_hessian(obs_x, state0, gens)
    assert a_z[0, 0] == pytest.approx(-4.0)
    assert a_x[0, 0] == pytest.approx(0.0)


def test_full_hessian_matches_finite_differences(rng):
    circ = generate_hwe_ansatz(4, 1, 13, "real")
    obs = Observable.from_strings(
        4, {f"Z{q} Z{q+1}": -1.0 for q in range(3)} | {f"X{q}": -0.6 for q in range(4)}
    )
    res = expand(circ, obs, "0101", threshold=0.0)
    fd = finite_diff_hessian(circ, obs, "0101")
    assert np.abs(res.hessian_kept - fd).max() < 1e-5
    assert np.array_equal(res.hessian_kept, res.hessian_kept.T)


def test_apply_dropout():
    g = np.array([0.0, 3e-7, 0.2])
    assert apply_dropout(g, 0.0).tolist() == [True, True, True]
    assert apply_dropout(g, 1e-6).tolist() == [False, False, True]
    with pytest.raises(ValueError):
        apply_dropout(g, -1.0)


def test_dropout_matches_independent_zero_gradient_count(rng):
    circ = generate_hwe_ansatz(6, 1, 17, "real")
    obs = Observable.from_strings(
        6, {f"Z{q} Z{q+1}": -1.0 for q in range(5)} | {f"X{q}": -0.4 for q in range(6)}
    )
    res = expand(circ, obs, "010101", threshold=1e-6)
    fd = finite_diff_gradient(circ, obs, "010101")
    dropped_fd = int((np.abs(fd) < 1e-6).sum())
    assert int((~res.dropout_mask).sum()) == dropped_fd


def test_solve_quadratic_zero_gradient():
    theta, opt, rank = solve_quadratic(
        1.5, np.zeros(3), np.diag([1.0, 2.0, 3.0]), np.ones(3, dtype=bool)
    )
    assert np.array_equal(theta, np.zeros(3)) and opt == 1.5 and rank == 3


def test_solve_quadratic_toy_numbers():
    theta, opt, rank = solve_quadratic(
        2.0, np.array([-2.0]), np.array([[-8.0]]), np.ones(1, dtype=bool)
    )
    assert theta == pytest.approx([-0.25]) and opt == pytest.approx(2.25) and rank == 1


def test_solve_quadratic_singular_null_space():
    A = np.array([[2.0, 0.0], [0.0, 0.0]])
    g = np.array([1.0, 0.0])
    theta, opt, rank = solve_quadratic(0.0, g, A, np.ones(2, dtype=bool))
    assert theta[1] == 0.0 and np.isfinite(opt) and rank == 1


def test_solve_quadratic_stable_subspace_ignores_negative_curvature():
    A = np.diag([4.0, -4.0])
    g = np.array([2.0, 2.0])
    theta, _, rank = solve_quadratic(0.0, g, A, np.ones(2, dtype=bool), stable_subspace=True)
    assert rank == 1 and theta[1] == 0.0 and theta[0] == pytest.approx(-0.5)


def test_solve_quadratic_rejects_non_finite():
    with pytest.raises(SolveError):
        solve_quadratic(0.0, np.array([np.nan]), np.array([[1.0]]), np.ones(1, dtype=bool))


def test_expand_stationary_reference():
    # observable whose ground state is the reference: gradient vanishes
    circ = AnsatzCircuit(2, [RotationGate("Z", 0, 0), RotationGate("Z", 1, 1)])
    obs = parse_observable("qubits 2\n-1.0 Z0\n-1.0 Z1\n")
    res = expand(circ, obs, "00", threshold=0.0)
    assert np.array_equal(res.gradient, [0.0, 0.0])
    assert np.array_equal(res.theta_star, [0.0, 0.0])
    assert res.perturbative_optimum == res.e0 == -2.0


def test_expand_all_dropped_degenerate():
    circ = ry_circuit()
    obs = parse_observable("qubits 1\n1.0 Z0\n")
    res = expand(circ, obs, "0", threshold=1e9)
    assert not res.dropout_mask.any()
    assert res.warnings and res.perturbative_optimum == res.e0
    assert np.array_equal(res.theta_star, [0.0])


def test_expand_parallel_is_bit_identical(rng):
    circ = generate_hwe_ansatz(4, 2, 21, "complex")
    obs = Observable.from_strings(
        4, {f"Z{q} Z{q+1}": -1.0 for q in range(3)} | {f"X{q}": -0.6 for q in range(4)}
    )
    a = expand(circ, obs, "0011", threshold=0.0, jobs=1)
    b = expand(circ, obs, "0011", threshold=0.0, jobs=4)
    assert np.array_equal(a.gradient, b.gradient)
    assert np.array_equal(a.hessian_kept, b.hessian_kept)
    assert np.array_equal(a.theta_star, b.theta_star)


def test_dropout_consistency_with_full_hessian_submatrix(rng):
    circ = generate_hwe_ansatz(4, 1, 23, "real")
    obs = Observable.from_strings(
        4, {f"X{q} X{q+1}": 0.3 for q in range(3)} | {f"Z{q}": -1.0 for q in range(4)}
    )
    full = expand(circ, obs, "0101", threshold=0.0)
    thresholded = expand(circ, obs, "0101", threshold=1e-6)
    kept = thresholded.kept_indices()
    sub = full.hessian_kept[np.ix_(kept, kept)]
    assert np.array_equal(thresholded.hessian_kept, sub)
    theta, opt, rank = solve_quadratic(
        full.e0, full.gradient, sub, thresholded.dropout_mask
    )
    assert np.array_equal(theta, thresholded.theta_star)
    assert opt == thresholded.perturbative_optimum


def test_expand_counters_and_result_document(rng):
    circ = generate_hwe_ansatz(4, 1, 29, "complex")
    obs = Observable.from_strings(4, {"Z0 Z1": -1.0, "X2": 0.5})
    res = expand(circ, obs, "0000", threshold=1e-6)
    c = res.counters
    assert c["K"] == circ.n_params and c["N_o"] == 2 and c["n_qubits"] == 4
    assert c["pauli_expectations_evaluated"] > 0
    doc = res.to_dict()
    from cliffgrad.expansion import ExpansionResult

    back = ExpansionResult.from_dict(doc, n_qubits=4)
    assert np.array_equal(back.theta_star, res.theta_star)
    assert np.array_equal(back.hessian_full(), res.hessian_full())


def test_quadratic_model_residual_shrinks_cubically(rng):
    for _ in range(4):
        ansatz, obs, ref = random_instance(rng, max_qubits=4, max_depth=2)
        res = expand(ansatz, obs, ref, threshold=0.0)
        norm = np.linalg.norm(res.theta_star)
        if norm < 1e-8:
            continue
        def model(theta):
            d = theta[res.dropout_mask]
            g = res.gradient[res.dropout_mask]
            return res.e0 + g @ d + 0.5 * d @ res.hessian_kept @ d
        r_prev = None
        for t in (0.2, 0.1, 0.05):
            theta = t * res.theta_star / max(norm, 1.0)
            r = abs(energy(ansatz, theta, ref, obs) - model(theta))
            if r_prev is not None and r > 1e-12:
                assert r_prev / r > 3.0  # at least superquadratic shrinkage
            r_prev = r
