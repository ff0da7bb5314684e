"""Dense statevector verification tools.

Desk-scale companions to the stabilizer machinery: exact simulation of an
ansatz at arbitrary parameters, finite-difference derivative oracles,
exact diagonalization of small observables, and the BFGS warm-start
experiment (zero vs theta* vs theta* + initial Hessian).

Rotation convention matches the expansion: R(theta) = exp(i theta P)
= cos(theta) I + i sin(theta) P.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.optimize
import scipy.sparse
import scipy.sparse.linalg

from .circuit import AnsatzCircuit, RotationGate
from .errors import ResourceCapError
from .expansion import ExpansionResult
from .observable import Observable
from .pauli import PHASES, PauliString
from .tableau import CLIFFORD_1Q_WORDS, CliffordGate

DEFAULT_QUBIT_CAP = 20

_SQRT2 = np.sqrt(2.0)
_MAT_1Q = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_MAT_2Q = {
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def clifford_1q_matrix(index: int) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for ch in CLIFFORD_1Q_WORDS[index]:
        u = _MAT_1Q[ch] @ u
    return u


def gate_matrix(gate: CliffordGate) -> np.ndarray:
    if gate.kind == "C1":
        return clifford_1q_matrix(gate.index)
    if gate.kind in _MAT_1Q:
        return _MAT_1Q[gate.kind]
    return _MAT_2Q[gate.kind]


def _check_cap(n_qubits: int, cap: int) -> None:
    if n_qubits > cap:
        raise ResourceCapError(
            f"dense simulation of {n_qubits} qubits exceeds the cap of {cap}"
        )


def _apply_matrix(states: np.ndarray, u: np.ndarray, wires: Tuple[int, ...], n: int) -> np.ndarray:
    """Apply a 1- or 2-qubit unitary to a batch of states, shape (B, 2^n).

    Qubit 0 is the most significant bit of the basis index (leftmost wire).
    """
    B = states.shape[0]
    psi = states.reshape((B,) + (2,) * n)
    axes = [1 + w for w in wires]
    k = len(wires)
    uk = u.reshape((2,) * (2 * k))
    # contract u's input legs with the wire axes; the k output legs land in
    # front, the remaining axes keep their relative order, so moving the
    # output legs back to the wire positions restores the layout
    psi = np.tensordot(uk, psi, axes=(list(range(k, 2 * k)), axes))
    psi = np.moveaxis(psi, list(range(k)), axes)
    return psi.reshape(B, -1)


class DenseState:
    """Batch of dense statevectors with gate application helpers."""

    def __init__(self, n_qubits: int, amplitudes: np.ndarray, cap: int = DEFAULT_QUBIT_CAP):
        _check_cap(n_qubits, cap)
        self.n = n_qubits
        self.amps = np.asarray(amplitudes, dtype=complex)
        if self.amps.ndim == 1:
            self.amps = self.amps[None, :]
        if self.amps.shape[1] != 2**n_qubits:
            raise ValueError("amplitude length does not match n_qubits")

    @classmethod
    def from_bitstring(cls, bitstring: str, batch: int = 1, cap: int = DEFAULT_QUBIT_CAP):
        n = len(bitstring)
        _check_cap(n, cap)
        idx = int(bitstring, 2)  # qubit 0 = leftmost = most significant
        amps = np.zeros((batch, 2**n), dtype=complex)
        amps[:, idx] = 1.0
        return cls(n, amps, cap)

    def vector(self) -> np.ndarray:
        return self.amps[0]

    def norms(self) -> np.ndarray:
        return np.sqrt((np.abs(self.amps) ** 2).sum(axis=1))


def _pauli_action(n: int, p: PauliString) -> Tuple[np.ndarray, np.ndarray]:
    """Permutation and per-source phases such that P|b> = phase[b] |perm[b]>."""
    dim = 2**n
    idx = np.arange(dim)
    xmask = 0
    zmask = 0
    for q in range(n):
        bitpos = n - 1 - q  # qubit 0 is the most significant bit
        if p.x_bit(q):
            xmask |= 1 << bitpos
        if p.z_bit(q):
            zmask |= 1 << bitpos
    perm = idx ^ xmask
    # Z acts before X in the letter convention? For each qubit the letter
    # acts as a whole: letter|b> contributions: X flips, Z sign (-1)^b,
    # Y|b> = i(-1)^b |1-b>. Using i^{nY} * X-flip * Z-sign-on-input works:
    # Y = i X Z, and Z acts on the input bit.
    zsign = 1 - 2 * (np.bitwise_count(idx & zmask) % 2).astype(np.int64)
    phase = PHASES[(p.phase + p.n_y()) % 4] * zsign
    return perm, phase.astype(complex)


def apply_pauli(states: np.ndarray, p: PauliString, n: int) -> np.ndarray:
    perm, phase = _pauli_action(n, p)
    out = np.empty_like(states)
    out[:, perm] = states * phase
    return out


def simulate(
    ansatz: AnsatzCircuit,
    theta: np.ndarray,
    reference: str,
    cap: int = DEFAULT_QUBIT_CAP,
) -> np.ndarray:
    """Exact U(theta)|reference> as a 2^n amplitude vector."""
    return simulate_batch(ansatz, np.asarray(theta, dtype=float)[None, :], reference, cap)[0]


def simulate_batch(
    ansatz: AnsatzCircuit,
    thetas: np.ndarray,
    reference: str,
    cap: int = DEFAULT_QUBIT_CAP,
) -> np.ndarray:
    """Simulate many parameter vectors at once; returns (B, 2^n) amplitudes."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[1] != ansatz.n_params:
        raise ValueError(
            f"theta has {thetas.shape[1]} entries, ansatz has {ansatz.n_params} parameters"
        )
    n = ansatz.n_qubits
    state = DenseState.from_bitstring(reference, batch=thetas.shape[0], cap=cap)
    amps = state.amps
    for e in ansatz.elements:
        if isinstance(e, RotationGate):
            p = PauliString.single(n, e.axis, e.wire)
            t = thetas[:, e.param]
            amps = np.cos(t)[:, None] * amps + (1j * np.sin(t))[:, None] * apply_pauli(
                amps, p, n
            )
        else:
            amps = _apply_matrix(amps, gate_matrix(e), e.wires, n)
    return amps


def energy(
    ansatz: AnsatzCircuit,
    theta: np.ndarray,
    reference: str,
    observable: Observable,
    cap: int = DEFAULT_QUBIT_CAP,
) -> float:
    return float(
        energies_batch(ansatz, np.asarray(theta, dtype=float)[None, :], reference, observable, cap)[0]
    )


def energies_batch(
    ansatz: AnsatzCircuit,
    thetas: np.ndarray,
    reference: str,
    observable: Observable,
    cap: int = DEFAULT_QUBIT_CAP,
) -> np.ndarray:
    amps = simulate_batch(ansatz, thetas, reference, cap)
    n = ansatz.n_qubits
    vals = np.zeros(amps.shape[0])
    for c, p in observable.terms:
        vals += c * np.einsum("bi,bi->b", amps.conj(), apply_pauli(amps, p, n)).real
    return vals


def observable_expectation(state: np.ndarray, observable: Observable) -> complex:
    n = observable.n_qubits
    amps = state[None, :]
    total = 0j
    for c, p in observable.terms:
        total += c * np.einsum("bi,bi->b", amps.conj(), apply_pauli(amps, p, n))[0]
    return total


# ---------------------------------------------------------------------------
# Finite-difference oracles
# ---------------------------------------------------------------------------


def finite_diff_gradient(
    ansatz: AnsatzCircuit,
    observable: Observable,
    reference: str,
    h: float = 1e-4,
    theta0: Optional[np.ndarray] = None,
    cap: int = DEFAULT_QUBIT_CAP,
) -> np.ndarray:
    """Central differences (E(+h) - E(-h)) / 2h, all entries in one batch."""
    K = ansatz.n_params
    if K == 0:
        return np.zeros(0)
    base = np.zeros(K) if theta0 is None else np.asarray(theta0, dtype=float)
    eye = np.eye(K)
    points = np.vstack([base + h * eye, base - h * eye])
    vals = energies_batch(ansatz, points, reference, observable, cap)
    return (vals[:K] - vals[K:]) / (2 * h)


def finite_diff_hessian(
    ansatz: AnsatzCircuit,
    observable: Observable,
    reference: str,
    h: float = 1e-3,
    theta0: Optional[np.ndarray] = None,
    cap: int = DEFAULT_QUBIT_CAP,
) -> np.ndarray:
    """Second-order central differences, evaluated as one batched sweep."""
    K = ansatz.n_params
    if K == 0:
        return np.zeros((0, 0))
    base = np.zeros(K) if theta0 is None else np.asarray(theta0, dtype=float)
    eye = np.eye(K)
    points = [base]
    for k in range(K):
        points.append(base + h * eye[k])
        points.append(base - h * eye[k])
    off = []
    for k in range(K):
        for m in range(k + 1, K):
            off.append((k, m))
            points.append(base + h * eye[k] + h * eye[m])
            points.append(base + h * eye[k] - h * eye[m])
            points.append(base - h * eye[k] + h * eye[m])
            points.append(base - h * eye[k] - h * eye[m])
    vals = energies_batch(ansatz, np.vstack(points), reference, observable, cap)
    e0 = vals[0]
    A = np.zeros((K, K))
    for k in range(K):
        A[k, k] = (vals[1 + 2 * k] - 2 * e0 + vals[2 + 2 * k]) / h**2
    base_off = 1 + 2 * K
    for i, (k, m) in enumerate(off):
        vpp, vpm, vmp, vmm = vals[base_off + 4 * i : base_off + 4 * i + 4]
        A[k, m] = A[m, k] = (vpp - vpm - vmp + vmm) / (4 * h**2)
    return A


# ---------------------------------------------------------------------------
# Exact diagonalization
# ---------------------------------------------------------------------------


def _pauli_sparse(n: int, p: PauliString) -> scipy.sparse.csr_matrix:
    perm, phase = _pauli_action(n, p)
    dim = 2**n
    return scipy.sparse.csr_matrix((phase, (perm, np.arange(dim))), shape=(dim, dim))


def exact_ground_energy(observable: Observable, cap: int = 14) -> float:
    """Minimum eigenvalue of the observable matrix (n <= cap)."""
    n = observable.n_qubits
    if n > cap:
        raise ResourceCapError(f"exact diagonalization refused for n={n} > {cap}")
    H = None
    for c, p in observable.terms:
        m = c * _pauli_sparse(n, p)
        H = m if H is None else H + m
    if H is None:
        return 0.0
    if n <= 6:
        return float(np.linalg.eigvalsh(H.toarray()).min())
    vals = scipy.sparse.linalg.eigsh(H, k=1, which="SA", return_eigenvectors=False)
    return float(vals[0])


# ---------------------------------------------------------------------------
# BFGS warm start
# ---------------------------------------------------------------------------


@dataclass
class OptimizationTrace:
    """Per-iteration record of a quasi-Newton run."""

    init: str                      # "zero" | "theta_star" | "theta_star_with_hessian"
    iterations: List[dict] = field(default_factory=list)
    final_cost: float = float("nan")
    n_iterations: int = 0
    converged: bool = False
    message: str = ""
    gtol: float = 1e-6

    def to_dict(self) -> dict:
        return {
            "init": self.init,
            "gtol": self.gtol,
            "iterations": list(self.iterations),
            "final_cost": self.final_cost,
            "n_iterations": self.n_iterations,
            "converged": self.converged,
            "message": self.message,
        }


def warm_start_hess_inv(hessian: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    """Initial inverse-Hessian estimate from the Clifford-point Hessian.

    The quadratic model's curvature can be indefinite; eigenvalues <= eps
    are replaced by identity-scale curvature (1.0) before inversion so the
    estimate stays positive definite, as BFGS requires.
    """
    evals, evecs = np.linalg.eigh(hessian)
    safe = np.where(evals > eps, evals, 1.0)
    inv = (evecs / safe) @ evecs.T
    # exact symmetry so downstream Cholesky-based checks accept it
    return (inv + inv.T) / 2.0


def optimize_bfgs(
    ansatz: AnsatzCircuit,
    observable: Observable,
    reference: str,
    init: str = "zero",
    expansion: Optional[ExpansionResult] = None,
    gtol: float = 1e-6,
    max_iterations: int = 500,
    fd_step: float = 1e-6,
    cap: int = DEFAULT_QUBIT_CAP,
) -> OptimizationTrace:
    """Run BFGS on the dense energy with the chosen initialization.

    init "zero" starts at theta = 0; "theta_star" at the quadratic model's
    stationary point; "theta_star_with_hessian" additionally seeds the
    optimizer's inverse-Hessian estimate from the model Hessian. Gradients
    are central finite differences on the dense simulator (step fd_step).
    """
    K = ansatz.n_params
    if init not in ("zero", "theta_star", "theta_star_with_hessian"):
        raise ValueError(f"unknown init mode {init!r}")
    if init != "zero" and expansion is None:
        raise ValueError(f"init={init!r} requires an expansion result")

    x0 = np.zeros(K) if init == "zero" else expansion.theta_star.copy()
    options = {"gtol": gtol, "maxiter": max_iterations}
    if init == "theta_star_with_hessian":
        options["hess_inv0"] = warm_start_hess_inv(expansion.hessian_full())

    def cost(theta: np.ndarray) -> float:
        return energy(ansatz, theta, reference, observable, cap)

    def grad(theta: np.ndarray) -> np.ndarray:
        return finite_diff_gradient(
            ansatz, observable, reference, h=fd_step, theta0=theta, cap=cap
        )

    trace = OptimizationTrace(init=init, gtol=gtol)

    def record(theta: np.ndarray) -> None:
        trace.iterations.append(
            {
                "iteration": len(trace.iterations),
                "cost": cost(theta),
                "grad_norm": float(np.linalg.norm(grad(theta), np.inf)),
            }
        )

    record(x0)
    res = scipy.optimize.minimize(
        cost, x0, jac=grad, method="BFGS", options=options, callback=record
    )
    trace.final_cost = float(res.fun)
    trace.n_iterations = int(res.nit)
    trace.converged = bool(res.success)
    trace.message = str(res.message)
    return trace
