"""Quadratic model of the cost surface at the Clifford point.

Computes the exact gradient g and Hessian A of <O(theta)> at theta = 0 for
an ansatz of Clifford gates and single-qubit Pauli rotations, using
Heisenberg conjugation of the rotation generators and stabilizer-state
expectations. The quadratic model is then minimized at its stationary
point theta* = -pinv(A) g, giving the second-order estimate <O>* of the
optimum.

Derivative identities (R_k(t) = exp(i t P_k), P'_k the generator conjugated
through everything applied after it):

    g_k  = -2 Im <psi| O P'_k |psi>
    A_km =  2 Re <psi| P'_k O P'_m |psi> - 2 Re <psi| O P'_m P'_k |psi>
            (k earlier in the circuit than m)
    A_kk =  2 <psi| P'_k O P'_k |psi> - 2 <O(0)>

All expectations are exact stabilizer evaluations; phases are integer
exponents of i, so the assembled values are exactly real.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .circuit import AnsatzCircuit, RotationGate
from .errors import SolveError
from .observable import Observable
from .pauli import PauliString, pauli_mul
from .tableau import CliffordGate, CliffordImageMap, StabilizerTableau


@dataclass
class ConjugatedGenerators:
    """P'_k for each parameter, plus each rotation's position in the circuit."""

    paulis: List[PauliString]       # indexed by param id
    positions: List[int]            # element index of the rotation, by param id

    @property
    def n_params(self) -> int:
        return len(self.paulis)


def conjugate_generators(ansatz: AnsatzCircuit) -> ConjugatedGenerators:
    """Single right-to-left sweep carrying the suffix conjugation map.

    For each rotation at position p with generator P, records the image of
    P under conjugation by the Clifford content after position p (rotations
    at zero are identity). Every P'_k comes out Hermitian.
    """
    n = ansatz.n_qubits
    suffix = CliffordImageMap(n)
    by_param: dict = {}
    for pos in range(len(ansatz.elements) - 1, -1, -1):
        e = ansatz.elements[pos]
        if isinstance(e, RotationGate):
            by_param[e.param] = (suffix.image_of_letter(e.axis, e.wire), pos)
        else:
            suffix.prepend(e)
    paulis = []
    positions = []
    for k in range(len(by_param)):
        p, pos = by_param[k]
        assert p.is_hermitian
        paulis.append(p)
        positions.append(pos)
    return ConjugatedGenerators(paulis, positions)


class _ExpectationCache:
    """Memoized stabilizer expectations keyed by the unphased bit content.

    Concurrent insert-or-read is safe: values are idempotent and dict
    access is atomic under the GIL.
    """

    def __init__(self, state: StabilizerTableau):
        self.state = state
        self.cache: dict = {}
        self.misses = 0
        self.hits = 0

    def expectation(self, q: PauliString) -> complex:
        key = q.key()
        e = self.cache.get(key)
        if e is None:
            e = self.state.expectation(q.unphased())
            self.cache[key] = e
            self.misses += 1
        else:
            self.hits += 1
        return q.phase_value() * e


def compute_gradient(
    obs: Observable,
    state0: StabilizerTableau,
    gens: ConjugatedGenerators,
    cache: Optional[_ExpectationCache] = None,
) -> np.ndarray:
    """g_k = -2 Im <psi(0)| O P'_k |psi(0)>, term by term."""
    if cache is None:
        cache = _ExpectationCache(state0)
    g = np.empty(gens.n_params)
    for k, pk in enumerate(gens.paulis):
        g[k] = -2.0 * math.fsum(
            c * cache.expectation(pauli_mul(p, pk)).imag for c, p in obs.terms
        )
    return g


def apply_dropout(gradient: np.ndarray, threshold: float) -> np.ndarray:
    """Keep mask: |g_k| >= threshold (threshold 0 keeps everything)."""
    if threshold < 0:
        raise ValueError("dropout threshold must be >= 0")
    return np.abs(gradient) >= threshold


def compute_hessian(
    obs: Observable,
    state0: StabilizerTableau,
    gens: ConjugatedGenerators,
    mask: Optional[np.ndarray] = None,
    e0: Optional[float] = None,
    jobs: Optional[int] = None,
    cache: Optional[_ExpectationCache] = None,
) -> np.ndarray:
    """Hessian restricted to kept parameters, returned as a dense symmetric
    matrix over the kept index order.

    Each unordered pair is evaluated once and mirrored; pairs may be
    evaluated by a parallel worker pool, with results written to
    preallocated slots so the output is independent of scheduling.
    """
    if cache is None:
        cache = _ExpectationCache(state0)
    if e0 is None:
        e0 = obs.expectation_at_clifford_point(state0)
    K = gens.n_params
    if mask is None:
        mask = np.ones(K, dtype=bool)
    kept = np.nonzero(mask)[0]
    nk = kept.size
    A = np.zeros((nk, nk))
    if nk == 0:
        return A

    # Right products P_i * P'_k, shared by both Hessian terms.
    right = {
        int(k): [pauli_mul(p, gens.paulis[k]) for _, p in obs.terms] for k in kept
    }
    coeffs = [c for c, _ in obs.terms]
    positions = gens.positions

    def entry(a: int, b: int) -> float:
        """A entry for kept-index slots a <= b."""
        ka, kb = int(kept[a]), int(kept[b])
        if a == b:
            pk = gens.paulis[ka]
            rk = right[ka]
            diag = math.fsum(
                c * cache.expectation(pauli_mul(pk, r)).real
                for c, r in zip(coeffs, rk)
            )
            return 2.0 * diag - 2.0 * e0
        # earlier-in-circuit generator goes left-adjacent to the state
        if positions[ka] <= positions[kb]:
            ke, kl = ka, kb
        else:
            ke, kl = kb, ka
        pe = gens.paulis[ke]
        rl = right[kl]
        first = math.fsum(
            c * cache.expectation(pauli_mul(pe, r)).real for c, r in zip(coeffs, rl)
        )
        second = math.fsum(
            c * cache.expectation(pauli_mul(r, pe)).real for c, r in zip(coeffs, rl)
        )
        return 2.0 * first - 2.0 * second

    pairs = [(a, b) for a in range(nk) for b in range(a, nk)]

    def fill(chunk):
        for a, b in chunk:
            v = entry(a, b)
            A[a, b] = v
            A[b, a] = v

    if jobs is None or jobs <= 1 or len(pairs) < 64:
        fill(pairs)
    else:
        chunks = [pairs[i::jobs] for i in range(jobs)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(fill, chunks))
    return A


def solve_quadratic(
    e0: float,
    gradient: np.ndarray,
    hessian_kept: np.ndarray,
    mask: np.ndarray,
    rtol: float = 1e-10,
    stable_subspace: bool = False,
):
    """Stationary point of the quadratic model via symmetric eigensolve.

    theta* = -pinv(A) g on the kept set, eigenvalues with
    |lambda| <= rtol * max|lambda| treated as zero. With stable_subspace,
    only strictly positive-curvature directions are inverted (bounded
    descent for minimization). Returns (theta_star over all K parameters,
    model optimum, retained rank).
    """
    K = mask.size
    kept = np.nonzero(mask)[0]
    theta = np.zeros(K)
    if kept.size == 0:
        return theta, float(e0), 0
    g = np.asarray(gradient, dtype=float)[kept]
    A = np.asarray(hessian_kept, dtype=float)
    if not (np.isfinite(A).all() and np.isfinite(g).all()):
        raise SolveError("non-finite gradient/Hessian entries")
    try:
        evals, evecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise SolveError(f"eigendecomposition failed: {exc}") from exc
    cutoff = rtol * np.abs(evals).max() if evals.size else 0.0
    keep = np.abs(evals) > cutoff
    if stable_subspace:
        keep &= evals > 0
    rank = int(keep.sum())
    inv = np.zeros_like(evals)
    inv[keep] = 1.0 / evals[keep]
    theta_kept = -evecs @ (inv * (evecs.T @ g))
    optimum = float(e0 + g @ theta_kept + 0.5 * theta_kept @ A @ theta_kept)
    theta[kept] = theta_kept
    return theta, optimum, rank


@dataclass
class ExpansionResult:
    """Everything the quadratic model produces at the Clifford point."""

    n_qubits: int
    e0: float
    gradient: np.ndarray            # length K
    hessian_kept: np.ndarray        # dense symmetric over kept indices
    dropout_mask: np.ndarray        # boolean, True = kept
    dropout_threshold: float
    theta_star: np.ndarray          # length K, zeros at dropped slots
    perturbative_optimum: float
    rank: int
    rtol: float
    stable_subspace: bool = False
    timings: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    @property
    def n_params(self) -> int:
        return self.gradient.size

    def kept_indices(self) -> np.ndarray:
        return np.nonzero(self.dropout_mask)[0]

    def hessian_full(self) -> np.ndarray:
        """K x K Hessian with dropped rows/columns zero."""
        K = self.n_params
        A = np.zeros((K, K))
        kept = self.kept_indices()
        A[np.ix_(kept, kept)] = self.hessian_kept
        return A

    def to_dict(self) -> dict:
        kept = self.kept_indices()
        return {
            "e0": self.e0,
            "gradient": self.gradient.tolist(),
            "hessian": {
                "kept_indices": kept.tolist(),
                "rows": self.hessian_kept.tolist(),
            },
            "dropout": {
                "threshold": self.dropout_threshold,
                "kept": int(kept.size),
                "dropped": int(self.n_params - kept.size),
            },
            "theta_star": self.theta_star.tolist(),
            "perturbative_optimum": self.perturbative_optimum,
            "rank": self.rank,
            "rtol": self.rtol,
            "stable_subspace": self.stable_subspace,
            "timings": dict(self.timings),
            "counters": dict(self.counters),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, doc: dict, n_qubits: int = 0) -> "ExpansionResult":
        gradient = np.asarray(doc["gradient"], dtype=float)
        K = gradient.size
        mask = np.zeros(K, dtype=bool)
        mask[np.asarray(doc["hessian"]["kept_indices"], dtype=int)] = True
        return cls(
            n_qubits=n_qubits,
            e0=float(doc["e0"]),
            gradient=gradient,
            hessian_kept=np.asarray(doc["hessian"]["rows"], dtype=float).reshape(
                int(mask.sum()), int(mask.sum())
            ),
            dropout_mask=mask,
            dropout_threshold=float(doc["dropout"]["threshold"]),
            theta_star=np.asarray(doc["theta_star"], dtype=float),
            perturbative_optimum=float(doc["perturbative_optimum"]),
            rank=int(doc["rank"]),
            rtol=float(doc["rtol"]),
            stable_subspace=bool(doc.get("stable_subspace", False)),
            timings=dict(doc.get("timings", {})),
            counters=dict(doc.get("counters", {})),
            warnings=list(doc.get("warnings", [])),
        )


def expand(
    ansatz: AnsatzCircuit,
    observable: Observable,
    reference: str,
    threshold: float = 1e-6,
    rtol: float = 1e-10,
    jobs: Optional[int] = None,
    stable_subspace: bool = False,
) -> ExpansionResult:
    """Full pipeline: state -> generators -> g -> dropout -> A -> theta*.

    Deterministic for fixed inputs regardless of `jobs`.
    """
    if observable.n_qubits != ansatz.n_qubits:
        raise SolveError(
            f"observable on {observable.n_qubits} qubits vs ansatz on {ansatz.n_qubits}"
        )
    t0 = time.perf_counter()
    state0 = ansatz.clifford_point_state(reference)
    cache = _ExpectationCache(state0)
    e0 = observable.expectation_at_clifford_point(state0)
    gens = conjugate_generators(ansatz)
    gradient = compute_gradient(observable, state0, gens, cache)
    t1 = time.perf_counter()
    mask = apply_dropout(gradient, threshold)
    hessian = compute_hessian(observable, state0, gens, mask, e0, jobs, cache)
    t2 = time.perf_counter()
    theta_star, optimum, rank = solve_quadratic(
        e0, gradient, hessian, mask, rtol, stable_subspace
    )
    t3 = time.perf_counter()
    warnings = []
    if mask.size and not mask.any():
        warnings.append("all parameters dropped; quadratic model is the constant e0")
    return ExpansionResult(
        n_qubits=ansatz.n_qubits,
        e0=e0,
        gradient=gradient,
        hessian_kept=hessian,
        dropout_mask=mask,
        dropout_threshold=threshold,
        theta_star=theta_star,
        perturbative_optimum=optimum,
        rank=rank,
        rtol=rtol,
        stable_subspace=stable_subspace,
        timings={
            "gradient_s": t1 - t0,
            "hessian_s": t2 - t1,
            "solve_s": t3 - t2,
        },
        counters={
            "n_qubits": ansatz.n_qubits,
            "K": int(mask.size),
            "K_kept": int(mask.sum()),
            "N_o": observable.n_terms,
            "pauli_expectations_evaluated": cache.misses,
            "expectation_cache_hits": cache.hits,
        },
        warnings=warnings,
    )
