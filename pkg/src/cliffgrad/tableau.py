"""Tableau-based Clifford simulation.

Implements the standard destabilizer/stabilizer tableau with sign-exact
updates, Heisenberg-picture conjugation of Pauli strings through Clifford
circuits, and exact evaluation of <psi|Q|psi> for a phase-tracked Pauli Q
on a stabilizer state.

All gates reduce to the primitives {H, S, CNOT}; the 24 single-qubit
Clifford gates are enumerated by a fixed table of H/S words (see
CLIFFORD_1Q_WORDS, also shipped as data/single_qubit_cliffords.txt).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import WireError, DimensionMismatchError
from .pauli import PHASES, PauliString, pauli_mul

# ---------------------------------------------------------------------------
# Single-qubit Clifford table
#
# Index -> word over {H, S}, letters applied left to right in time order.
# The table is the breadth-first enumeration of the 24-element group starting
# from the identity, children ordered H before S, first-seen wins. Entry 0 is
# the identity, entry 1 is the Hadamard.
# ---------------------------------------------------------------------------

CLIFFORD_1Q_WORDS = (
    "", "H", "S", "HS", "SH", "SS", "HSH", "HSS", "SHS", "SSH", "SSS",
    "HSHS", "HSSH", "HSSS", "SHSS", "SSHS", "HSHSS", "HSSHS", "SHSSH",
    "SHSSS", "SSHSS", "HSHSSH", "HSHSSS", "HSSHSS",
)

# Inverse index within the same table.
CLIFFORD_1Q_INVERSE = (
    0, 1, 10, 11, 13, 5, 8, 9, 6, 7, 2, 3, 12, 4, 21, 22, 16, 17, 18, 19,
    20, 14, 15, 23,
)

CLIFFORD_1Q_IDENTITY = 0
CLIFFORD_1Q_HADAMARD = 1

_KIND_ARITY = {
    "H": 1, "S": 1, "SDG": 1, "X": 1, "Y": 1, "Z": 1,
    "CNOT": 2, "CZ": 2, "SWAP": 2, "C1": 1,
}


@dataclass(frozen=True)
class CliffordGate:
    """A Clifford gate: a named kind acting on one or two wires.

    kind "C1" selects one of the 24 single-qubit Cliffords by `index`.
    """

    kind: str
    wires: tuple
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind not in _KIND_ARITY:
            raise WireError(f"unknown Clifford gate kind {self.kind!r}")
        wires = tuple(int(w) for w in self.wires)
        object.__setattr__(self, "wires", wires)
        if len(wires) != _KIND_ARITY[self.kind]:
            raise WireError(f"{self.kind} takes {_KIND_ARITY[self.kind]} wire(s), got {wires}")
        if len(set(wires)) != len(wires):
            raise WireError(f"duplicate wires {wires} on {self.kind}")
        if self.kind == "C1":
            if self.index is None or not 0 <= self.index < 24:
                raise WireError(f"C1 index must be in 0..23, got {self.index}")
        elif self.index is not None:
            raise WireError(f"index is only valid for C1 gates, not {self.kind}")

    def inverse(self) -> "CliffordGate":
        if self.kind == "C1":
            return CliffordGate("C1", self.wires, CLIFFORD_1Q_INVERSE[self.index])
        if self.kind == "S":
            return CliffordGate("SDG", self.wires)
        if self.kind == "SDG":
            return CliffordGate("S", self.wires)
        # H, X, Y, Z, CNOT, CZ, SWAP are involutions
        return self

    def primitives(self) -> list:
        """Expand into (name, wires) primitives over {H, S, CNOT}, time order."""
        k, w = self.kind, self.wires
        if k == "H":
            return [("H", w)]
        if k == "S":
            return [("S", w)]
        if k == "SDG":
            return [("S", w)] * 3
        if k == "Z":
            return [("S", w)] * 2
        if k == "X":
            return [("H", w), ("S", w), ("S", w), ("H", w)]
        if k == "Y":
            # Y equals ZX up to global phase, irrelevant under conjugation.
            return CliffordGate("X", w).primitives() + CliffordGate("Z", w).primitives()
        if k == "CNOT":
            return [("CNOT", w)]
        if k == "CZ":
            hb = (w[1],)
            return [("H", hb), ("CNOT", w), ("H", hb)]
        if k == "SWAP":
            a, b = w
            return [("CNOT", (a, b)), ("CNOT", (b, a)), ("CNOT", (a, b))]
        if k == "C1":
            return [(ch, w) for ch in CLIFFORD_1Q_WORDS[self.index]]
        raise AssertionError(k)


def _check_wires(gate: CliffordGate, n_qubits: int) -> None:
    for w in gate.wires:
        if not 0 <= w < n_qubits:
            raise WireError(f"wire {w} out of range for {n_qubits} qubits ({gate.kind})")


# ---------------------------------------------------------------------------
# Single-Pauli conjugation (Heisenberg picture)
# ---------------------------------------------------------------------------


def _bit(words: np.ndarray, q: int) -> int:
    w, b = divmod(q, 64)
    return int(words[w] >> np.uint64(b)) & 1


def _flip(words: np.ndarray, q: int) -> None:
    w, b = divmod(q, 64)
    words[w] ^= np.uint64(1 << b)


def conjugate_pauli(circuit: Iterable[CliffordGate], p: PauliString) -> PauliString:
    """Return C p C† for the Clifford circuit C (gates in time order).

    Exact sign tracking; cost O(gate primitives), each primitive touching
    only its wires.
    """
    x = p.x.copy()
    z = p.z.copy()
    phase = p.phase
    n = p.n_qubits
    for gate in circuit:
        _check_wires(gate, n)
        for name, wires in gate.primitives():
            if name == "H":
                (q,) = wires
                xb, zb = _bit(x, q), _bit(z, q)
                if xb & zb:
                    phase ^= 2
                if xb != zb:
                    _flip(x, q)
                    _flip(z, q)
            elif name == "S":
                (q,) = wires
                xb, zb = _bit(x, q), _bit(z, q)
                if xb & zb:
                    phase ^= 2
                if xb:
                    _flip(z, q)
            else:  # CNOT
                a, b = wires
                xa, za = _bit(x, a), _bit(z, a)
                xb, zb = _bit(x, b), _bit(z, b)
                if xa & zb & (1 ^ xb ^ za):
                    phase ^= 2
                if xa:
                    _flip(x, b)
                if zb:
                    _flip(z, a)
    return PauliString(n, x, z, phase)


class CliffordImageMap:
    """Conjugation map of a Clifford circuit, stored as images of X_q, Z_q.

    Supports composing a gate on the *input* side (prepend), which is what a
    right-to-left sweep over a circuit needs: after prepending gates
    g_p, g_{p+1}, ..., image(P) equals (g_G ... g_p) P (g_G ... g_p)†.
    """

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.im_x = [PauliString.single(n_qubits, "X", q) for q in range(n_qubits)]
        self.im_z = [PauliString.single(n_qubits, "Z", q) for q in range(n_qubits)]

    def prepend(self, gate: CliffordGate) -> None:
        _check_wires(gate, self.n_qubits)
        # Composing with Conj_g on the right means folding g's primitive
        # word from its last letter to its first.
        for name, wires in reversed(gate.primitives()):
            if name == "H":
                (q,) = wires
                self.im_x[q], self.im_z[q] = self.im_z[q], self.im_x[q]
            elif name == "S":
                (q,) = wires
                # S X S† = Y = i X Z, so new image(X_q) = i im_x[q] im_z[q]
                prod = pauli_mul(self.im_x[q], self.im_z[q])
                self.im_x[q] = prod.with_phase(prod.phase + 1)
            else:  # CNOT
                a, b = wires
                self.im_x[a] = pauli_mul(self.im_x[a], self.im_x[b])
                self.im_z[b] = pauli_mul(self.im_z[a], self.im_z[b])

    def image_of_letter(self, letter: str, qubit: int) -> PauliString:
        if letter == "X":
            return self.im_x[qubit]
        if letter == "Z":
            return self.im_z[qubit]
        if letter == "Y":
            prod = pauli_mul(self.im_x[qubit], self.im_z[qubit])
            return prod.with_phase(prod.phase + 1)
        raise ValueError(f"no rotation generator for letter {letter!r}")


# ---------------------------------------------------------------------------
# Stabilizer tableau
# ---------------------------------------------------------------------------


class StabilizerTableau:
    """Destabilizer/stabilizer tableau of a Clifford-evolved basis state.

    Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers; r holds the
    sign bit of each row ((-1)^r, letter convention with Y at x=z=1).
    """

    def __init__(self, n_qubits: int, bitstring: Optional[str] = None):
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {n_qubits}")
        self.n = n_qubits
        self.x = np.zeros((2 * n_qubits, n_qubits), dtype=np.uint8)
        self.z = np.zeros((2 * n_qubits, n_qubits), dtype=np.uint8)
        self.r = np.zeros(2 * n_qubits, dtype=np.uint8)
        for j in range(n_qubits):
            self.x[j, j] = 1              # destabilizer X_j
            self.z[n_qubits + j, j] = 1   # stabilizer Z_j
        if bitstring is not None:
            if len(bitstring) != n_qubits or set(bitstring) - {"0", "1"}:
                raise ValueError(f"bitstring {bitstring!r} invalid for {n_qubits} qubits")
            for j, c in enumerate(bitstring):
                if c == "1":
                    self.r[n_qubits + j] = 1
        self._row_cache = None

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.n = self.n
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.r = self.r.copy()
        t._row_cache = None
        return t

    # -- gate application ---------------------------------------------------

    def apply(self, gate: CliffordGate) -> "StabilizerTableau":
        _check_wires(gate, self.n)
        x, z, r = self.x, self.z, self.r
        for name, wires in gate.primitives():
            if name == "H":
                (q,) = wires
                r ^= x[:, q] & z[:, q]
                x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
            elif name == "S":
                (q,) = wires
                r ^= x[:, q] & z[:, q]
                z[:, q] ^= x[:, q]
            else:  # CNOT
                a, b = wires
                r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
                x[:, b] ^= x[:, a]
                z[:, a] ^= z[:, b]
        self._row_cache = None
        return self

    def apply_circuit(self, gates: Iterable[CliffordGate]) -> "StabilizerTableau":
        for g in gates:
            self.apply(g)
        return self

    # -- row access ---------------------------------------------------------

    def _row(self, i: int) -> PauliString:
        if self._row_cache is None:
            self._row_cache = {}
        ps = self._row_cache.get(i)
        if ps is None:
            ps = PauliString.from_bits(self.x[i], self.z[i], 2 * int(self.r[i]))
            self._row_cache[i] = ps
        return ps

    def stabilizer(self, j: int) -> PauliString:
        return self._row(self.n + j)

    def destabilizer(self, j: int) -> PauliString:
        return self._row(j)

    def stabilizers(self) -> list:
        return [self.stabilizer(j) for j in range(self.n)]

    # -- expectation --------------------------------------------------------

    def expectation(self, q: PauliString) -> complex:
        """Exact <psi|Q|psi> in {0, ±1, ±i} times Q's phase.

        Zero iff the unphased part of Q anticommutes with some stabilizer;
        otherwise the unphased part is a signed product of generators,
        reconstructed destabilizer-assisted in lowest-index-first order.
        """
        if q.n_qubits != self.n:
            raise DimensionMismatchError(
                f"Pauli on {q.n_qubits} qubits vs state on {self.n}"
            )
        qx = _unpack(q.x, self.n).astype(np.int32)
        qz = _unpack(q.z, self.n).astype(np.int32)
        n = self.n
        sx = self.x[n:].astype(np.int32)
        sz = self.z[n:].astype(np.int32)
        anti_stab = (sx @ qz + sz @ qx) % 2
        if anti_stab.any():
            return 0j
        dx = self.x[:n].astype(np.int32)
        dz = self.z[:n].astype(np.int32)
        select = ((dx @ qz + dz @ qx) % 2).astype(bool)
        acc = PauliString.identity(n)
        for j in np.nonzero(select)[0]:
            acc = pauli_mul(acc, self.stabilizer(int(j)))
        if not (np.array_equal(acc.x, q.x) and np.array_equal(acc.z, q.z)):
            raise AssertionError("stabilizer reconstruction mismatch")
        sign = 1.0 if acc.phase == 0 else -1.0
        return PHASES[q.phase] * sign


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    bits = np.zeros(n, dtype=np.uint8)
    for q in range(n):
        w, b = divmod(q, 64)
        bits[q] = (words[w] >> np.uint64(b)) & np.uint64(1)
    return bits
