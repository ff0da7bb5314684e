"""Phase-exact Pauli string algebra in a bit-packed symplectic representation.

A Pauli operator on n qubits is stored as two n-bit vectors (packed into
64-bit words) plus a phase exponent k with the operator equal to
i^k * (L_0 ⊗ L_1 ⊗ ... ⊗ L_{n-1}), where the letter on qubit j is decoded
from the bit pair (x_j, z_j): (0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y.

Qubit 0 is the leftmost wire in all textual forms. All phase arithmetic is
integer (mod 4), so products of Pauli strings are exact.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import DimensionMismatchError, PauliFormatError

_WORD_BITS = 64

_TOKEN_RE = re.compile(r"([IXYZ])(\d+)$")

# Sign of the phase exponent as a complex number, indexed by k mod 4.
PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _n_words(n_qubits: int) -> int:
    return (n_qubits + _WORD_BITS - 1) // _WORD_BITS


def _popcount(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum())


class PauliString:
    """Immutable phase-tracked n-qubit Pauli operator.

    Attributes:
        n_qubits: number of qubits the operator acts on.
        x: packed X-component bits, uint64 words (read-only).
        z: packed Z-component bits, uint64 words (read-only).
        phase: exponent k in i^k, k in {0,1,2,3}.
    """

    __slots__ = ("n_qubits", "x", "z", "phase", "_hash")

    def __init__(self, n_qubits: int, x: np.ndarray, z: np.ndarray, phase: int = 0):
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {n_qubits}")
        self.n_qubits = n_qubits
        x = np.asarray(x, dtype=np.uint64).copy()
        z = np.asarray(z, dtype=np.uint64).copy()
        if x.shape != (_n_words(n_qubits),) or z.shape != x.shape:
            raise ValueError("bit-vector word count does not match n_qubits")
        # Mask stray bits above n_qubits so equality/hashing are well defined.
        rem = n_qubits % _WORD_BITS
        if rem:
            mask = np.uint64((1 << rem) - 1)
            x[-1] &= mask
            z[-1] &= mask
        x.flags.writeable = False
        z.flags.writeable = False
        self.x = x
        self.z = z
        self.phase = int(phase) % 4
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        w = _n_words(n_qubits)
        return cls(n_qubits, np.zeros(w, np.uint64), np.zeros(w, np.uint64))

    @classmethod
    def from_bits(cls, x_bits, z_bits, phase: int = 0) -> "PauliString":
        """Build from per-qubit 0/1 sequences (qubit 0 first)."""
        x_bits = np.asarray(x_bits, dtype=np.uint8)
        z_bits = np.asarray(z_bits, dtype=np.uint8)
        if x_bits.shape != z_bits.shape or x_bits.ndim != 1:
            raise ValueError("x_bits and z_bits must be equal-length 1-d sequences")
        n = x_bits.size
        return cls(n, _pack_bits(x_bits, n), _pack_bits(z_bits, n), phase)

    @classmethod
    def single(cls, n_qubits: int, letter: str, qubit: int, phase: int = 0) -> "PauliString":
        """A single-site Pauli letter on the given qubit."""
        if not 0 <= qubit < n_qubits:
            raise ValueError(f"qubit {qubit} out of range for {n_qubits} qubits")
        p = cls.identity(n_qubits)
        x = p.x.copy()
        z = p.z.copy()
        w, b = divmod(qubit, _WORD_BITS)
        bit = np.uint64(1 << b)
        if letter in ("X", "Y"):
            x[w] |= bit
        if letter in ("Z", "Y"):
            z[w] |= bit
        if letter not in ("I", "X", "Y", "Z"):
            raise PauliFormatError(f"unknown Pauli letter {letter!r}")
        return cls(n_qubits, x, z, phase)

    # -- bit access ---------------------------------------------------------

    def x_bit(self, qubit: int) -> int:
        w, b = divmod(qubit, _WORD_BITS)
        return int(self.x[w] >> np.uint64(b)) & 1

    def z_bit(self, qubit: int) -> int:
        w, b = divmod(qubit, _WORD_BITS)
        return int(self.z[w] >> np.uint64(b)) & 1

    def letter(self, qubit: int) -> str:
        return "IXZY"[self.x_bit(qubit) + 2 * self.z_bit(qubit)]

    def weight(self) -> int:
        """Number of non-identity sites."""
        return _popcount(self.x | self.z)

    def n_y(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def phase_value(self) -> complex:
        return PHASES[self.phase]

    # -- algebra ------------------------------------------------------------

    def with_phase(self, phase: int) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, phase)

    def unphased(self) -> "PauliString":
        return self if self.phase == 0 else self.with_phase(0)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n_qubits, self.phase, self.x.tobytes(), self.z.tobytes()))
        return self._hash

    def key(self) -> tuple:
        """Hashable key of the unphased bit content (memoization helper)."""
        return (self.x.tobytes(), self.z.tobytes())

    # -- text and matrices --------------------------------------------------

    def to_text(self) -> str:
        """Whitespace-separated letter+index tokens; identity is ''."""
        toks = []
        for q in range(self.n_qubits):
            let = self.letter(q)
            if let != "I":
                toks.append(f"{let}{q}")
        return " ".join(toks)

    def __repr__(self) -> str:
        pre = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        body = self.to_text() or "I"
        return f"PauliString({pre}{body}, n={self.n_qubits})"

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; intended for small-n validation only."""
        if self.n_qubits > 12:
            raise ValueError("to_matrix is a validation helper; n_qubits > 12 refused")
        mats = {
            "I": np.eye(2, dtype=complex),
            "X": np.array([[0, 1], [1, 0]], dtype=complex),
            "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
            "Z": np.array([[1, 0], [0, -1]], dtype=complex),
        }
        out = np.array([[PHASES[self.phase]]], dtype=complex)
        for q in range(self.n_qubits):
            out = np.kron(out, mats[self.letter(q)])
        return out


def _pack_bits(bits: np.ndarray, n: int) -> np.ndarray:
    words = np.zeros(_n_words(n), dtype=np.uint64)
    idx = np.nonzero(bits)[0]
    for q in idx:
        w, b = divmod(int(q), _WORD_BITS)
        words[w] |= np.uint64(1 << b)
    return words


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product a·b with the accumulated i^k phase.

    The x/z words XOR; the phase bookkeeping runs in the X^x Z^z internal
    convention (Y = i·XZ), where reordering Z past X contributes (-1) per
    overlapping site.
    """
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(
            f"cannot multiply Pauli strings on {a.n_qubits} and {b.n_qubits} qubits"
        )
    x = a.x ^ b.x
    z = a.z ^ b.z
    k_int = (
        a.phase
        + _popcount(a.x & a.z)
        + b.phase
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
    )
    phase = (k_int - _popcount(x & z)) % 4
    return PauliString(a.n_qubits, x, z, phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff ab == ba, via the parity of the symplectic product."""
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(
            f"cannot compare Pauli strings on {a.n_qubits} and {b.n_qubits} qubits"
        )
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


def parse_pauli(text: str, n_qubits: int) -> PauliString:
    """Parse 'X0 Z3'-style tokens into a phase +1 PauliString.

    The empty string parses to the identity. Each qubit index may appear at
    most once; letters are uppercase IXYZ only.
    """
    p = PauliString.identity(n_qubits)
    x = p.x.copy()
    z = p.z.copy()
    seen = set()
    for tok in text.split():
        m = _TOKEN_RE.match(tok)
        if not m:
            raise PauliFormatError(f"bad Pauli token {tok!r}")
        letter, q = m.group(1), int(m.group(2))
        if q >= n_qubits:
            raise PauliFormatError(f"qubit index {q} out of range (n_qubits={n_qubits})")
        if q in seen:
            raise PauliFormatError(f"duplicate qubit index {q} in {text!r}")
        seen.add(q)
        w, b = divmod(q, _WORD_BITS)
        bit = np.uint64(1 << b)
        if letter in ("X", "Y"):
            x[w] |= bit
        if letter in ("Z", "Y"):
            z[w] |= bit
    return PauliString(n_qubits, x, z, 0)
