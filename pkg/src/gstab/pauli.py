"""Bit-packed n-qubit Pauli operators with exact global-phase tracking.

A Pauli operator is stored as two bit masks (``x_bits``, ``z_bits``) plus a
global phase exponent ``phase_exp`` so that the operator equals
``i**phase_exp * prod_q P_q`` where the per-qubit letter ``P_q`` is read from
bit ``q`` of the masks: (x, z) = (0,0) -> I, (1,0) -> X, (1,1) -> Y,
(0,1) -> Z.  Qubit 0 is the lowest bit and the leftmost letter in the text
rendering.

Multiplication is exact over the fourth roots of unity, which matters because
T-gate branch phases live in {+1, -1, +i, -i}.
"""

from __future__ import annotations

import re

_PHASE_STR = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PHASE_FROM_STR = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_LETTER_BITS = {"I": (0, 0), "_": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {(0, 0): "_", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_PAULI_RE = re.compile(r"^([+-]?i?)([IXYZ_]+)$")


class PauliError(ValueError):
    """Raised for malformed Pauli strings or mismatched operand sizes."""


class PauliString:
    """An element of the n-qubit Pauli group, immutable by convention."""

    __slots__ = ("num_qubits", "x_bits", "z_bits", "phase_exp")

    def __init__(self, num_qubits: int, x_bits: int = 0, z_bits: int = 0,
                 phase_exp: int = 0):
        if num_qubits < 1:
            raise PauliError("need at least one qubit")
        mask = (1 << num_qubits) - 1
        if x_bits & ~mask or z_bits & ~mask:
            raise PauliError("bit mask exceeds qubit count")
        self.num_qubits = num_qubits
        self.x_bits = x_bits
        self.z_bits = z_bits
        self.phase_exp = phase_exp & 3

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls(num_qubits)

    @classmethod
    def single(cls, num_qubits: int, qubit: int, letter: str,
               phase_exp: int = 0) -> "PauliString":
        """A single-qubit letter embedded in an n-qubit identity."""
        if not 0 <= qubit < num_qubits:
            raise PauliError(f"qubit {qubit} out of range for n={num_qubits}")
        x, z = _LETTER_BITS[letter.upper()]
        return cls(num_qubits, x << qubit, z << qubit, phase_exp)

    @classmethod
    def from_str(cls, text: str, num_qubits: int | None = None) -> "PauliString":
        """Parse renderings like ``+XYZ_``, ``-iXZ``, ``ZZ``.

        Qubit 0 is the leftmost letter.
        """
        m = _PAULI_RE.match(text.strip())
        if m is None:
            raise PauliError(f"malformed Pauli string: {text!r}")
        phase = _PHASE_FROM_STR[m.group(1)]
        letters = m.group(2)
        n = num_qubits if num_qubits is not None else len(letters)
        if len(letters) != n:
            raise PauliError(f"expected {n} letters, got {len(letters)}")
        x = z = 0
        for q, letter in enumerate(letters):
            xb, zb = _LETTER_BITS[letter]
            x |= xb << q
            z |= zb << q
        return cls(n, x, z, phase)

    # -- algebra ------------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.num_qubits != other.num_qubits:
            raise PauliError("cannot multiply Paulis of different sizes")
        x, z, e = mul_packed(self.x_bits, self.z_bits, self.phase_exp,
                             other.x_bits, other.z_bits, other.phase_exp)
        return PauliString(self.num_qubits, x, z, e)

    def dagger(self) -> "PauliString":
        """Hermitian conjugate: letters are self-inverse, phase conjugates."""
        return PauliString(self.num_qubits, self.x_bits, self.z_bits,
                           (-self.phase_exp) & 3)

    def commutes_with(self, other: "PauliString") -> bool:
        if self.num_qubits != other.num_qubits:
            raise PauliError("cannot compare Paulis of different sizes")
        return commutes_packed(self.x_bits, self.z_bits,
                               other.x_bits, other.z_bits)

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp in (0, 2)

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    # -- misc ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, PauliString)
                and self.num_qubits == other.num_qubits
                and self.x_bits == other.x_bits
                and self.z_bits == other.z_bits
                and self.phase_exp == other.phase_exp)

    def __hash__(self) -> int:
        return hash((self.num_qubits, self.x_bits, self.z_bits, self.phase_exp))

    def __str__(self) -> str:
        letters = "".join(
            _BITS_LETTER[(self.x_bits >> q) & 1, (self.z_bits >> q) & 1]
            for q in range(self.num_qubits))
        return _PHASE_STR[self.phase_exp] + letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"


# ----------------------------------------------------------------------
# Packed-integer primitives.  These operate on plain ints so the tableau
# engine can use them on raw rows without building PauliString objects.
# ----------------------------------------------------------------------

def mul_packed(x1: int, z1: int, e1: int, x2: int, z2: int, e2: int):
    """Exact product of two packed Paulis; returns (x, z, phase_exp).

    The phase rule converts to the X^x Z^z convention (each Y contributes a
    factor i), accumulates the (-1)^{z1.x2} reordering sign, and converts
    back, so everything reduces to popcounts.
    """
    x3 = x1 ^ x2
    z3 = z1 ^ z2
    e = (e1 + e2
         + 2 * (z1 & x2).bit_count()
         + (x1 & z1).bit_count()
         + (x2 & z2).bit_count()
         - (x3 & z3).bit_count())
    return x3, z3, e & 3


def commutes_packed(x1: int, z1: int, x2: int, z2: int) -> bool:
    """True iff the symplectic inner product is even."""
    return ((x1 & z2).bit_count() + (z1 & x2).bit_count()) % 2 == 0
