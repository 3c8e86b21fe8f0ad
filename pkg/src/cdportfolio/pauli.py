"""Symbolic algebra over N-qubit Pauli strings.

A Pauli string is encoded by two bit masks over qubit indices:

  ``x_mask`` — qubits carrying an X or Y factor,
  ``z_mask`` — qubits carrying a Z or Y factor.

A qubit set in both masks carries Y; a qubit set in neither carries the
identity.  The unsigned operator for a mask pair ``(x, z)`` is the tensor
product of the named Paulis (Y on the overlap, no extra phase), so its
action on a computational basis state ``|b>`` is

  T(x, z)|b> = i^|x&z| * (-1)^|b&z| * |b XOR x>,

with ``|.|`` the popcount.  Sums store one complex coefficient per mask
pair; phases from products are folded into coefficients, so Hermitian
operators have real coefficients.  Masks are plain Python ints, hence any
qubit count is supported symbolically; dense rendering is capped for use
as a test oracle only.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

#: Coefficients with magnitude below this are dropped after every merge.
PRUNE_TOL = 1e-12

#: Dense rendering refuses above this many qubits (oracle use only).
DENSE_QUBIT_CAP = 12

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)

_SINGLE_DENSE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_LETTER_TO_MASKS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_MASKS_TO_LETTER = {v: k for k, v in _LETTER_TO_MASKS.items()}


def _product_phase(ax: int, az: int, bx: int, bz: int) -> complex:
    """Phase picked up by T(ax,az) @ T(bx,bz) relative to T(ax^bx, az^bz)."""
    wa = (ax & az).bit_count()
    wb = (bx & bz).bit_count()
    wc = ((ax ^ bx) & (az ^ bz)).bit_count()
    cross = (bx & az).bit_count()
    phase = _PHASES[(wa + wb - wc) % 4]
    return -phase if cross & 1 else phase


def keys_commute(ax: int, az: int, bx: int, bz: int) -> bool:
    """Symplectic commutation test on raw mask pairs."""
    return ((ax & bz).bit_count() + (az & bx).bit_count()) % 2 == 0


@dataclass(frozen=True)
class PauliString:
    """One signed Pauli string: ``phase * T(x_mask, z_mask)`` on ``n_qubits``."""

    n_qubits: int
    x_mask: int
    z_mask: int
    phase: complex = 1 + 0j

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask exceeds qubit count")
        if self.phase not in _PHASES:
            raise ValueError(f"phase must be a fourth root of unity, got {self.phase}")

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_label(cls, label: str, phase: complex = 1 + 0j) -> "PauliString":
        """Build from a letter string, qubit 0 leftmost (e.g. ``"XZI"``)."""
        x = z = 0
        for q, letter in enumerate(label):
            try:
                xb, zb = _LETTER_TO_MASKS[letter]
            except KeyError:
                raise ValueError(f"bad Pauli letter {letter!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(label), x, z, phase)

    def label(self) -> str:
        return "".join(
            _MASKS_TO_LETTER[(self.x_mask >> q) & 1, (self.z_mask >> q) & 1]
            for q in range(self.n_qubits)
        )

    def __repr__(self) -> str:
        sign = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return f"{sign}{self.label()}"

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return (self.x_mask | self.z_mask).bit_count()

    def commutes_with(self, other: "PauliString") -> bool:
        self._check_match(other)
        return keys_commute(self.x_mask, self.z_mask, other.x_mask, other.z_mask)

    def _check_match(self, other: "PauliString") -> None:
        if self.n_qubits != other.n_qubits:
            raise ValueError(
                f"qubit-count mismatch: {self.n_qubits} vs {other.n_qubits}"
            )

    def __mul__(self, other: "PauliString") -> "PauliString":
        self._check_match(other)
        phase = self.phase * other.phase * _product_phase(
            self.x_mask, self.z_mask, other.x_mask, other.z_mask
        )
        return PauliString(
            self.n_qubits, self.x_mask ^ other.x_mask, self.z_mask ^ other.z_mask, phase
        )

    def to_dense(self) -> np.ndarray:
        """Dense matrix with qubit 0 on the least significant index bit."""
        if self.n_qubits > DENSE_QUBIT_CAP:
            raise ValueError(f"dense rendering capped at {DENSE_QUBIT_CAP} qubits")
        mat = np.array([[1.0 + 0j]])
        for letter in self.label():
            mat = np.kron(_SINGLE_DENSE[letter], mat)
        return self.phase * mat


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product a*b with the accumulated phase."""
    return a * b


def x(n_qubits: int, qubit: int) -> PauliString:
    return PauliString(n_qubits, 1 << qubit, 0)


def y(n_qubits: int, qubit: int) -> PauliString:
    return PauliString(n_qubits, 1 << qubit, 1 << qubit)


def z(n_qubits: int, qubit: int) -> PauliString:
    return PauliString(n_qubits, 0, 1 << qubit)


class PauliSum:
    """Weighted sum of Pauli strings with canonical (x_mask, z_mask) keys.

    Coefficients multiply the unsigned strings T(x, z); any phase carried
    by a contributing PauliString is folded in on construction.  Instances
    are immutable after construction and safe to share across threads.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(
        self,
        n_qubits: int,
        terms: Mapping[tuple[int, int], complex] | None = None,
        prune_tol: float = PRUNE_TOL,
    ) -> None:
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = n_qubits
        kept = {}
        if terms:
            for key, coeff in terms.items():
                if abs(coeff) >= prune_tol:
                    kept[key] = complex(coeff)
        self._terms = MappingProxyType(kept)

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls(n_qubits)

    @classmethod
    def from_strings(
        cls, items: Iterable[tuple[PauliString, complex]], n_qubits: int | None = None
    ) -> "PauliSum":
        acc: dict[tuple[int, int], complex] = {}
        n = n_qubits
        for string, coeff in items:
            if n is None:
                n = string.n_qubits
            elif string.n_qubits != n:
                raise ValueError("qubit-count mismatch among strings")
            key = (string.x_mask, string.z_mask)
            acc[key] = acc.get(key, 0j) + coeff * string.phase
        if n is None:
            raise ValueError("empty iterable needs an explicit n_qubits")
        return cls(n, acc)

    @property
    def terms(self) -> Mapping[tuple[int, int], complex]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[tuple[int, int], complex]]:
        return iter(self._terms.items())

    def __repr__(self) -> str:
        if not self._terms:
            return "PauliSum(0)"
        parts = []
        for (xm, zm), coeff in sorted(self._terms.items()):
            label = PauliString(self.n_qubits, xm, zm).label()
            parts.append(f"({coeff:.6g})*{label}")
        return "PauliSum(" + " + ".join(parts) + ")"

    def _check_match(self, other: "PauliSum") -> None:
        if self.n_qubits != other.n_qubits:
            raise ValueError(
                f"qubit-count mismatch: {self.n_qubits} vs {other.n_qubits}"
            )

    def coefficient(self, string: PauliString) -> complex:
        """Coefficient of a string, including its phase (0 if absent)."""
        raw = self._terms.get((string.x_mask, string.z_mask), 0j)
        return raw / string.phase

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_match(other)
        acc = dict(self._terms)
        for key, coeff in other._terms.items():
            acc[key] = acc.get(key, 0j) + coeff
        return PauliSum(self.n_qubits, acc)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "PauliSum":
        return PauliSum(
            self.n_qubits, {k: scalar * c for k, c in self._terms.items()}
        )

    def __mul__(self, other: "PauliSum") -> "PauliSum":
        """Operator product, phases folded into coefficients."""
        self._check_match(other)
        acc: dict[tuple[int, int], complex] = {}
        for (ax, az), ca in self._terms.items():
            for (bx, bz), cb in other._terms.items():
                key = (ax ^ bx, az ^ bz)
                coeff = ca * cb * _product_phase(ax, az, bx, bz)
                acc[key] = acc.get(key, 0j) + coeff
        return PauliSum(self.n_qubits, acc)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def strings(self) -> Iterator[tuple[PauliString, complex]]:
        for (xm, zm), coeff in self._terms.items():
            yield PauliString(self.n_qubits, xm, zm), coeff

    def to_dense(self) -> np.ndarray:
        if self.n_qubits > DENSE_QUBIT_CAP:
            raise ValueError(f"dense rendering capped at {DENSE_QUBIT_CAP} qubits")
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for string, coeff in self.strings():
            mat += coeff * string.to_dense()
        return mat


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """[a, b] = ab - ba, skipping commuting string pairs outright."""
    a._check_match(b)
    acc: dict[tuple[int, int], complex] = {}
    for (ax, az), ca in a.terms.items():
        for (bx, bz), cb in b.terms.items():
            if keys_commute(ax, az, bx, bz):
                continue
            # anticommuting strings: ab - ba = 2ab
            key = (ax ^ bx, az ^ bz)
            coeff = 2.0 * ca * cb * _product_phase(ax, az, bx, bz)
            acc[key] = acc.get(key, 0j) + coeff
    return PauliSum(a.n_qubits, acc)


def normalized_trace_product(a: PauliSum, b: PauliSum) -> complex:
    """Tr(a b) / 2^N, evaluated symbolically.

    Distinct canonical strings are trace-orthogonal and every T(x, z)
    squares to the identity, so only shared keys contribute.
    """
    a._check_match(b)
    if len(b) < len(a):
        a, b = b, a
    total = 0j
    for key, ca in a.terms.items():
        cb = b.terms.get(key)
        if cb is not None:
            total += ca * cb
    return total
