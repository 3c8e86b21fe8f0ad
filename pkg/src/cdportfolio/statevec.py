"""Exact state-vector engine: Pauli-string exponentials, expectations.

A Pauli string P squares to the identity, so

    exp(-i theta P) |psi> = cos(theta) |psi> - i sin(theta) P |psi>

holds exactly; P|psi> is a bit-mask permutation of amplitudes with a
per-amplitude sign and one global unit factor.  That single code path
covers every term weight that appears here (single-qubit fields, ZZ
couplings, and the two-body CD strings), so no gate synthesis is needed.
Application is in place with one scratch buffer per state.
"""

from __future__ import annotations

import numpy as np

from .ising import IsingModel, energy_diagonal
from .pauli import PauliString, PauliSum
from .portfolio import DEFAULT_QUBIT_CAP

_EXPECTATION_IMAG_TOL = 1e-10

_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def _parity(values: np.ndarray) -> np.ndarray:
    """Bitwise parity of each entry (int64 in, 0/1 out)."""
    v = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


class StateVector:
    """2^N complex amplitudes with qubit u on index bit u."""

    __slots__ = ("n_qubits", "amps", "_scratch", "_indices")

    def __init__(self, amplitudes: np.ndarray):
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        n = int(amps.size).bit_length() - 1
        if 1 << n != amps.size:
            raise ValueError("amplitude count must be a power of two")
        self.n_qubits = n
        self.amps = amps
        self._scratch = np.empty_like(amps)
        self._indices = np.arange(amps.size, dtype=np.int64)

    @classmethod
    def uniform_superposition(cls, n_qubits: int, cap: int = DEFAULT_QUBIT_CAP) -> "StateVector":
        """|+>^N: every amplitude 2^(-N/2), phase zero."""
        if not 1 <= n_qubits <= cap:
            raise ValueError(f"n_qubits must lie in [1, {cap}]")
        dim = 1 << n_qubits
        return cls(np.full(dim, 2.0 ** (-n_qubits / 2.0), dtype=np.complex128))

    @classmethod
    def basis_state(cls, n_qubits: int, index: int, cap: int = DEFAULT_QUBIT_CAP) -> "StateVector":
        if not 1 <= n_qubits <= cap:
            raise ValueError(f"n_qubits must lie in [1, {cap}]")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        self._check_match(other.n_qubits)
        return complex(np.vdot(self.amps, other.amps))

    def _check_match(self, n_qubits: int) -> None:
        if n_qubits != self.n_qubits:
            raise ValueError(
                f"qubit-count mismatch: {self.n_qubits} vs {n_qubits}"
            )

    def _pauli_apply(self, string: PauliString, out: np.ndarray) -> np.ndarray:
        """out <- P |psi>, using masks only (no matrices).

        With w = |x&z|, P acts as
        (P psi)[c] = phase * (-i)^w * (-1)^{|c & z|} * psi[c ^ x].
        """
        xm, zm = string.x_mask, string.z_mask
        if xm:
            np.take(self.amps, self._indices ^ xm, out=out)
        else:
            np.copyto(out, self.amps)
        if zm:
            signs = 1.0 - 2.0 * _parity(self._indices & zm)
            out *= signs
        w = (xm & zm).bit_count()
        factor = string.phase * _I_POWERS[(-w) % 4]
        if factor != 1.0:
            out *= factor
        return out

    def apply_pauli_exp(self, string: PauliString, theta: float) -> None:
        """In-place state <- exp(-i theta P) state."""
        self._check_match(string.n_qubits)
        if theta == 0.0:
            return
        self._pauli_apply(string, self._scratch)
        self.amps *= np.cos(theta)
        self._scratch *= -1j * np.sin(theta)
        self.amps += self._scratch

    def expectation(self, hamiltonian) -> float:
        """<psi|H|psi> for a PauliSum or an IsingModel (beta excluded).

        Raises if the imaginary residue exceeds tolerance, i.e. the input
        was not Hermitian.
        """
        if isinstance(hamiltonian, IsingModel):
            self._check_match(hamiltonian.n_qubits)
            return float(self.probabilities() @ energy_diagonal(hamiltonian))
        if isinstance(hamiltonian, PauliSum):
            self._check_match(hamiltonian.n_qubits)
            total = 0j
            for string, coeff in hamiltonian.strings():
                self._pauli_apply(string, self._scratch)
                total += coeff * np.vdot(self.amps, self._scratch)
            if abs(total.imag) > _EXPECTATION_IMAG_TOL * max(1.0, abs(total.real)):
                raise ValueError(
                    f"non-Hermitian expectation (imaginary part {total.imag:.3e})"
                )
            return float(total.real)
        raise TypeError(f"unsupported Hamiltonian type {type(hamiltonian)!r}")
