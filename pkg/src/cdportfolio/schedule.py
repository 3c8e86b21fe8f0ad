"""Annealing schedule and counterdiabatic coefficients.

The interpolation lambda(t) = sin^2[(pi/2) sin^2(pi t / 2T)] rises
monotonically from 0 to 1 with first and second derivatives vanishing at
both endpoints, so any term proportional to d(lambda)/dt switches off
exactly at t = 0 and t = T.

Both counterdiabatic coefficient computations minimize the action
S = Tr[G^2] / 2^N with G = dH/dlambda + i[A, H] over their respective
ansatz for A:

* local ansatz A = sum_i alpha_i Y_i: S decouples per qubit and the exact
  minimizer has the closed form implemented in `lcd_alpha` (derived by
  differentiating S; the derivation fixes both the sign and the factor on
  the coupling sum, and is pinned by an independent oracle in the tests);
* first-order commutator ansatz A = i alpha_1 [H, dH/dlambda]: S is
  quadratic in alpha_1 and the minimizer is a ratio of two normalized
  traces, evaluated symbolically through the pauli module.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .ising import IsingModel, problem_hamiltonian, transverse_hamiltonian
from .pauli import PauliSum, commutator, normalized_trace_product

_DEGENERATE_TOL = 1e-300


class CdMode(str, enum.Enum):
    """Which counterdiabatic term, if any, augments the evolution."""

    NONE = "none"
    LCD = "lcd"
    ACD = "acd"


@dataclass(frozen=True)
class Schedule:
    """Total time T split into M first-order steps of size T/M."""

    T: float
    M: int

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.M < 1:
            raise ValueError("M must be at least 1")

    @property
    def dt(self) -> float:
        return self.T / self.M

    def times(self) -> np.ndarray:
        """Step sample points t_k = T * (k / M), k = 1..M (endpoint exact)."""
        return self.T * (np.arange(1, self.M + 1) / self.M)


def lambda_(t: float, T: float) -> float:
    """Scheduling function, 0 at t=0 and exactly 1 at t=T."""
    if not 0.0 <= t <= T:
        raise ValueError(f"t={t} outside [0, {T}]")
    if t == T:
        return 1.0
    inner = math.sin(math.pi * t / (2.0 * T)) ** 2
    return math.sin(0.5 * math.pi * inner) ** 2


def lambda_dot(t: float, T: float) -> float:
    """Analytic time derivative of lambda_, exactly zero at both endpoints."""
    if not 0.0 <= t <= T:
        raise ValueError(f"t={t} outside [0, {T}]")
    if t == 0.0 or t == T:
        return 0.0
    inner = math.sin(math.pi * t / (2.0 * T)) ** 2
    return (math.pi**2 / (4.0 * T)) * math.sin(math.pi * inner) * math.sin(math.pi * t / T)


def lcd_alpha(model: IsingModel, lam: float) -> np.ndarray:
    """Per-qubit Y coefficients of the local CD ansatz at interpolation lam.

    alpha_i = hx h_i / (2 [hx^2 (1-lam)^2 + lam^2 (h_i^2 + 4 sum_{j!=i} J_ij^2)]),
    the exact minimizer of the local-ansatz action under the symmetric-J
    double-sum convention.  Components whose denominator vanishes (only
    possible at lam=1 with h_i and row J_i both zero) are set to 0: the
    numerator vanishes there too and no gauge direction exists.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lam={lam} outside [0, 1]")
    hx, h = model.hx, model.h
    row_j2 = (model.J**2).sum(axis=1)  # diagonal is zero, so this is sum_{j!=i}
    denom = 2.0 * (hx**2 * (1.0 - lam) ** 2 + lam**2 * (h**2 + 4.0 * row_j2))
    out = np.zeros(model.n_qubits)
    ok = denom > 0.0
    out[ok] = hx * h[ok] / denom[ok]
    return out


class AcdAction:
    """Precomputed action traces for the first-order commutator ansatz.

    With C = [H_mix, H_prob] (independent of lam) and
    K(lam) = (1-lam) [C, H_mix] + lam [C, H_prob], the action is

        S(a) = const - 2 a Tr[dH K]/2^N + a^2 Tr[K^2]/2^N,

    so the minimizer is a rational function of lam built from five scalar
    traces, all computed once per model.
    """

    def __init__(self, model: IsingModel):
        h_mix = transverse_hamiltonian(model)
        h_prob = problem_hamiltonian(model)
        c = commutator(h_mix, h_prob)
        k_mix = commutator(c, h_mix)
        k_prob = commutator(c, h_prob)
        d_h = h_prob - h_mix
        self.model = model
        self.cd_generator = 1j * c  # Hermitian: i [H_mix, H_prob]
        self._num_mix = normalized_trace_product(d_h, k_mix).real
        self._num_prob = normalized_trace_product(d_h, k_prob).real
        self._den_mm = normalized_trace_product(k_mix, k_mix).real
        self._den_mp = normalized_trace_product(k_mix, k_prob).real
        self._den_pp = normalized_trace_product(k_prob, k_prob).real

    def alpha1_flagged(self, lam: float) -> tuple[float, bool]:
        """Optimal coefficient and whether the gauge direction vanished."""
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lam={lam} outside [0, 1]")
        mu = 1.0 - lam
        num = mu * self._num_mix + lam * self._num_prob
        den = mu**2 * self._den_mm + 2.0 * lam * mu * self._den_mp + lam**2 * self._den_pp
        if den <= _DEGENERATE_TOL:
            return 0.0, True
        return num / den, False

    def alpha1(self, lam: float) -> float:
        return self.alpha1_flagged(lam)[0]


def acd_alpha1(model: IsingModel, lam: float) -> float:
    """Action-minimizing coefficient of the first-order commutator ansatz.

    Convenience wrapper; sweeps should hold an `AcdAction` and reuse it
    across lam values.
    """
    return AcdAction(model).alpha1(lam)


def cd_term(
    mode: CdMode,
    model: IsingModel,
    lam: float,
    lam_dot: float,
    acd: AcdAction | None = None,
) -> PauliSum:
    """Counterdiabatic operator lam_dot * A(lam) for the requested mode.

    Returns the empty sum for mode NONE and whenever lam_dot is exactly
    zero (the schedule endpoints).  The ACD operator is built from the
    explicit commutator [H_mix, H_prob], not from a transcribed tensor
    pattern, and is Hermitian with real coefficients by construction.
    """
    n = model.n_qubits
    if mode == CdMode.NONE or lam_dot == 0.0:
        return PauliSum.zero(n)
    if mode == CdMode.LCD:
        alphas = lcd_alpha(model, lam)
        terms = {
            ((1 << i), (1 << i)): complex(lam_dot * alphas[i])
            for i in range(n)
            if alphas[i] != 0.0
        }
        return PauliSum(n, terms)
    if mode == CdMode.ACD:
        if acd is None or acd.model is not model:
            acd = AcdAction(model)
        scale = lam_dot * acd.alpha1(lam)
        return scale * acd.cd_generator
    raise ValueError(f"unknown CD mode {mode!r}")
