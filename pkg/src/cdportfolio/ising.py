"""Ising form of a portfolio instance, plus the classical oracles.

The spin Hamiltonian is

    H_p = sum_i h_i sigma^z_i + sum_{i<j} 2 J_ij sigma^z_i sigma^z_j   (+ beta)

with J stored symmetric and zero on the diagonal; the i<j sum with factor
2 equals the full symmetric double sum, and that convention is used
everywhere (energy, CD coefficients, evolution).

Coefficients are expanded mechanically from the negated objective over the
sliced binary variables, using z_u = (1 + s_u)/2, so that for every spin
configuration

    energy(model, s) + beta_offset == -cost(spec, decode(bits(s)))

holds exactly.  A basis state |b> has sigma^z eigenvalue s_u = (-1)^{b_u},
hence binary variable z_u = 1 - b_u; `allocation_from_basis_index` applies
that complement before decoding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum
from .portfolio import ProblemSpec, decode_allocation

#: Exhaustive scans refuse above this many qubits.
BRUTE_FORCE_CAP = 20

#: Relative tolerance (floored at 1.0) for ground-state degeneracy ties.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class IsingModel:
    """Longitudinal fields h, couplings J, constant offset, transverse field."""

    n_qubits: int
    h: np.ndarray
    J: np.ndarray
    beta_offset: float
    hx: float

    def __post_init__(self) -> None:
        h = np.array(self.h, dtype=float)
        J = np.array(self.J, dtype=float)
        if h.shape != (self.n_qubits,):
            raise ValueError(f"h must have shape ({self.n_qubits},)")
        if J.shape != (self.n_qubits, self.n_qubits):
            raise ValueError(f"J must be {self.n_qubits}x{self.n_qubits}")
        if not np.array_equal(J, J.T):
            raise ValueError("J must be symmetric")
        if np.any(np.diag(J) != 0.0):
            raise ValueError("J must have an exactly zero diagonal")
        h.setflags(write=False)
        J.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", J)


@dataclass(frozen=True)
class GroundTruth:
    """Exact minimum energy, all achieving basis indices, and their count."""

    energy: float
    states: np.ndarray
    degeneracy: int


def _qubit_weights(spec: ProblemSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-qubit binary weight and owning asset index."""
    n, g = spec.n, spec.g
    weights = np.tile(2.0 ** np.arange(g), n)
    assets = np.repeat(np.arange(n), g)
    return weights, assets


def to_ising(spec: ProblemSpec) -> IsingModel:
    """Expand -cost over the sliced bits and collect spin coefficients.

    The negated objective is first written as a binary quadratic form
    z^T A z + c^T z + d (diagonal of A folded into c since z^2 = z), then
    z = (1 + s)/2 is substituted.  The expansion is mechanical, not a
    transcription of any closed-form coefficient table; see
    `printed_coefficient_delta` for the cross-check against the latter.
    """
    w, assets = _qubit_weights(spec)
    gf, b = spec.granularity, spec.b
    rho_q = spec.market.rho[np.ix_(assets, assets)]
    m_q = spec.market.m[assets]

    outer = np.outer(w, w)
    A = spec.theta_risk * rho_q * outer + spec.theta_budget * gf**2 * b**2 * outer
    c = -spec.theta_returns * m_q * w - 2.0 * spec.theta_budget * gf * b**2 * w
    d = spec.theta_budget * b**2

    c_folded = c + np.diag(A)
    A_off = A - np.diag(np.diag(A))

    J = A_off / 4.0
    h = c_folded / 2.0 + A_off.sum(axis=1) / 2.0
    beta = d + A_off.sum() / 4.0 + c_folded.sum() / 2.0
    return IsingModel(
        n_qubits=spec.n_qubits, h=h, J=J, beta_offset=float(beta), hx=spec.hx
    )


def printed_coefficient_delta(spec: ProblemSpec) -> dict[str, float]:
    """Gap between self-derived coefficients and the closed-form table.

    The closed form (J_ij = (theta_b b^2 G_f^2 + theta_v rho_ij)/4,
    h_i = (-theta_r m_i - 2 theta_b b^2 G_f)/2 + sum_j J_ij) is lifted to
    the qubit level by folding the slice weights into rho, m and the
    budget outer product.  The J table then matches the mechanical
    expansion exactly; the h table differs by a factor 2 on its coupling
    sum, which this function quantifies per instance.
    """
    w, assets = _qubit_weights(spec)
    gf, b = spec.granularity, spec.b
    outer = np.outer(w, w)
    rho_q = spec.market.rho[np.ix_(assets, assets)]
    m_q = spec.market.m[assets]

    J_table = (spec.theta_budget * b**2 * gf**2 * outer
               + spec.theta_risk * rho_q * outer) / 4.0
    h_table = (-spec.theta_returns * m_q * w
               - 2.0 * spec.theta_budget * b**2 * gf * w) / 2.0 + J_table.sum(axis=1)

    model = to_ising(spec)
    J_off = J_table - np.diag(np.diag(J_table))
    return {
        "max_dJ": float(np.max(np.abs(model.J - J_off))) if spec.n_qubits > 1 else 0.0,
        "max_dh": float(np.max(np.abs(model.h - h_table))),
    }


def energy(model: IsingModel, s: np.ndarray) -> float:
    """Classical energy of one spin configuration (beta_offset excluded)."""
    s = np.asarray(s, dtype=float)
    if s.shape != (model.n_qubits,):
        raise ValueError(f"spin configuration must have shape ({model.n_qubits},)")
    return float(model.h @ s + s @ model.J @ s)


def spins_from_indices(indices: np.ndarray, n_qubits: int) -> np.ndarray:
    """Spin matrix for basis indices: s_u = +1 for bit 0, -1 for bit 1."""
    indices = np.asarray(indices, dtype=np.int64)
    bits = (indices[:, None] >> np.arange(n_qubits)) & 1
    return 1.0 - 2.0 * bits


def energy_diagonal(model: IsingModel) -> np.ndarray:
    """Energies of all 2^N basis states, indexed by basis integer."""
    if model.n_qubits > BRUTE_FORCE_CAP:
        raise ValueError(f"exhaustive scan capped at {BRUTE_FORCE_CAP} qubits")
    S = spins_from_indices(np.arange(1 << model.n_qubits), model.n_qubits)
    return S @ model.h + np.einsum("bi,bi->b", S @ model.J, S)


def allocation_from_basis_index(index: int, n: int, g: int) -> np.ndarray:
    """Integer allocation encoded by a basis state (z_u = 1 - b_u)."""
    bits = (index >> np.arange(n * g)) & 1
    return decode_allocation(1 - bits, n, g)


def ground_states(model: IsingModel) -> GroundTruth:
    """Exact minimum over all configurations, ties within TIE_RTOL included."""
    energies = energy_diagonal(model)
    e_min = float(energies.min())
    tol = TIE_RTOL * max(1.0, abs(e_min))
    states = np.flatnonzero(energies <= e_min + tol).astype(np.int64)
    return GroundTruth(energy=e_min, states=states, degeneracy=int(states.size))


def success_probability(state, truth: GroundTruth) -> float:
    """Total probability carried by the ground-state subspace."""
    probs = state.probabilities()
    if truth.states.size and int(truth.states.max()) >= probs.size:
        raise ValueError("state dimension does not match ground truth")
    return float(probs[truth.states].sum())


def problem_hamiltonian(model: IsingModel) -> PauliSum:
    """H_p as an operator sum: h_i Z_i plus 2 J_ij Z_i Z_j (i<j)."""
    n = model.n_qubits
    terms: dict[tuple[int, int], complex] = {}
    for i in range(n):
        if model.h[i] != 0.0:
            terms[(0, 1 << i)] = complex(model.h[i])
    for i in range(n):
        for j in range(i + 1, n):
            if model.J[i, j] != 0.0:
                terms[(0, (1 << i) | (1 << j))] = complex(2.0 * model.J[i, j])
    return PauliSum(n, terms)


def transverse_hamiltonian(model: IsingModel) -> PauliSum:
    """Mixing Hamiltonian -hx * sum_i X_i."""
    n = model.n_qubits
    return PauliSum(n, {(1 << i, 0): complex(-model.hx) for i in range(n)})
