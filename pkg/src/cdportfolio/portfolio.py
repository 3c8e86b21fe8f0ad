"""Discrete mean-variance portfolio instances and their binary encoding.

An instance allocates an integer number of budget slices to each of ``n``
assets.  The maximized objective is

    theta_r * sum_i m_i x_i
  - theta_v * sum_ij rho_ij x_i x_j
  - theta_b * (G_f * b * sum_i x_i - b)^2

with granularity ``G_f = 1 / 2^(g-1)`` and allocations ``x_i`` in
``[0, 2^g - 1]``.  The three Lagrange weights are supplied as
``(theta1, theta2, theta3)`` and resolved to roles internally as
``theta_r = theta1`` (returns), ``theta_b = theta2`` (budget penalty),
``theta_v = theta3`` (risk): the budget weight is the one documented as
dominant, which pins the assignment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

#: Largest total qubit count the exact simulator accepts by default.
DEFAULT_QUBIT_CAP = 20


@dataclass(frozen=True)
class GenParams:
    """Market generator configuration (all scales must be positive).

    Returns are drawn uniformly from (0, m_high).  The covariance is a
    random factor model s^2 * (F F^T + diag(d)) with F standard normal of
    shape (n, max(1, n // 2)) and d_i ~ U(d_low, d_high); s^2 is fixed so
    the mean diagonal equals mean_variance.
    """

    m_high: float = 0.01
    d_low: float = 0.5
    d_high: float = 1.5
    mean_variance: float = 1e-4

    def __post_init__(self) -> None:
        if self.m_high <= 0 or self.d_low <= 0 or self.mean_variance <= 0:
            raise ValueError("generation scales must be positive")
        if self.d_high < self.d_low:
            raise ValueError("d_high must be >= d_low")


@dataclass(frozen=True)
class MarketData:
    """Mean daily returns and return covariance for ``n`` assets."""

    n: int
    m: np.ndarray
    rho: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=float)
        rho = np.array(self.rho, dtype=float)
        if m.shape != (self.n,):
            raise ValueError(f"m must have shape ({self.n},)")
        if rho.shape != (self.n, self.n):
            raise ValueError(f"rho must have shape ({self.n}, {self.n})")
        if not np.array_equal(rho, rho.T):
            raise ValueError("rho must be symmetric")
        m.setflags(write=False)
        rho.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "rho", rho)


def generate_instance(
    n: int, seed: int, gen_params: GenParams = GenParams()
) -> MarketData:
    """Random market data, a deterministic function of (n, seed, gen_params).

    The covariance is s^2 * (F F^T + diag(d)), positive semidefinite by
    construction, with low positive drifts mimicking daily equity data.
    """
    if n < 1:
        raise ValueError("need at least one asset")
    rng = np.random.default_rng(seed)
    m = rng.uniform(0.0, gen_params.m_high, size=n)
    rank = max(1, n // 2)
    factors = rng.standard_normal((n, rank))
    d = rng.uniform(gen_params.d_low, gen_params.d_high, size=n)
    raw = factors @ factors.T + np.diag(d)
    raw = (raw + raw.T) / 2.0  # exact symmetry despite float noise
    scale = gen_params.mean_variance / np.mean(np.diag(raw))
    return MarketData(n=n, m=m, rho=scale * raw)


@dataclass(frozen=True)
class ProblemSpec:
    """Full input of one optimization instance."""

    market: MarketData
    b: float
    g: int
    theta1: float
    theta2: float
    theta3: float
    hx: float = 1.0
    qubit_cap: int = DEFAULT_QUBIT_CAP

    def __post_init__(self) -> None:
        if self.g < 1:
            raise ValueError("g must be at least 1")
        if self.n_qubits > self.qubit_cap:
            raise ValueError(
                f"N = n*g = {self.n_qubits} exceeds the qubit cap {self.qubit_cap}"
            )
        if self.hx <= 0:
            raise ValueError("hx must be positive")

    @property
    def n(self) -> int:
        return self.market.n

    @property
    def n_qubits(self) -> int:
        return self.market.n * self.g

    @property
    def granularity(self) -> float:
        """Smallest investable budget fraction, 1 / 2^(g-1)."""
        return 1.0 / (1 << (self.g - 1))

    @property
    def theta_returns(self) -> float:
        return self.theta1

    @property
    def theta_risk(self) -> float:
        return self.theta3

    @property
    def theta_budget(self) -> float:
        return self.theta2

    @property
    def max_slices(self) -> int:
        return (1 << self.g) - 1


def cost(spec: ProblemSpec, x: np.ndarray) -> float:
    """Value of the maximized objective at an integer allocation."""
    x = np.asarray(x)
    if x.shape != (spec.n,):
        raise ValueError(f"allocation must have shape ({spec.n},)")
    if np.any(x < 0) or np.any(x > spec.max_slices):
        raise ValueError(f"allocation entries must lie in [0, {spec.max_slices}]")
    xf = x.astype(float)
    returns = spec.theta_returns * float(spec.market.m @ xf)
    risk = spec.theta_risk * float(xf @ spec.market.rho @ xf)
    budget = spec.theta_budget * (spec.granularity * spec.b * xf.sum() - spec.b) ** 2
    return returns - risk - budget


def qubit_index(asset: int, slice_bit: int, g: int) -> int:
    """Qubit carrying weight 2^slice_bit of asset's allocation (0-based)."""
    return asset * g + slice_bit


def encode_allocation(x: np.ndarray, g: int) -> np.ndarray:
    """Binary slicing: bit array of length n*g, slice k weighing 2^k."""
    x = np.asarray(x)
    n = x.shape[0]
    bits = np.zeros(n * g, dtype=np.uint8)
    for i in range(n):
        xi = int(x[i])
        if not 0 <= xi < (1 << g):
            raise ValueError(f"allocation {xi} out of range for g={g}")
        for k in range(g):
            bits[qubit_index(i, k, g)] = (xi >> k) & 1
    return bits


def decode_allocation(bits: np.ndarray, n: int, g: int) -> np.ndarray:
    """Inverse of encode_allocation."""
    bits = np.asarray(bits)
    if bits.shape != (n * g,):
        raise ValueError(f"bit array must have shape ({n * g},)")
    x = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for k in range(g):
            x[i] |= int(bits[qubit_index(i, k, g)]) << k
    return x


def save_instance(spec: ProblemSpec, path: str | Path, seed: int | None = None,
                  gen_params: GenParams | None = None) -> None:
    """Write the JSON instance file (floats round-trip bit-exactly)."""
    payload = {
        "n": spec.n,
        "g": spec.g,
        "b": spec.b,
        "theta1": spec.theta1,
        "theta2": spec.theta2,
        "theta3": spec.theta3,
        "hx": spec.hx,
        "m": spec.market.m.tolist(),
        "rho": spec.market.rho.tolist(),
        "seed": seed,
        "gen_params": asdict(gen_params) if gen_params is not None else None,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_instance(path: str | Path) -> tuple[ProblemSpec, dict]:
    """Read a JSON instance file; returns the spec and the raw payload."""
    payload = json.loads(Path(path).read_text())
    market = MarketData(
        n=int(payload["n"]),
        m=np.array(payload["m"], dtype=float),
        rho=np.array(payload["rho"], dtype=float),
    )
    spec = ProblemSpec(
        market=market,
        b=float(payload["b"]),
        g=int(payload["g"]),
        theta1=float(payload["theta1"]),
        theta2=float(payload["theta2"]),
        theta3=float(payload["theta3"]),
        hx=float(payload["hx"]),
    )
    return spec, payload
