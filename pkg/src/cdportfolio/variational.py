"""QAOA and its counterdiabatic extension, with Adagrad optimization.

Layer k applies the problem unitary exp(-i gamma_k H_p), the mixer
exp(-i beta_k sum_i X_i), and — in the extended ansatz — the CD unitary
exp(-i alpha_k sum_i h_i Y_i) whose generator weights are the model's
longitudinal fields.  Parameters are stored flat, layer-major:
(gamma_1, beta_1[, alpha_1], gamma_2, ...).

All three unitaries are products of mutually commuting exponentials, so
they are applied exactly: the problem unitary as one diagonal phase
multiply over the precomputed classical energies, the mixer and the CD
unitary as per-qubit rotations.  Zero angles are skipped outright, which
makes the alpha=0 extended ansatz bitwise identical to plain QAOA.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .ising import GroundTruth, IsingModel, energy_diagonal, success_probability
from .statevec import StateVector

_ADAGRAD_EPS = 1e-8
_GRADIENT_STEP = 1e-5


@dataclass(frozen=True)
class AnsatzConfig:
    """Ansatz shape, restart protocol, and optimizer hyperparameters."""

    p: int
    mode: str = "qaoa"  # "qaoa" | "dcqaoa"
    init_range: float = math.pi / 2.0
    restarts: int = 20
    top_k: int = 10
    step_size: float = 0.1
    max_iters: int = 500
    grad_tol: float = 1e-6
    dc_position: str = "after_mixer"  # or "before_mixer"

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.mode not in ("qaoa", "dcqaoa"):
            raise ValueError(f"unknown ansatz mode {self.mode!r}")
        if not self.restarts >= self.top_k >= 1:
            raise ValueError("need restarts >= top_k >= 1")
        if self.step_size <= 0:
            raise ValueError("step size must be positive")
        if self.dc_position not in ("after_mixer", "before_mixer"):
            raise ValueError(f"unknown dc_position {self.dc_position!r}")

    @property
    def params_per_layer(self) -> int:
        return 3 if self.mode == "dcqaoa" else 2

    @property
    def n_params(self) -> int:
        return self.p * self.params_per_layer


@dataclass
class VariationalReport:
    """Outcome of one multi-restart optimization."""

    instance_id: str
    mode: str
    p: int
    best_params: np.ndarray
    best_cost: float
    best_success: float
    success_per_restart: list[float]
    cost_per_restart: list[float]
    iterations_per_restart: list[int]
    topk_mean: float
    topk_std: float
    seed: int | None = None
    elapsed_seconds: float = 0.0
    config: dict = field(default_factory=dict)

    def to_row(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "mode": self.mode,
            "p": self.p,
            "best_params": [float(v) for v in self.best_params],
            "best_cost": self.best_cost,
            "best_success": self.best_success,
            "success_per_restart": self.success_per_restart,
            "topk_mean": self.topk_mean,
            "topk_std": self.topk_std,
            "seed": self.seed,
            "elapsed_seconds": self.elapsed_seconds,
            "config": self.config,
        }


def _apply_single_qubit_rotation(
    amps: np.ndarray, qubit: int, n_qubits: int, theta: float, pauli: str
) -> np.ndarray:
    """exp(-i theta X_q) or exp(-i theta Y_q), applied exactly."""
    if theta == 0.0:
        return amps
    view = amps.reshape(1 << (n_qubits - qubit - 1), 2, 1 << qubit)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    c, s = math.cos(theta), math.sin(theta)
    if pauli == "X":
        view[:, 0, :] = c * a - 1j * s * b
        view[:, 1, :] = c * b - 1j * s * a
    else:  # exp(-i theta Y) is the real rotation [[c, -s], [s, c]]
        view[:, 0, :] = c * a - s * b
        view[:, 1, :] = c * b + s * a
    return amps


def _ansatz_amplitudes(
    model: IsingModel, params: np.ndarray, config: AnsatzConfig, diag: np.ndarray
) -> np.ndarray:
    n = model.n_qubits
    amps = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=np.complex128)
    stride = config.params_per_layer
    for layer in range(config.p):
        gamma = float(params[layer * stride])
        beta = float(params[layer * stride + 1])
        alpha = float(params[layer * stride + 2]) if stride == 3 else 0.0
        if gamma != 0.0:
            amps *= np.exp(-1j * gamma * diag)
        if stride == 3 and config.dc_position == "before_mixer" and alpha != 0.0:
            for q in range(n):
                _apply_single_qubit_rotation(amps, q, n, alpha * float(model.h[q]), "Y")
        for q in range(n):
            _apply_single_qubit_rotation(amps, q, n, beta, "X")
        if stride == 3 and config.dc_position == "after_mixer" and alpha != 0.0:
            for q in range(n):
                _apply_single_qubit_rotation(amps, q, n, alpha * float(model.h[q]), "Y")
    return amps


def ansatz_state(
    model: IsingModel, params: np.ndarray, config: AnsatzConfig
) -> StateVector:
    """Exact ansatz state from the uniform superposition."""
    params = np.asarray(params, dtype=float)
    if params.shape != (config.n_params,):
        raise ValueError(
            f"expected {config.n_params} parameters, got shape {params.shape}"
        )
    diag = energy_diagonal(model)
    return StateVector(_ansatz_amplitudes(model, params, config, diag))


def cost(model: IsingModel, params: np.ndarray, config: AnsatzConfig) -> float:
    """Expectation of the problem Hamiltonian (offset excluded)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (config.n_params,):
        raise ValueError(
            f"expected {config.n_params} parameters, got shape {params.shape}"
        )
    diag = energy_diagonal(model)
    amps = _ansatz_amplitudes(model, params, config, diag)
    return float((np.abs(amps) ** 2) @ diag)


def _cost_with_diag(
    model: IsingModel, params: np.ndarray, config: AnsatzConfig, diag: np.ndarray
) -> float:
    amps = _ansatz_amplitudes(model, params, config, diag)
    return float((np.abs(amps) ** 2) @ diag)


def gradient(
    model: IsingModel,
    params: np.ndarray,
    config: AnsatzConfig,
    step: float = _GRADIENT_STEP,
) -> np.ndarray:
    """Central finite-difference gradient of the cost."""
    params = np.asarray(params, dtype=float)
    diag = energy_diagonal(model)
    return _gradient_with_diag(model, params, config, diag, step)


def _gradient_with_diag(
    model: IsingModel,
    params: np.ndarray,
    config: AnsatzConfig,
    diag: np.ndarray,
    step: float = _GRADIENT_STEP,
) -> np.ndarray:
    grad = np.zeros_like(params)
    probe = params.copy()
    for i in range(params.size):
        probe[i] = params[i] + step
        up = _cost_with_diag(model, probe, config, diag)
        probe[i] = params[i] - step
        down = _cost_with_diag(model, probe, config, diag)
        probe[i] = params[i]
        grad[i] = (up - down) / (2.0 * step)
    return grad


def _adagrad(
    model: IsingModel,
    params0: np.ndarray,
    config: AnsatzConfig,
    diag: np.ndarray,
) -> tuple[np.ndarray, int]:
    """Adagrad descent from one initial point; returns (params, iterations)."""
    params = params0.copy()
    accumulator = np.zeros_like(params)
    for iteration in range(config.max_iters):
        grad = _gradient_with_diag(model, params, config, diag)
        if float(np.linalg.norm(grad)) < config.grad_tol:
            return params, iteration
        accumulator += grad**2
        params -= config.step_size * grad / (np.sqrt(accumulator) + _ADAGRAD_EPS)
    return params, config.max_iters


def optimize(
    model: IsingModel,
    truth: GroundTruth,
    config: AnsatzConfig,
    seed: int,
    instance_id: str = "",
) -> VariationalReport:
    """Multi-restart Adagrad optimization ranked by success probability.

    Restart r draws its initial parameters from a generator seeded by
    (seed, r), so adding restarts never perturbs earlier ones.
    """
    start = time.perf_counter()
    diag = energy_diagonal(model)
    successes: list[float] = []
    costs: list[float] = []
    iters: list[int] = []
    best_params: list[np.ndarray] = []
    for restart in range(config.restarts):
        rng = np.random.default_rng(np.random.SeedSequence((seed, restart)))
        params0 = rng.uniform(-config.init_range, config.init_range, config.n_params)
        params, n_iter = _adagrad(model, params0, config, diag)
        amps = _ansatz_amplitudes(model, params, config, diag)
        probs = np.abs(amps) ** 2
        successes.append(float(probs[truth.states].sum()))
        costs.append(float(probs @ diag))
        iters.append(n_iter)
        best_params.append(params)

    order = sorted(range(config.restarts), key=lambda r: -successes[r])
    top = [successes[r] for r in order[: config.top_k]]
    best = order[0]
    return VariationalReport(
        instance_id=instance_id,
        mode=config.mode,
        p=config.p,
        best_params=best_params[best],
        best_cost=costs[best],
        best_success=successes[best],
        success_per_restart=successes,
        cost_per_restart=costs,
        iterations_per_restart=iters,
        topk_mean=float(np.mean(top)),
        topk_std=float(np.std(top)),
        seed=seed,
        elapsed_seconds=time.perf_counter() - start,
        config=asdict(config),
    )
