import numpy as np
import pytest
from scipy.linalg import expm

from cdportfolio.evolve import (
    RunReport,
    build_term_plan,
    enhancement_metrics,
    evolve,
    exact_evolve_reference,
)
from cdportfolio.ising import (
    IsingModel,
    ground_states,
    problem_hamiltonian,
    to_ising,
)
from cdportfolio.portfolio import ProblemSpec, generate_instance
from cdportfolio.schedule import CdMode, Schedule, lambda_, lambda_dot
from cdportfolio.statevec import StateVector

PAPER_THETAS = dict(theta1=0.3, theta2=0.5, theta3=0.2)


def make_model(n=3, g=2, seed=5):
    spec = ProblemSpec(market=generate_instance(n, seed), b=1.0, g=g, **PAPER_THETAS)
    return to_ising(spec)


def infidelity(a: StateVector, b: StateVector) -> float:
    return 1.0 - abs(np.vdot(a.amps, b.amps)) ** 2


def make_report(p, instance="i0", mode="lcd"):
    return RunReport(
        instance_id=instance, cd_mode=mode, n_qubits=2, T=1.0, M=20, dt=0.05,
        success_probability=p, final_energy=0.0, ground_energy=0.0, degeneracy=1,
    )


class TestTermPlan:
    def test_ordering_and_kinds(self):
        model = make_model(n=2, g=1, seed=1)
        plan = build_term_plan(model, CdMode.ACD)
        kinds = [kind for kind, _, _ in plan.terms]
        # fields first, then couplings, then CD terms by ascending weight
        assert kinds == ["x_field", "x_field", "z_field", "z_field",
                         "zz_coupling", "cd_y", "cd_y", "cd_yz", "cd_yz"]

    def test_cd_coefficients_vanish_at_boundaries(self):
        model = make_model(n=2, g=2, seed=3)
        for mode in (CdMode.LCD, CdMode.ACD):
            plan = build_term_plan(model, mode)
            for t in (0.0, 1.0):
                lam, ld = lambda_(t, 1.0), lambda_dot(t, 1.0)
                for kind, _, coeff_fn in plan.terms:
                    if kind.startswith("cd_"):
                        assert coeff_fn(lam, ld) == 0.0

    def test_x_field_vanishes_at_end(self):
        model = make_model(n=2, g=1, seed=1)
        plan = build_term_plan(model, CdMode.NONE)
        for kind, _, coeff_fn in plan.terms:
            value = coeff_fn(1.0, 0.0)
            if kind == "x_field":
                assert value == 0.0
            elif kind == "z_field":
                assert value != 0.0


class TestEvolve:
    def test_vanishing_evolution_stays_uniform(self):
        model = make_model(n=2, g=2, seed=5)
        truth = ground_states(model)
        report = evolve(model, truth, Schedule(T=1e-6, M=1), CdMode.NONE)
        expected = truth.degeneracy / (1 << model.n_qubits)
        assert report.success_probability == pytest.approx(expected, rel=0.05)

    def test_commuting_diagonal_terms_have_no_splitting_error(self):
        # with the schedule frozen at lam=1 only Z/ZZ terms act, all
        # commuting, so one digital step equals the dense exponential
        model = make_model(n=3, g=1, seed=9)
        plan = build_term_plan(model, CdMode.NONE)
        dt = 0.31
        state = StateVector.uniform_superposition(3)
        for _, string, coeff_fn in plan.terms:
            theta = dt * coeff_fn(1.0, 0.0)
            if theta != 0.0:
                state.apply_pauli_exp(string, theta)
        dense = expm(-1j * dt * problem_hamiltonian(model).to_dense())
        expected = dense @ StateVector.uniform_superposition(3).amps
        assert np.max(np.abs(state.amps - expected)) < 1e-10

    def test_norm_preserved_over_full_evolution(self):
        model = make_model(n=3, g=2, seed=5)
        truth = ground_states(model)
        for mode in (CdMode.NONE, CdMode.LCD, CdMode.ACD):
            report = evolve(model, truth, Schedule(T=1.0, M=20), mode)
            assert report.norm_error < 1e-9

    def test_deterministic(self):
        model = make_model(n=2, g=2, seed=8)
        truth = ground_states(model)
        r1 = evolve(model, truth, Schedule(T=1.0, M=20), CdMode.LCD)
        r2 = evolve(model, truth, Schedule(T=1.0, M=20), CdMode.LCD)
        assert r1.success_probability == r2.success_probability
        assert r1.final_energy == r2.final_energy

    def test_relabeling_invariance_without_cd(self):
        rng = np.random.default_rng(21)
        model = make_model(n=3, g=1, seed=13)
        perm = rng.permutation(model.n_qubits)
        permuted = IsingModel(
            n_qubits=model.n_qubits,
            h=model.h[perm],
            J=model.J[np.ix_(perm, perm)],
            beta_offset=model.beta_offset,
            hx=model.hx,
        )
        sched = Schedule(T=1.0, M=10)
        p1 = evolve(model, ground_states(model), sched, CdMode.NONE)
        p2 = evolve(permuted, ground_states(permuted), sched, CdMode.NONE)
        assert p1.success_probability == pytest.approx(
            p2.success_probability, abs=1e-12
        )

    def test_report_row_fields(self):
        model = make_model(n=2, g=1, seed=2)
        truth = ground_states(model)
        row = evolve(model, truth, Schedule(T=1.0, M=20), CdMode.ACD,
                     instance_id="abc", seed=99).to_row()
        assert row["instance_id"] == "abc"
        assert row["mode"] == "acd"
        assert row["M"] == 20 and row["seed"] == 99
        assert 0.0 <= row["P"] <= 1.0


class TestReferenceEvolution:
    def test_error_ratio_under_step_halving(self):
        # infidelity against the 64x-fine reference drops ~4x per halving
        model = make_model(n=3, g=2, seed=5)
        errors = []
        for M in (20, 40):
            sched = Schedule(T=1.0, M=M)
            plan = build_term_plan(model, CdMode.NONE)
            state = StateVector.uniform_superposition(model.n_qubits)
            from cdportfolio.evolve import _run_steps

            _run_steps(state, plan, sched.T, sched.M, sched.dt)
            errors.append(infidelity(exact_evolve_reference(model, sched, CdMode.NONE), state))
        assert errors[0] / errors[1] >= 3.5

    def test_fine_step_fidelity(self):
        model = make_model(n=4, g=1, seed=17)
        truth = ground_states(model)
        sched = Schedule(T=1.0, M=80)  # dt = 0.0125
        for mode in (CdMode.NONE, CdMode.LCD):
            ref = exact_evolve_reference(model, sched, mode)
            report = evolve(model, truth, sched, mode)
            plan = build_term_plan(model, mode)
            state = StateVector.uniform_superposition(model.n_qubits)
            from cdportfolio.evolve import _run_steps

            _run_steps(state, plan, sched.T, sched.M, sched.dt)
            fidelity = abs(np.vdot(ref.amps, state.amps))
            assert fidelity >= 0.99
            assert report.norm_error < 1e-9

    def test_qubit_cap(self):
        model = IsingModel(n_qubits=11, h=np.zeros(11), J=np.zeros((11, 11)),
                           beta_offset=0.0, hx=1.0)
        with pytest.raises(ValueError, match="capped"):
            exact_evolve_reference(model, Schedule(T=1.0, M=2), CdMode.NONE)


class TestEnhancementMetrics:
    def test_equal_probabilities_not_enhanced(self):
        cd = [make_report(0.2), make_report(0.4)]
        plain = [make_report(0.2, mode="none"), make_report(0.4, mode="none")]
        stats = enhancement_metrics(cd, plain)
        assert stats.p_enh == (1.0, 1.0)
        assert stats.r_enh == 0.0
        assert stats.mean == pytest.approx(1.0)

    def test_all_enhanced(self):
        cd = [make_report(0.4), make_report(0.9)]
        plain = [make_report(0.2, mode="none"), make_report(0.3, mode="none")]
        stats = enhancement_metrics(cd, plain)
        assert stats.r_enh == 1.0
        assert stats.mean == pytest.approx((2.0 + 3.0) / 2)

    def test_zero_baseline_flagged_and_excluded(self):
        cd = [make_report(0.4), make_report(0.5)]
        plain = [make_report(0.0, mode="none"), make_report(0.25, mode="none")]
        stats = enhancement_metrics(cd, plain)
        assert stats.p_enh[0] is None
        assert stats.n_defined == 1
        assert stats.mean == pytest.approx(2.0)
        assert stats.r_enh == 1.0  # undefined pair counts as enhanced (P > 0)

    def test_zero_baseline_zero_cd_not_enhanced(self):
        stats = enhancement_metrics(
            [make_report(0.0)], [make_report(0.0, mode="none")]
        )
        assert stats.r_enh == 0.0 and stats.n_defined == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="equal length"):
            enhancement_metrics([make_report(0.1)], [])


class TestEnhancementBehavior:
    def test_lcd_enhances_unsliced_wide_instances(self):
        # the local ansatz shines at g=1 with many assets; small-n unsliced
        # problems are a different regime where it can lose to the baseline
        sched = Schedule(T=1.0, M=20)
        wins = 0
        for seed in range(4):
            model = make_model(n=12, g=1, seed=300 + seed)
            truth = ground_states(model)
            p0 = evolve(model, truth, sched, CdMode.NONE).success_probability
            p1 = evolve(model, truth, sched, CdMode.LCD).success_probability
            wins += p1 > p0
        assert wins == 4

    def test_acd_enhances_sliced_instances(self):
        sched = Schedule(T=1.0, M=20)
        wins = 0
        for seed in range(6):
            model = make_model(n=3, g=2, seed=400 + seed)
            truth = ground_states(model)
            p0 = evolve(model, truth, sched, CdMode.NONE).success_probability
            p2 = evolve(model, truth, sched, CdMode.ACD).success_probability
            wins += p2 > p0
        assert wins >= 5
