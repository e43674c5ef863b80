import numpy as np
import pytest

import oracles as O
from greenfix.hypothesis import assess
from greenfix.kernel import make_kernel
from greenfix.seqspace import LpParams, TruncatedState, sup_norm
from greenfix.solver import SolverConfig, apply_operator, solve
from greenfix.systems import constant_forcing, load_system, paper_example, zero_system
from greenfix.verifier import (contraction_margins, equicontinuity_probe, mnc_contraction_check,
                               operator_bound_check, random_ball_states, residual_analytic,
                               residual_fd, verify)

P2 = LpParams(2.0)


def solved_constant(M, T=2.0):
    cfg = SolverConfig(J=1, M=M)
    kernel = make_kernel(T)
    return solve(constant_forcing(), kernel, cfg), kernel, cfg


@pytest.fixture(scope="module")
def example_t1():
    kernel, cfg = make_kernel(1.0), SolverConfig(J=15, M=201)
    rep = assess(paper_example(), 1.0, P2)
    res = solve(paper_example(), kernel, cfg, P2, radius=rep.r)
    return kernel, cfg, rep, res


class TestResiduals:
    def test_zero(self):
        cfg = SolverConfig(J=3, M=21)
        state = TruncatedState.zeros(cfg.mesh(1.0), 3)
        assert residual_fd(state, zero_system()).max_residual == 0.0
        assert residual_analytic(state, zero_system(), make_kernel(1.0), cfg).max_residual == 0.0

    def test_constant_forcing(self):
        res, kernel, cfg = solved_constant(401)
        fd = residual_fd(res, constant_forcing())
        an = residual_analytic(res.state, constant_forcing(), kernel, cfg)
        assert fd.max_residual <= 1e-3
        assert an.max_residual <= 1e-8
        assert an.max_residual <= fd.max_residual
        assert fd.boundary_max == 0.0

    def test_example_state(self, example_t1):
        kernel, cfg, _, res = example_t1
        fd = residual_fd(res.state, paper_example())
        an = residual_analytic(res.state, paper_example(), kernel, cfg)
        assert fd.max_residual <= 1e-3 and fd.boundary_max <= 1e-14
        assert an.max_residual <= fd.max_residual

    @pytest.mark.parametrize("check, order", [("fd", 1.8), ("analytic", 3.5)])
    def test_refinement_order(self, check, order):
        vals = []
        for M in (51, 101, 201):
            res, kernel, cfg = solved_constant(M)
            if check == "fd":
                vals.append(residual_fd(res.state, constant_forcing()).max_residual)
            else:
                vals.append(residual_analytic(res.state, constant_forcing(), kernel, cfg).max_residual)
        rates = np.log2(np.array(vals[:-1]) / np.array(vals[1:]))
        assert np.all(rates >= order), rates

    def test_location_of_injected_fault(self):
        res, kernel, cfg = solved_constant(201)
        vals = res.state.values.copy()
        vals[0, 77] += 0.1
        bad = TruncatedState(res.state.mesh, vals)
        fd = residual_fd(bad, constant_forcing())
        an = residual_analytic(bad, constant_forcing(), kernel, cfg)
        assert fd.location[:2] == (1, 77)
        assert an.location[:2] == (1, 77)
        assert fd.location[2] == pytest.approx(res.state.mesh[77])


class TestOperatorBound:
    @pytest.mark.parametrize("T", [0.5, 1.0])
    def test_random_states(self, T):
        rep = assess(paper_example(), T, P2)
        kernel, cfg = make_kernel(T), SolverConfig(J=15, M=101)
        out = operator_bound_check(paper_example(), kernel, cfg, P2, rep.G_majorant, rep.H, rep.r,
                                   n_states=15, seed=3)
        assert out.passed and out.n_states == 15
        assert out.worst_norm_margin >= -1e-6 and out.worst_ball_margin >= -1e-6

    def test_ball_states_respect_radius(self):
        rng = np.random.default_rng(0)
        mesh = np.linspace(0, 1, 41)
        for s in random_ball_states(rng, mesh, 12, 0.7, P2, count=30):
            assert sup_norm(s, P2) <= 0.7 * (1 + 1e-12)

    def test_violation_detected(self):
        """A too-small G makes the bound fail for the example."""
        kernel, cfg = make_kernel(1.0), SolverConfig(J=10, M=51)
        out = operator_bound_check(paper_example(), kernel, cfg, P2, 0.0, 0.0, 0.7378, n_states=5)
        assert not out.passed and out.worst_norm_margin < 0


class TestContraction:
    def test_zero_family_reduces_to_g_tail(self):
        kernel, cfg = make_kernel(1.0), SolverConfig(J=15, M=101)
        spec = paper_example()
        fam = [TruncatedState.zeros(cfg.mesh(1.0), 15)]
        margins = contraction_margins(spec, kernel, cfg, P2, fam, 123.0, [1, 5, 15])
        image = apply_operator(spec, kernel, fam[0], cfg).values
        for n, m in zip([1, 5, 15], margins):
            lhs = np.max(np.sum(image[n - 1:] ** 2, axis=0))
            assert m == pytest.approx(O.SCALE_SQ_T1 * spec.g_tail_bound(n, 1.0) - lhs, rel=1e-12, abs=1e-18)

    def test_first_cutoff_uses_g_majorant(self):
        spec = paper_example()
        assert spec.g_tail_bound(1, 1.0) <= 6.967438 + 1e-6

    @pytest.mark.parametrize("c", [0.25, 0.5, 1.0])
    def test_scaled_families(self, c):
        rep = assess(paper_example(), 1.0, P2)
        out = mnc_contraction_check(paper_example(), make_kernel(1.0), SolverConfig(J=15, M=101), P2,
                                    rep.H, c * rep.r, family_size=6, n_families=3, seed=5)
        assert out.passed and len(out.margins) == 3 and len(out.margins[0]) == 15

    def test_thread_count_irrelevant(self):
        rep = assess(paper_example(), 1.0, P2)
        args = (paper_example(), make_kernel(1.0), SolverConfig(J=15, M=101), P2, rep.H, rep.r)
        a = mnc_contraction_check(*args, family_size=5, n_families=4, seed=9, threads=1)
        b = mnc_contraction_check(*args, family_size=5, n_families=4, seed=9, threads=4)
        assert a.margins == b.margins


class TestEquicontinuity:
    def test_identical_pairs(self):
        out = equicontinuity_probe(paper_example(), make_kernel(1.0), SolverConfig(J=6, M=41), P2,
                                   eps_list=(0.0,), n_pairs=3)
        assert out.modulus == [0.0]

    def test_example_monotone(self):
        out = equicontinuity_probe(paper_example(), make_kernel(1.0), SolverConfig(J=10, M=51), P2,
                                   eps_list=(0.2, 0.1, 0.05, 0.025))
        assert out.monotone and out.modulus[-1] < out.modulus[0]

    def test_affine_ratio_stable(self):
        spec = load_system({
            "system": {"coeffs": {"a": {"1": [1.0]}, "b": {"1": {"2": [0.5]}, "2": {"1": [-0.3, 0.2]}}},
                       "envelopes": {"g": {"1": [2.0], "2": [0.1]}}},
            "T": 1.0, "J": 2,
        })
        out = equicontinuity_probe(spec, make_kernel(1.0), SolverConfig(J=2, M=41), P2,
                                   eps_list=(1e-1, 1e-2, 1e-3, 1e-4))
        ratios = np.array(out.ratios)
        assert np.all(ratios > 0)
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-6)

    def test_thread_count_irrelevant(self):
        args = (paper_example(), make_kernel(1.0), SolverConfig(J=8, M=41), P2)
        assert equicontinuity_probe(*args, threads=1) == equicontinuity_probe(*args, threads=3)


class TestVerify:
    def test_solved_example_passes(self, example_t1):
        kernel, cfg, rep, res = example_t1
        vr = verify(paper_example(), kernel, cfg, P2, res.state, rep, seed=0)
        assert vr.passed, vr.failures
        js = vr.to_json()
        assert js["passed"] and js["ball_invariance"]["state_in_ball"]

    def test_zero_state_fails_on_example(self, example_t1):
        kernel, cfg, rep, _ = example_t1
        vr = verify(paper_example(), kernel, cfg, P2, TruncatedState.zeros(cfg.mesh(1.0), 15), rep)
        assert not vr.passed
        assert any("residual_fd" in f for f in vr.failures)

    def test_deterministic_across_threads(self, example_t1):
        kernel, cfg, rep, res = example_t1
        a = verify(paper_example(), kernel, cfg, P2, res.state, rep, seed=2, threads=1).to_json()
        b = verify(paper_example(), kernel, cfg, P2, res.state, rep, seed=2, threads=4).to_json()
        assert a == b
