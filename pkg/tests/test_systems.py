import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greenfix.errors import ComponentOutOfRange, EnvelopeViolation, MalformedConfig, UnknownSystem
from greenfix.seqspace import LpParams
from greenfix.systems import (PI2_E_12, SystemSpec, constant_forcing, envelope_check, eval_f,
                              load_system, paper_example, sample_ball, zero_system)

P2 = LpParams(2.0)


def brute_example_f(n, t, v):
    """Term-by-term evaluation of the example right-hand side (independent of the matrix form)."""
    total = t * 3.0 ** (-n * t) / n
    for k in range(n, len(v) + 1):
        vk = v[k - 1]
        total += np.cos(t) * vk * (1 - (k - n) * vk) / (
            (1 + 2 * n) * np.sqrt(float(np.prod(np.arange(1, k), dtype=float))) * (k - n + 1)
        )
    return total


class TestPaperExample:
    spec = paper_example()

    def test_zero_state(self):
        v = np.zeros(10)
        for n in (1, 3, 7):
            assert eval_f(self.spec, n, 0.6, v) == pytest.approx(0.6 * 3.0 ** (-n * 0.6) / n, abs=1e-16)

    def test_f1_at_one(self):
        assert eval_f(self.spec, 1, 1.0, np.zeros(5)) == pytest.approx(1.0 / 3.0, abs=1e-16)

    def test_cos_zero_kills_series(self):
        v = np.random.default_rng(0).normal(size=8)
        t = np.pi / 2
        assert eval_f(self.spec, 1, t, v) == pytest.approx(t * 3.0 ** (-t), abs=1e-15)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = rng.normal(scale=0.3, size=12)
            t = rng.uniform(0, 2)
            for n in range(1, 13):
                assert eval_f(self.spec, n, t, v) == pytest.approx(brute_example_f(n, t, v), rel=1e-13, abs=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ComponentOutOfRange):
            eval_f(self.spec, 6, 0.1, np.zeros(5))
        with pytest.raises(ComponentOutOfRange):
            eval_f(self.spec, 0, 0.1, np.zeros(5))

    def test_h_equibounded(self):
        ts = np.linspace(0, 2, 401)
        h = self.spec.h_matrix(40, ts)
        n = np.arange(1, 41)[:, None]
        assert np.all(h <= 2 * np.e / (1 + 2 * n) ** 2 + 1e-16)
        assert h[0, 0] == pytest.approx(2 * np.e / 9, abs=1e-16)

    @pytest.mark.parametrize("T", [0.5, 1.0, 1.5, 2.0])
    def test_weierstrass_majorant(self, T):
        ts = np.linspace(0, T, 301)
        majorant = (2 * T**2 + PI2_E_12) * np.pi**2 / 6
        for J in (1, 5, 50, 400):
            assert np.max(np.sum(self.spec.g_matrix(J, ts), axis=0)) <= majorant

    @pytest.mark.parametrize("n", [1, 2, 5, 16])
    @pytest.mark.parametrize("T", [0.5, 1.0, 2.0])
    def test_g_tail_bound_dominates_partial_sums(self, n, T):
        ts = np.linspace(0, T, 2001)
        g = self.spec.g_matrix(3000, ts)[n - 1:]
        assert np.max(np.sum(g, axis=0)) <= self.spec.g_tail_bound(n, T)

    def test_g_tail_bound_decreasing(self):
        vals = [self.spec.g_tail_bound(n, 1.0) for n in range(1, 30)]
        assert np.all(np.diff(vals) < 0)

    def test_truncation_honesty(self):
        rng = np.random.default_rng(7)
        for J in (3, 6, 10, 15):
            for _ in range(30):
                v = sample_ball(rng, 2 * J, 0.74, P2)
                ts = rng.uniform(0, 2, size=4)
                short = self.spec.f_matrix(ts, np.tile(v[:J, None], (1, 4)))
                long = self.spec.f_matrix(ts, np.tile(v[:, None], (1, 4)))[:J]
                bound = self.spec.component_tail_bound(J, ts, np.max(np.abs(v[J:])))
                assert np.all(np.abs(long - short) <= bound + 1e-17)

    def test_envelope_at_zero_has_slack(self):
        ts = np.linspace(0, 2, 41)
        samples = [(t, np.zeros(8)) for t in ts]
        report = envelope_check(self.spec, samples, P2)
        assert report.ok
        # g_n contains twice the forcing square
        f = self.spec.f_matrix(ts, np.zeros((8, ts.size)))
        assert np.all(f**2 * 2 <= self.spec.g_matrix(8, ts) + 1e-18)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(0, 2), frac=st.floats(0, 1))
def test_example_envelope_in_ball(seed, t, frac):
    rng = np.random.default_rng(seed)
    v = sample_ball(rng, 15, 0.7378 * frac, P2)
    assert envelope_check(paper_example(), [(t, v)], P2).ok


class TestEnvelopeCheck:
    def test_zero_system(self):
        report = envelope_check(zero_system(), [(0.3, np.ones(4)), (0.9, -np.ones(4))], P2)
        assert report.ok and report.worst_margin == 0.0

    def test_violation_reported(self):
        bad = SystemSpec(
            label="bad",
            evaluate=lambda t, V: np.ones((V.shape[0], t.size)),
            g=lambda j, t: np.zeros((np.size(j), np.size(t))),
            h=lambda j, t: np.zeros((np.size(j), np.size(t))),
            g_tail_bound=lambda n, T: 0.0,
            component_tail_bound=lambda J, t, r: np.zeros((J, np.size(t))),
        )
        report = envelope_check(bad, [(0.5, np.zeros(2))], P2)
        assert not report.ok
        assert report.worst_margin == -1.0
        assert report.violations[0][:2] == (0, 1)


class TestLoadSystem:
    def test_builtins(self):
        assert load_system({"system": "zero", "T": 1.0}).label == "zero"
        cf = load_system({"system": "constant_forcing", "T": 1.0, "J": 3})
        f = cf.f_matrix([0.2, 0.4], np.zeros((3, 2)))
        np.testing.assert_array_equal(f, [[1, 1], [0, 0], [0, 0]])
        assert load_system({"system": "paper_example", "T": 1.0}).label == "paper_example"

    def test_unknown(self):
        with pytest.raises(UnknownSystem):
            load_system({"system": "nope", "T": 1.0})

    def test_malformed(self):
        with pytest.raises(MalformedConfig):
            load_system({"T": 1.0})
        with pytest.raises(MalformedConfig):
            load_system({"system": {"coeffs": {}}, "T": 1.0})
        with pytest.raises(MalformedConfig):
            load_system({"system": {"coeffs": {"a": {"x": [1]}}, "envelopes": {}}, "T": 1.0})

    def test_coefficient_table(self):
        raw = {
            "system": {
                "label": "affine",
                "coeffs": {"a": {"1": [1.0, 0.5]}, "b": {"1": {"2": [0.2]}}, "c": {"2": {"2": [0.1]}}},
                "envelopes": {"g": {"1": [4.0, 2.0, 0.25], "2": [0.1]}, "h": {"1": [0.1], "2": [0.2]}},
            },
            "T": 1.0,
            "J": 3,
        }
        spec = load_system(raw)
        assert spec.label == "affine" and not spec.affine
        v = np.array([0.3, -0.4, 0.9])
        f = spec.f_matrix([0.5], v[:, None])[:, 0]
        np.testing.assert_allclose(f, [1.25 + 0.2 * -0.4, 0.1 * 0.16, 0.0])
        assert spec.g_tail_bound(1, 1.0) == pytest.approx(4 + 2 + 0.25 + 0.1)
        assert spec.g_tail_bound(2, 1.0) == pytest.approx(0.1)
        assert spec.H_sup(1.0) == pytest.approx(0.2)

    def test_coefficient_table_envelope_violation(self):
        raw = {
            "system": {"coeffs": {"a": {"1": [1.0]}}, "envelopes": {"g": {"1": [0.5]}}},
            "T": 1.0,
        }
        with pytest.raises(EnvelopeViolation):
            load_system(raw)

    def test_negative_envelope_rejected(self):
        raw = {"system": {"coeffs": {}, "envelopes": {"g": {"1": [-1.0]}}}, "T": 1.0}
        with pytest.raises(EnvelopeViolation):
            load_system(raw)

    def test_custom_tail_bound(self):
        raw = {
            "system": {"coeffs": {"b": {"1": {"3": [0.5]}}}, "envelopes": {"g": {}, "h": {"1": [1.0]}}},
            "T": 1.0,
            "J": 3,
        }
        spec = load_system(raw)
        tail = spec.component_tail_bound(2, np.array([0.1]), 0.4)
        np.testing.assert_allclose(tail[:, 0], [0.2, 0.0])
