import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diqgps.errors import ConfigError, DataError
from diqgps.kinematics import (SPEED_OF_LIGHT, KinematicsConfig, coordinate_interval_at_S,
                               dilated_interval_oracle, dilated_interval_paper,
                               distance_from_timestamps, kinematics_compare,
                               separation_s_between, simulate_timeline, travel_time_moving)

from oracles import photon_catch_time, proper_time

C = SPEED_OF_LIGHT


def one_ls_config(beta, times=(0.0,), c=1.0):
    """S one light-second from the source on the far side from R."""
    return KinematicsConfig(z_S0=0.0, z_R=3.0 * c, z_S_initial=-1.0 * c, v=beta * c, c=c,
                            emission_times=np.array(times))


class TestTimeline:
    def test_stationary_one_light_second(self):
        tl = simulate_timeline(one_ls_config(0.0, c=C))
        assert tl.t_detect_S[0] == pytest.approx(1.0, rel=1e-15)
        assert tl.t_detect_R[0] == pytest.approx(3.0, rel=1e-15)

    def test_half_c_travel_time(self):
        assert simulate_timeline(one_ls_config(0.5)).t_detect_S[0] == pytest.approx(2.0, rel=1e-15)

    def test_gap_two_seconds(self):
        tl = simulate_timeline(one_ls_config(0.5, times=(0.0, 1.0)))
        assert np.diff(tl.t_detect_S)[0] == pytest.approx(2.0, rel=1e-12)
        assert np.diff(tl.proper_time_S)[0] == pytest.approx(math.sqrt(3), rel=1e-12)

    def test_matches_root_finding_oracle(self):
        gen = np.random.default_rng(0)
        for _ in range(50):
            beta = gen.uniform(-0.9, 0.9)
            t_e = np.sort(gen.uniform(0, 1, 3))
            # an approaching S must not reach the source before the last emission
            d0 = gen.uniform(1e3, 1e8) + max(0.0, -beta) * C * t_e[-1]
            cfg = KinematicsConfig(0.0, 1e7, -d0, beta * C, C, t_e)
            tl = simulate_timeline(cfg)
            for k, te in enumerate(t_e):
                ref = photon_catch_time(te, d0, beta * C, C)
                assert tl.t_detect_S[k] == pytest.approx(ref, rel=1e-12)
                assert tl.proper_time_S[k] == pytest.approx(proper_time(0.0, ref, beta * C, C), rel=1e-12)

    def test_detection_after_emission(self):
        cfg = KinematicsConfig(0.0, 1e7, -1e6, -0.5 * C, C, np.linspace(0, 0.001, 5))
        tl = simulate_timeline(cfg)
        assert np.all(tl.t_detect_S > tl.emission_times)
        assert np.all(tl.t_detect_R > tl.emission_times)

    def test_crossing_the_source_is_rejected(self):
        with pytest.raises(ConfigError, match="crosses"):
            KinematicsConfig(0.0, 1e7, -1.0, -0.5 * C, C, [1.0])

    @pytest.mark.parametrize("kw,fieldname", [({"v": 1.5 * C}, "v"), ({"v": -C}, "v"), ({"c": 0.0}, "c")])
    def test_invalid(self, kw, fieldname):
        args = dict(z_S0=0.0, z_R=1.0, z_S_initial=-1.0, v=0.0, c=C, emission_times=[0.0])
        args.update(kw)
        with pytest.raises(ConfigError) as exc:
            KinematicsConfig(**args)
        assert exc.value.field == fieldname

    def test_emissions_must_increase(self):
        with pytest.raises(ConfigError, match="increasing"):
            KinematicsConfig(0.0, 1.0, -1.0, 0.0, C, [0.0, 0.0])

    def test_proper_dilation_constant(self):
        cfg = KinematicsConfig(0.0, 1e7, -1e6, 0.3 * C, C, np.linspace(0, 1, 11))
        tl = simulate_timeline(cfg)
        assert np.allclose(np.diff(tl.proper_time_S), np.diff(tl.t_detect_S) * math.sqrt(1 - 0.09), rtol=1e-12)


class TestClosedForms:
    def test_travel_time(self):
        assert travel_time_moving(C, 0.0, C) == 1.0
        assert travel_time_moving(C, 0.5 * C, C) == pytest.approx(2.0, rel=1e-12)
        assert travel_time_moving(0.0, 0.3 * C, C) == 0.0

    @pytest.mark.parametrize("beta,expected", [(0.0, 1.0), (0.5, 2.0), (0.8, 5.0)])
    def test_coordinate_interval(self, beta, expected):
        assert coordinate_interval_at_S(1.0, beta * C, C) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("beta,expected", [(0.0, 1.0), (0.5, 2.3094011), (0.8, 8.3333333)])
    def test_printed_formula(self, beta, expected):
        assert dilated_interval_paper(1.0, beta * C, C) == pytest.approx(expected, abs=1e-7)

    @pytest.mark.parametrize("beta,expected", [(0.0, 1.0), (0.5, 1.7320508), (0.8, 3.0)])
    def test_oracle_formula(self, beta, expected):
        assert dilated_interval_oracle(1.0, beta * C, C) == pytest.approx(expected, abs=1e-7)

    @pytest.mark.parametrize("beta", [0.1, 0.5, 0.9])
    def test_ratio(self, beta):
        ratio = dilated_interval_paper(1.0, beta * C, C) / dilated_interval_oracle(1.0, beta * C, C)
        assert ratio == pytest.approx(1 / (1 - beta**2), rel=1e-12)

    def test_random_agreement_with_timeline(self):
        gen = np.random.default_rng(42)
        worst = 0.0
        for _ in range(1000):
            beta = gen.uniform(-0.99, 0.99)
            t1 = gen.uniform(0, 1)
            delta = gen.uniform(1e-6, 10)
            d0 = gen.uniform(1.0, 1e8) + max(0.0, -beta) * C * (t1 + delta)
            cfg = KinematicsConfig(0.0, 2e7, -d0, beta * C, C, [t1, t1 + delta])
            tl = simulate_timeline(cfg)
            x_S = cfg.gap_to_S(t1)
            checks = [
                (travel_time_moving(x_S, beta * C, C), tl.t_detect_S[0] - t1),
                (coordinate_interval_at_S(delta, beta * C, C), tl.t_detect_S[1] - tl.t_detect_S[0]),
                (dilated_interval_oracle(delta, beta * C, C), tl.proper_time_S[1] - tl.proper_time_S[0]),
            ]
            for a, b in checks:
                worst = max(worst, abs(a - b) / abs(b))
        assert worst < 1e-12

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-0.99, 0.99), st.floats(1e-3, 1e3))
    def test_doppler_form(self, beta, delta):
        v = beta * C
        assert dilated_interval_oracle(delta, v, C) == pytest.approx(
            delta * math.sqrt((C + v) / (C - v)), rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1e-4, 0.99), st.floats(1e-3, 1e3))
    def test_proper_below_coordinate(self, beta, delta):
        v = beta * C
        assert dilated_interval_oracle(delta, v, C) < coordinate_interval_at_S(delta, v, C)

    def test_equal_at_rest(self):
        assert dilated_interval_oracle(2.5, 0.0, C) == coordinate_interval_at_S(2.5, 0.0, C)

    def test_galilean_limit(self):
        v = 1e-6 * C
        galilean = coordinate_interval_at_S(1.0, v, C)
        for f in (dilated_interval_paper, dilated_interval_oracle):
            assert f(1.0, v, C) == pytest.approx(galilean, rel=1e-11)

    @pytest.mark.parametrize("lam", [1e-3, 7.0, 1e5])
    def test_unit_rescaling(self, lam):
        cfg = KinematicsConfig(0.0, 2e7, -3e6, 0.4 * C, C, [0.0, 0.5])
        big = KinematicsConfig(0.0, 2e7 * lam, -3e6 * lam, 0.4 * C * lam, C * lam, [0.0, 0.5])
        a, b = simulate_timeline(cfg), simulate_timeline(big)
        np.testing.assert_allclose(b.t_detect_S, a.t_detect_S, rtol=1e-12)
        np.testing.assert_allclose(b.proper_time_S, a.proper_time_S, rtol=1e-12)
        assert dilated_interval_paper(1.0, 0.4 * C * lam, C * lam) == pytest.approx(
            dilated_interval_paper(1.0, 0.4 * C, C), rel=1e-12)


class TestDistance:
    def test_zero(self):
        assert distance_from_timestamps(5.0, 5.0, 5.0, 0.0, C)[2] == 0

    def test_two_light_seconds(self):
        z_R, z_S, sep = distance_from_timestamps(1.0, 1.0, 0.0, 0.0, 1.0)
        assert (z_R, z_S, sep) == (1.0, -1.0, 2.0)

    def test_three_light_seconds(self):
        z_R, z_S, sep = distance_from_timestamps(2.0, 1.0, 0.0, 0.0, 1.0)
        assert z_R - z_S == 3.0 == sep

    def test_symmetric_geometry_via_timeline(self):
        cfg = KinematicsConfig(0.0, 1.0, -1.0, 0.0, 1.0, [0.0])
        tl = simulate_timeline(cfg)
        assert distance_from_timestamps(tl.t_detect_R[0], tl.t_detect_S[0], 0.0, 0.0, 1.0)[2] == 2.0

    def test_negative_travel_time(self):
        with pytest.raises(DataError):
            distance_from_timestamps(1.0, 2.0, 3.0, 0.0, C)

    def test_between_variant(self):
        cfg = KinematicsConfig(0.0, 2e7, 5e6, 0.0, C, [0.01])
        tl = simulate_timeline(cfg)
        assert separation_s_between(tl.t_detect_R[0], tl.t_detect_S[0], C) == pytest.approx(1.5e7, rel=1e-12)


class TestCompare:
    def test_rows(self):
        rows = kinematics_compare([0.0, 0.5, 0.8], 1.0)
        assert all(rows[0][k] == 1.0 for k in ("coordinate_interval", "eq8_as_printed",
                                               "first_principles", "ratio"))
        got = [tuple(round(r[k], 7) for k in ("coordinate_interval", "eq8_as_printed",
                                                "first_principles", "ratio")) for r in rows[1:]]
        assert got == [(2.0, 2.3094011, 1.7320508, 1.3333333), (5.0, 8.3333333, 3.0, 2.7777778)]

    def test_superluminal(self):
        with pytest.raises(ConfigError):
            kinematics_compare([1.0])
