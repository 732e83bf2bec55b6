import numpy as np
import pytest

from irsmec.scenario import (
    ChannelSet,
    Geometry,
    PathLossClampWarning,
    PathLossModel,
    SystemConfig,
    TaskRanges,
    composite_channel,
    draw_channels,
    draw_tasks,
    path_loss_gain,
    place_devices,
)

MODEL = PathLossModel()


def default_setup(devices=1, elements=4, antennas=3):
    cfg = SystemConfig(num_devices=devices, num_elements=elements, num_antennas=antennas)
    geom = Geometry.explicit([(280.0, 10.0)] * devices)
    return cfg, geom


class TestPlacement:
    def test_explicit_offsets_returned_verbatim(self):
        geom = Geometry.explicit([(280.0, 10.0)])
        pos = place_devices(geom, 1, 1)
        np.testing.assert_array_equal(pos, [[280.0, 10.0]])

    def test_degenerate_disc(self):
        geom = Geometry.disc(center=(100.0, 5.0), radius=0.0)
        pos = place_devices(geom, 7, 3)
        np.testing.assert_allclose(pos, np.tile([100.0, 5.0], (7, 1)))

    def test_disc_mean_radius(self):
        # area-uniform radius has mean 2r/3
        geom = Geometry.disc(center=(0.0, 0.0), radius=10.0)
        pos = place_devices(geom, 100_000, 9)
        mean_radius = float(np.mean(np.linalg.norm(pos, axis=1)))
        assert mean_radius == pytest.approx(2 * 10.0 / 3, rel=0.01)


class TestPathLoss:
    def test_reference_distance(self):
        # PL0 = 30 dB at d0 = 1 m
        assert path_loss_gain(1.0, 3.5, MODEL) == pytest.approx(1e-3)

    def test_decade_step(self):
        model = PathLossModel(alpha_ua=2.0)
        assert path_loss_gain(10.0, 2.0, model) == pytest.approx(1e-5)

    def test_hand_evaluated(self):
        expected = 10 ** (-(30.0 + 10 * 3.5 * np.log10(300.0)) / 10)
        assert path_loss_gain(300.0, 3.5, MODEL) == pytest.approx(expected, rel=1e-12)

    def test_clamp_below_reference(self):
        with pytest.warns(PathLossClampWarning):
            g = path_loss_gain(0.1, 3.5, MODEL)
        assert g == pytest.approx(1e-3)


class TestChannels:
    def test_deterministic_per_seed(self):
        cfg, geom = default_setup()
        pos = place_devices(geom, 1, 5)
        a = draw_channels(pos, cfg, MODEL, geom, 5)
        b = draw_channels(pos, cfg, MODEL, geom, 5)
        np.testing.assert_array_equal(a.h_d, b.h_d)
        np.testing.assert_array_equal(a.h_r, b.h_r)
        np.testing.assert_array_equal(a.G, b.G)
        c = draw_channels(pos, cfg, MODEL, geom, 6)
        assert not np.array_equal(a.h_d, c.h_d)

    def test_unit_gain_variance(self):
        cfg = SystemConfig(num_devices=1, num_elements=1, num_antennas=1)
        geom = Geometry.explicit([(280.0, 10.0)])
        pos = place_devices(geom, 1, 0)
        samples = np.array([
            draw_channels(pos, cfg, MODEL, geom, seed, gains=(1.0, 1.0, 1.0)).h_d[0, 0]
            for seed in range(10_000)
        ])
        assert float(np.var(samples)) == pytest.approx(1.0, abs=0.03)

    def test_zero_gain_hook(self):
        cfg, geom = default_setup()
        pos = place_devices(geom, 1, 2)
        ch = draw_channels(pos, cfg, MODEL, geom, 2, gains=(0.0, 0.0, 0.0))
        assert not np.any(ch.h_d) and not np.any(ch.h_r) and not np.any(ch.G)

    def test_power_scales_with_gain(self):
        cfg = SystemConfig(num_devices=1, num_elements=1, num_antennas=1)
        geom = Geometry.explicit([(280.0, 10.0)])
        pos = place_devices(geom, 1, 0)
        scale = 0.25

        def mean_power(gain):
            powers = [abs(draw_channels(pos, cfg, MODEL, geom, seed,
                                        gains=(gain, 1.0, 1.0)).h_d[0, 0]) ** 2
                      for seed in range(1000)]
            return float(np.mean(powers))

        assert mean_power(scale) / mean_power(1.0) == pytest.approx(scale, rel=0.05)


class TestTasks:
    def test_degenerate_ranges(self):
        ranges = TaskRanges(bits=(3e5, 3e5), cycles_per_bit=(750, 750),
                            local_rate=(5e8, 5e8))
        tasks = draw_tasks(4, ranges, 0)
        assert np.all(tasks.bits == 300_000)
        assert np.all(tasks.cycles_per_bit == 750.0)
        assert np.all(tasks.local_rate == 5e8)

    def test_defaults_inside_ranges(self):
        tasks = draw_tasks(200, TaskRanges(), 1)
        assert np.all((tasks.bits >= 250_000) & (tasks.bits <= 350_000))
        assert np.all((tasks.cycles_per_bit >= 700) & (tasks.cycles_per_bit <= 800))
        assert np.all((tasks.local_rate >= 4e8) & (tasks.local_rate <= 6e8))

    def test_cycles_mean(self):
        draws = np.concatenate([draw_tasks(10, TaskRanges(), seed).cycles_per_bit
                                for seed in range(1000)])
        assert float(np.mean(draws)) == pytest.approx(750.0, rel=0.01)

    def test_determinism(self):
        a = draw_tasks(3, TaskRanges(), 11)
        b = draw_tasks(3, TaskRanges(), 11)
        np.testing.assert_array_equal(a.bits, b.bits)
        np.testing.assert_array_equal(a.cycles_per_bit, b.cycles_per_bit)


class TestCompositeChannel:
    def test_no_irs_reduction(self):
        cfg, geom = default_setup()
        pos = place_devices(geom, 1, 4)
        ch = draw_channels(pos, cfg, MODEL, geom, 4)
        bare = ChannelSet(ch.h_d, np.zeros_like(ch.h_r), ch.G)
        np.testing.assert_array_equal(composite_channel(bare, np.zeros(4)), ch.h_d)

    def test_scalar_sum(self):
        ch = ChannelSet(np.array([[1.0 + 0j]]), np.array([[1.0 + 0j]]),
                        np.array([[1.0 + 0j]]))
        h = composite_channel(ch, np.zeros(1))
        assert h[0, 0] == pytest.approx(2.0)

    def test_matches_loop_oracle(self):
        gen = np.random.default_rng(8)
        m, n, k = 3, 4, 2
        ch = ChannelSet(
            gen.standard_normal((m, k)) + 1j * gen.standard_normal((m, k)),
            gen.standard_normal((n, k)) + 1j * gen.standard_normal((n, k)),
            gen.standard_normal((m, n)) + 1j * gen.standard_normal((m, n)),
        )
        theta = 2 * np.pi * gen.random(n)
        expected = np.zeros((m, k), dtype=complex)
        for kk in range(k):
            for mm in range(m):
                acc = ch.h_d[mm, kk]
                for nn in range(n):
                    acc += ch.G[mm, nn] * np.exp(1j * theta[nn]) * ch.h_r[nn, kk]
                expected[mm, kk] = acc
        np.testing.assert_allclose(composite_channel(ch, theta), expected, rtol=1e-12)

    def test_linear_in_each_phase_term(self):
        # column k is affine in e^{j theta_n}: finite difference matches
        # the G diag(.) h_r expansion exactly
        gen = np.random.default_rng(12)
        m, n = 2, 3
        ch = ChannelSet(
            gen.standard_normal((m, 1)) + 1j * gen.standard_normal((m, 1)),
            gen.standard_normal((n, 1)) + 1j * gen.standard_normal((n, 1)),
            gen.standard_normal((m, n)) + 1j * gen.standard_normal((m, n)),
        )
        theta = 2 * np.pi * gen.random(n)
        for idx in range(n):
            bumped = theta.copy()
            bumped[idx] = theta[idx] + 0.7
            delta = composite_channel(ch, bumped) - composite_channel(ch, theta)
            expected = ch.G[:, idx] * (np.exp(1j * bumped[idx]) - np.exp(1j * theta[idx])) \
                * ch.h_r[idx, 0]
            np.testing.assert_allclose(delta[:, 0], expected, rtol=1e-12, atol=1e-15)
