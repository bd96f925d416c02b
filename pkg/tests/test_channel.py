import json

import numpy as np
import pytest

from wpt.channel import (DEFAULT_PDP, ChannelState, PowerDelayProfile, exponential_pdp,
                         generate_channel_iid, generate_channel_tdl, generate_channels, substream)
from wpt.config import SystemConfig


def test_channel_state_length_enforced():
    with pytest.raises(ValueError):
        ChannelState(np.zeros(5, complex), 1.0, 2, 3)
    h = ChannelState(np.arange(6), 1.0, 2, 3)
    assert h.blocks.shape == (3, 2)
    assert h.blocks[1, 0] == 2


def test_pdp_validation():
    with pytest.raises(ValueError):
        PowerDelayProfile(np.array([]), np.array([]))
    with pytest.raises(ValueError):
        PowerDelayProfile([0.0, 1e-7], [0.5, 0.6])
    with pytest.raises(ValueError):
        PowerDelayProfile([1e-7, 0.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        PowerDelayProfile.normalized([0.0, 0.0], [1, 1])


def test_default_pdp_preset():
    assert DEFAULT_PDP.tap_delays.size == 18
    assert abs(DEFAULT_PDP.tap_powers.sum() - 1) <= 1e-12
    assert DEFAULT_PDP.rms_delay_spread == pytest.approx(140e-9, rel=1e-9)
    assert np.all(np.diff(DEFAULT_PDP.tap_powers) < 0)


def test_pdp_json_loading_normalizes(tmp_path):
    path = tmp_path / "pdp.json"
    path.write_text(json.dumps({"delays_ns": [0, 50, 110], "powers_db": [0, -3, -6]}))
    pdp = PowerDelayProfile.from_json(path)
    assert abs(pdp.tap_powers.sum() - 1) <= 1e-12
    np.testing.assert_allclose(pdp.tap_delays, [0, 50e-9, 110e-9])
    np.testing.assert_allclose(pdp.tap_powers[1] / pdp.tap_powers[0], 10 ** -0.3)
    path.write_text(json.dumps({"delays_ns": [], "powers_db": []}))
    with pytest.raises(ValueError):
        PowerDelayProfile.from_json(path)
    path.write_text(json.dumps({"delays_ns": [0], "powers_db": [0], "extra": 1}))
    with pytest.raises(ValueError):
        PowerDelayProfile.from_json(path)


def test_single_tap_is_frequency_flat():
    cfg = SystemConfig(M=3, N=6, path_loss_db=0.0)
    flat = PowerDelayProfile([0.0], [1.0])
    h = generate_channel_tdl(cfg, flat, 0, substream(1, 0))
    for n in range(1, cfg.N):
        np.testing.assert_array_equal(h.blocks[n], h.blocks[0])


@pytest.mark.parametrize("df_tau", [0.5, 0.25, 0.1])
def test_tdl_adjacent_tone_correlation_matches_closed_form(df_tau):
    # two equal taps, delay spacing tau with delta_f * tau = df_tau
    cfg = SystemConfig(M=1, N=2, f1=10.0, delta_f=1.0, path_loss_db=0.0)
    pdp = PowerDelayProfile([0.0, df_tau / cfg.delta_f], [0.5, 0.5])
    closed = pdp.frequency_correlation(cfg.delta_f)
    rng = np.random.default_rng(7)
    n = 10_000
    prods = np.empty(n, complex)
    for i in range(n):
        b = generate_channel_tdl(cfg, pdp, 0, rng).blocks[:, 0]
        prods[i] = b[0] * np.conj(b[1])
    est = prods.mean()
    # per-sample product variance for unit-power Gaussians is E|a|^2 E|b|^2 = 1
    sigma = np.sqrt(prods.var() / n)
    assert abs(est - closed) <= 3 * sigma
    assert abs(abs(closed) - abs(0.5 + 0.5 * np.exp(2j * np.pi * df_tau))) < 1e-15


def test_tdl_path_loss_scaling():
    cfg = SystemConfig(M=10, N=100, path_loss_db=61.0)
    hs = np.concatenate([generate_channel_tdl(cfg, DEFAULT_PDP, 0, substream(3, 0, r)).h for r in range(100)])
    assert hs.size == 10**5
    assert np.mean(np.abs(hs) ** 2) == pytest.approx(10**-6.1, rel=0.05)


def test_iid_moments():
    cfg = SystemConfig(M=1000, N=100, path_loss_db=0.0)
    h = generate_channel_iid(cfg, 0, np.random.default_rng(0)).h
    assert abs(h.real.mean()) < 0.02 and abs(h.imag.mean()) < 0.02
    assert np.var(h) == pytest.approx(1.0, rel=0.02)
    assert np.var(h.real) == pytest.approx(0.5, rel=0.03)


def test_iid_users_independent():
    cfg = SystemConfig(M=100, N=100, K=2, path_loss_db=0.0)
    h1, h2 = (c.h for c in generate_channels(cfg, 0, "iid"))
    assert abs(np.mean(h1 * np.conj(h2))) < 0.02


def test_iid_per_entry_variance_matches_lambda():
    cfg = SystemConfig(M=1, N=1, path_loss_db=30.0)
    h = np.array([generate_channel_iid(cfg, 0, substream(5, 0, r)).h[0] for r in range(20_000)])
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1e-3, rel=0.05)


def test_law_of_large_numbers_inner_product():
    cfg = SystemConfig(M=10_000, N=1, path_loss_db=20.0)
    h = generate_channel_iid(cfg, 0, substream(11, 0)).h
    assert np.vdot(h, h).real / cfg.M == pytest.approx(cfg.lambdas[0], rel=0.03)


def test_cross_tone_hardening():
    cfg = SystemConfig(M=10_000, N=2, path_loss_db=0.0)
    ratios = []
    for r in range(100):
        b = generate_channel_iid(cfg, 0, substream(2, 0, r)).blocks
        ratios.append(abs(b[0] @ b[1].conj()) / cfg.M)
    assert np.mean(np.array(ratios) < 0.05) >= 0.99


@pytest.mark.parametrize("model", ["tdl", "iid"])
def test_reproducible_substreams(model):
    cfg = SystemConfig(M=3, N=4, K=2, seed=42)
    a = generate_channels(cfg, 5, model)
    b = generate_channels(cfg, 5, model)
    for x, y in zip(a, b):
        assert x.h.tobytes() == y.h.tobytes()
    c = generate_channels(cfg, 6, model)
    assert not np.array_equal(a[0].h, c[0].h)
    assert not np.array_equal(a[0].h, a[1].h)


def test_realizations_independent_of_generation_order():
    cfg = SystemConfig(M=2, N=3, K=2, seed=9)
    forward = [generate_channels(cfg, r) for r in range(4)]
    backward = [generate_channels(cfg, r) for r in reversed(range(4))][::-1]
    for f, b in zip(forward, backward):
        assert all(np.array_equal(x.h, y.h) for x, y in zip(f, b))


def test_exponential_pdp_unreachable_spread():
    with pytest.raises(ValueError):
        exponential_pdp(n_taps=3, rms_delay_spread=1e-3, tap_spacing=1e-9)
