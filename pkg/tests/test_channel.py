import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jrcc.channel import (ChannelSet, ModuleAllocation, PhaseConfig, align_all, align_phases,
                          draw_channels, effective_channel, path_gain, quantize_phases,
                          worst_case_magnitude)
from jrcc.scenario import from_dict

from conftest import small_doc


def single(h_d, cascade):
    """One user, one warden-free set with tx_to_element = 1."""
    cascade = np.atleast_1d(np.asarray(cascade, dtype=complex))
    return ChannelSet([h_d], np.ones(cascade.size), cascade[:, None], np.zeros(0),
                      np.zeros((cascade.size, 0)))


def random_set(rng, L, K=1, direct=True):
    c = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)
    h_d = c(K) if direct else np.zeros(K)
    return ChannelSet(h_d, c(L), c(L, K), c(1), c(L, 1))


def test_path_gain_values():
    assert path_gain(1.0, 3.7, 0.25) == 0.25
    assert path_gain(10.0, 2.0, 1.0) == pytest.approx(0.01, rel=1e-15)
    assert path_gain(100.0, 2.5, 1e-3) == pytest.approx(1e-3 / 100_000.0, rel=1e-14)
    with pytest.raises(ValueError):
        path_gain(0.0, 2.0)


def test_deterministic_unit_direct_gain():
    doc = small_doc(**{"geometry.path_loss_exponent_direct": 2})
    doc["geometry"]["user_positions"] = [[10, 0, 0]]
    doc["geometry"]["ris_position"] = [0, 5, 0]
    ch = draw_channels(from_dict(doc), 0)
    assert ch.direct_user[0] == pytest.approx(0.1 + 0j, abs=1e-15)


def test_same_seed_identical(fig5):
    a, b = draw_channels(fig5, 3), draw_channels(fig5, 3)
    assert a.identical(b)
    assert not a.identical(draw_channels(fig5, 4))


def test_channel_arrays_read_only(fig5):
    ch = draw_channels(fig5, 0)
    with pytest.raises(ValueError):
        ch.direct_user[0] = 0


def test_rayleigh_moment():
    doc = small_doc()
    doc["fading_mode"] = {"kind": "rayleigh"}
    doc["ris"] = {"num_elements": 100_000, "num_modules": 1}
    doc["budgets"]["total_modules"] = 1
    sc = from_dict(doc)
    ch = draw_channels(sc, 11)
    expected = path_gain(10.0, 2.0) * path_gain(np.hypot(0, 5), 2.0)
    ratio = np.mean(np.abs(ch.cascade_user[:, 0]) ** 2) / expected
    assert ratio == pytest.approx(1.0, abs=0.04)  # product of two unit-mean draws
    g = np.abs(ch.tx_to_element) ** 2 / path_gain(10.0, 2.0)
    assert np.mean(g) == pytest.approx(1.0, abs=0.02)


def test_rician_unit_power():
    doc = small_doc()
    doc["fading_mode"] = {"kind": "rician", "k_factor": 10}
    doc["ris"] = {"num_elements": 100_000, "num_modules": 1}
    doc["budgets"]["total_modules"] = 1
    ch = draw_channels(from_dict(doc), 5)
    g = np.abs(ch.tx_to_element) ** 2 / path_gain(10.0, 2.0)
    assert np.mean(g) == pytest.approx(1.0, abs=0.02)


def test_no_modules_returns_direct():
    rng = np.random.default_rng(0)
    ch = random_set(rng, 6)
    ph = PhaseConfig(rng.uniform(0, 2 * np.pi, 6))
    assert effective_channel(ch, ph, ModuleAllocation((0,), 3), 0) == ch.direct_user[0]


def test_alignment_arithmetic():
    ch = single(1.0, 1j)
    alloc = ModuleAllocation((1,))
    ph = align_phases(ch, alloc, 0)
    assert ph.phases[0] == pytest.approx(3 * np.pi / 2, abs=1e-15)
    h = effective_channel(ch, ph, alloc, 0)
    assert h == pytest.approx(2 + 0j, abs=1e-12)
    h = effective_channel(ch, PhaseConfig(np.array([3 * np.pi / 2])), alloc, 0)
    assert h == pytest.approx(2 + 0j, abs=1e-12)


def test_blocked_direct_path():
    rng = np.random.default_rng(1)
    ch = random_set(rng, 8, direct=False)
    alloc = ModuleAllocation((8,))
    h = effective_channel(ch, align_phases(ch, alloc, 0), alloc, 0)
    assert abs(h) == pytest.approx(np.abs(ch.cascade_user[:, 0]).sum(), rel=1e-12)
    assert abs(np.angle(h)) < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_triangle_and_alignment_bound(seed):
    rng = np.random.default_rng(seed)
    ch = random_set(rng, 30)
    alloc = ModuleAllocation((1,), 30)
    best = abs(effective_channel(ch, align_phases(ch, alloc, 0), alloc, 0))
    bound = abs(ch.direct_user[0]) + np.abs(ch.cascade_user[:, 0]).sum()
    assert best == pytest.approx(bound, rel=1e-12)
    for _ in range(50):
        h = effective_channel(ch, PhaseConfig(rng.uniform(0, 2 * np.pi, 30)), alloc, 0)
        assert abs(h) <= bound * (1 + 1e-12)
        assert abs(h) <= best * (1 + 1e-12)


def test_module_monotonicity_deterministic(small_scenario):
    ch = draw_channels(small_scenario.with_elements(12), 0)
    mags = []
    for a in range(4):
        alloc = ModuleAllocation((a, 0), 3)
        mags.append(abs(effective_channel(ch, align_phases(ch, alloc, 0), alloc, 0)))
    assert all(b > a for a, b in zip(mags, mags[1:]))


def test_other_users_elements_do_not_contribute():
    rng = np.random.default_rng(2)
    ch = random_set(rng, 6, K=2)
    alloc = ModuleAllocation((1, 2), 2)
    ph = align_all(ch, alloc)
    owner = alloc.owners(6)
    assert list(owner) == [0, 0, 1, 1, 1, 1]
    h1 = effective_channel(ch, ph, alloc, 1)
    manual = ch.direct_user[1] + (ph.coefficients[2:] * ch.cascade_user[2:, 1]).sum()
    assert h1 == pytest.approx(manual, abs=1e-12)


def test_owners_overflow_rejected():
    with pytest.raises(ValueError):
        ModuleAllocation((2, 2), 3).owners(9)


@pytest.mark.parametrize("bits", [1, 2, 3, 4])
def test_quantization_loss_bound_blocked_path(bits):
    rng = np.random.default_rng(bits)
    ch = random_set(rng, 64, direct=False)
    alloc = ModuleAllocation((64,))
    cont = abs(effective_channel(ch, align_phases(ch, alloc, 0), alloc, 0))
    quant = abs(effective_channel(ch, align_phases(ch, alloc, 0, phase_bits=bits), alloc, 0))
    assert quant >= np.cos(np.pi / 2 ** bits) * cont - 1e-12
    assert quant <= cont + 1e-12


def test_quantize_levels():
    q = quantize_phases(np.array([0.1, np.pi - 0.1, 2 * np.pi - 0.01]), 1)
    np.testing.assert_allclose(q, [0.0, np.pi, 0.0])


@pytest.mark.parametrize("h,eps,out", [(0.5, 0.0, 0.5), (0.5, 0.2, 0.3), (0.1, 0.5, 0.0),
                                       (0.3j, 0.1, 0.2)])
def test_worst_case_magnitude(h, eps, out):
    assert worst_case_magnitude(h, eps) == pytest.approx(out, abs=1e-15)


def test_worst_case_rejects_negative():
    with pytest.raises(ValueError):
        worst_case_magnitude(1.0, -0.1)
