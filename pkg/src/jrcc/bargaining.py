"""Nash bargaining game over power, bandwidth and RIS modules.

Each user's utility is its covert rate minus its disagreement rate, the rate it
would get with the same power and bandwidth but no RIS modules. The fitness is
the log Nash product ``sum_k ln(u_k)`` on the feasible set, and a graded death
penalty ``-1e6 * (1 + violation)`` elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelSet, ModuleAllocation, align_all
from .covert import covert_rate, detection_error
from .scenario import Scenario

PENALTY = -1.0e6
BUDGET_RTOL = 1e-9


@dataclass(frozen=True)
class Allocation:
    power_per_user: tuple[float, ...]
    bandwidth_per_user: tuple[float, ...]
    modules_per_user: tuple[int, ...]
    comm_power_fraction: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "power_per_user", tuple(float(p) for p in self.power_per_user))
        object.__setattr__(self, "bandwidth_per_user",
                           tuple(float(b) for b in self.bandwidth_per_user))
        object.__setattr__(self, "modules_per_user", tuple(int(a) for a in self.modules_per_user))

    @property
    def num_users(self) -> int:
        return len(self.power_per_user)

    def modules(self, scenario: Scenario) -> ModuleAllocation:
        return ModuleAllocation.for_ris(self.modules_per_user, scenario.ris)

    def budget_violation(self, scenario: Scenario) -> float:
        """Relative overshoot of every budget, 0 when all budgets hold.

        Overshoots below ``BUDGET_RTOL`` of a budget count as rounding.
        """
        b = scenario.budgets

        def over(used, budget):
            excess = (used - budget) / budget
            return excess if excess > BUDGET_RTOL else 0.0

        v = over(sum(self.power_per_user), max(self.comm_power_fraction * b.total_power, 1e-300))
        v += over(sum(self.bandwidth_per_user), b.total_bandwidth)
        v += over(sum(self.modules_per_user), max(b.total_modules, 1))
        v += sum(max(-x, 0.0) for x in self.power_per_user) / b.total_power
        v += sum(max(-x, 0.0) for x in self.bandwidth_per_user) / b.total_bandwidth
        v += sum(max(-a, 0) for a in self.modules_per_user)
        return v

    def within_budgets(self, scenario: Scenario) -> bool:
        return self.budget_violation(scenario) == 0.0


@dataclass(frozen=True)
class UtilityReport:
    rates: np.ndarray
    disagreement_rates: np.ndarray
    utilities: np.ndarray
    warden_errors: np.ndarray  # (K, W) minimum total error per (user, warden)
    covert_ok: np.ndarray  # (K, W) bool
    nash_log: float
    feasible: bool

    @property
    def sum_rate(self) -> float:
        return float(np.sum(self.rates))

    @property
    def nash_product(self) -> float:
        return float(np.exp(self.nash_log)) if self.feasible else 0.0


def largest_remainder(shares: Sequence[float], total: int) -> tuple[int, ...]:
    """Integer apportionment of ``total`` proportional to ``shares``.

    Ties in the fractional remainder go to the lowest index. All-zero shares
    are treated as equal shares.
    """
    s = np.abs(np.asarray(shares, dtype=float))
    if s.sum() <= 0:
        s = np.ones_like(s)
    quota = s * total / s.sum()
    base = np.floor(quota).astype(int)
    left = total - int(base.sum())
    frac = quota - base
    order = sorted(range(len(s)), key=lambda i: (-frac[i], i))
    for i in order[:left]:
        base[i] += 1
    return tuple(int(a) for a in base)


def equal_allocation(scenario: Scenario, comm_power_fraction: float | None = None) -> Allocation:
    """Even split of power and bandwidth, modules by largest remainder."""
    K = scenario.num_users
    b = scenario.budgets
    frac = b.power_allocation_parameter if comm_power_fraction is None else comm_power_fraction
    return Allocation(
        power_per_user=(frac * b.total_power / K,) * K,
        bandwidth_per_user=(b.total_bandwidth / K,) * K,
        modules_per_user=largest_remainder(np.ones(K), b.total_modules),
        comm_power_fraction=frac,
    )


def user_noise(scenario: Scenario, bandwidth) -> np.ndarray:
    c = scenario.covert
    bandwidth = np.asarray(bandwidth, dtype=float)
    if c.noise_mode == "density-noise":
        return c.noise_density * bandwidth
    return np.full(bandwidth.shape, c.user_noise_power)


def _rates(scenario: Scenario, powers, bandwidths, magnitudes) -> np.ndarray:
    noise = user_noise(scenario, bandwidths)
    gain = scenario.covert.antenna_gain
    out = np.zeros(len(powers))
    for k, (p, B, m, s2) in enumerate(zip(powers, bandwidths, magnitudes, noise)):
        if B > 0:
            out[k] = covert_rate(gain * p, B, m, s2)
    return out


def disagreement_rate(scenario: Scenario, channels: ChannelSet, allocation: Allocation,
                      user: int, csi_error: float = 0.0) -> float:
    """Covert rate of ``user`` with its own power and bandwidth but no RIS modules."""
    mag = max(abs(channels.direct_user[user]) - csi_error, 0.0)
    return float(_rates(scenario, [allocation.power_per_user[user]],
                        [allocation.bandwidth_per_user[user]], [mag])[0])


def _surface(scenario: Scenario, channels: ChannelSet, allocation: Allocation):
    """Aligned phases, per-user effective gains and per-warden gains."""
    ris = scenario.ris
    alloc = allocation.modules(scenario)
    phases = align_all(channels, alloc, ris.phase_bits, ris.element_amplitude)
    owner = alloc.owners(channels.num_elements)
    coef = phases.coefficients
    refl = np.where(owner[:, None] == np.arange(channels.num_users)[None, :],
                    coef[:, None] * channels.cascade_user, 0.0)
    h_user = channels.direct_user + refl.sum(axis=0)
    assigned = owner >= 0
    h_warden = channels.direct_warden + (coef[assigned, None]
                                         * channels.cascade_warden[assigned]).sum(axis=0)
    return h_user, h_warden


def evaluate(scenario: Scenario, channels: ChannelSet, allocation: Allocation,
             csi_error: float | None = None) -> UtilityReport:
    """Rates, utilities, warden errors and log Nash product of ``allocation``.

    With ``csi_error > 0`` every user gain shrinks to its worst case
    ``max(|h| - eps, 0)`` and every warden gain grows to ``|h_w| + eps``.
    ``None`` uses ``scenario.covert.csi_error``.
    """
    eps = scenario.covert.csi_error if csi_error is None else csi_error
    c = scenario.covert
    K = scenario.num_users
    powers = np.asarray(allocation.power_per_user, dtype=float)
    bws = np.asarray(allocation.bandwidth_per_user, dtype=float)

    h_user, h_warden = _surface(scenario, channels, allocation)
    mags = np.maximum(np.abs(h_user) - eps, 0.0)
    d_mags = np.maximum(np.abs(channels.direct_user) - eps, 0.0)
    rates = _rates(scenario, powers, bws, mags)
    d_rates = _rates(scenario, powers, bws, d_mags)
    utilities = rates - d_rates

    w_gain = c.antenna_gain * (np.abs(h_warden) + eps) ** 2
    errors = np.ones((K, channels.num_wardens))
    for k in range(K):
        for w in range(channels.num_wardens):
            errors[k, w] = detection_error(powers[k] * w_gain[w], c.warden_noise_power,
                                           c.warden_samples).total_error
    covert_ok = errors >= c.covert_threshold

    violation = allocation.budget_violation(scenario)
    violation += float(np.sum(np.maximum(c.covert_threshold - errors, 0.0)))
    violation += float(np.sum(utilities <= 0))
    feasible = violation == 0.0
    if feasible:
        nash_log = float(np.sum(np.log(utilities)))
    else:
        nash_log = PENALTY * (1.0 + violation)
    return UtilityReport(rates, d_rates, utilities, errors, covert_ok, nash_log, feasible)


def compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative integers summing to ``total``."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def grid_oracle(scenario: Scenario, channels: ChannelSet, grid_resolution: int = 11,
                csi_error: float | None = None) -> tuple[Allocation, float]:
    """Exhaustive search of the bargaining problem on a simplex grid.

    Power (and bandwidth, when ``budgets.optimize_bandwidth``) fractions take
    values ``i / (grid_resolution - 1)``; module counts range over every
    composition of ``budgets.total_modules``. With ``budgets.optimize_pap`` the
    power simplex gets one extra part, the share left to the radar, so the
    communication fraction is searched on the same grid.
    """
    K = scenario.num_users
    b = scenario.budgets
    if K > 3 or scenario.ris.num_modules > 9 or grid_resolution > 21:
        raise ValueError("instance too large for the grid oracle "
                         "(need K <= 3, N <= 9, resolution <= 21)")
    steps = grid_resolution - 1
    if b.optimize_pap:
        power_grid = []
        for c in compositions(steps, K + 1):
            pap = 1.0 - c[-1] / steps
            power_grid.append((tuple(b.total_power * x / steps for x in c[:K]), pap))
    else:
        power_grid = [(tuple(b.comm_power * x / steps for x in c), b.power_allocation_parameter)
                      for c in compositions(steps, K)]
    if b.optimize_bandwidth:
        bw_grid = [tuple(b.total_bandwidth * x / steps for x in c) for c in compositions(steps, K)]
    else:
        bw_grid = [(b.total_bandwidth / K,) * K]
    best_alloc, best = None, -np.inf
    for modules in compositions(b.total_modules, K):
        for bw in bw_grid:
            for pw, pap in power_grid:
                alloc = Allocation(pw, bw, modules, pap)
                value = evaluate(scenario, channels, alloc, csi_error).nash_log
                if value > best:
                    best_alloc, best = alloc, value
    return best_alloc, best
