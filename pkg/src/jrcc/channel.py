"""RIS-assisted channel realizations, coherent phase alignment, and CSI error balls.

Every RIS element sits at the RIS position (far-field, co-located elements), so
large-scale loss is shared across elements while small-scale factors are drawn
per element. Modules are contiguous element blocks; ``a_k`` modules go to user
``k`` in user order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .scenario import RisConfig, Scenario

TWO_PI = 2.0 * np.pi


def path_gain(distance: float, exponent: float, reference_gain: float = 1.0) -> float:
    """Distance power law ``reference_gain * distance ** -exponent``."""
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise ValueError(f"distance must be positive, got {distance}")
    return reference_gain * distance ** (-exponent)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Complex amplitude gains for one fading realization.

    Attributes
    ----------
    direct_user : (K,) transmitter -> user
    tx_to_element : (L,) transmitter -> RIS element
    element_to_user : (L, K) RIS element -> user
    direct_warden : (W,) transmitter -> warden
    element_to_warden : (L, W) RIS element -> warden
    """

    direct_user: np.ndarray
    tx_to_element: np.ndarray
    element_to_user: np.ndarray
    direct_warden: np.ndarray
    element_to_warden: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        for name in ("direct_user", "tx_to_element", "element_to_user",
                     "direct_warden", "element_to_warden"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        L = self.tx_to_element.shape[0]
        K = self.direct_user.shape[0]
        W = self.direct_warden.shape[0]
        if self.element_to_user.shape != (L, K):
            raise ValueError(f"element_to_user shape {self.element_to_user.shape} != {(L, K)}")
        if self.element_to_warden.shape != (L, W):
            raise ValueError(f"element_to_warden shape {self.element_to_warden.shape} != {(L, W)}")

    @property
    def num_elements(self) -> int:
        return self.tx_to_element.shape[0]

    @property
    def num_users(self) -> int:
        return self.direct_user.shape[0]

    @property
    def num_wardens(self) -> int:
        return self.direct_warden.shape[0]

    @cached_property
    def cascade_user(self) -> np.ndarray:
        """(L, K) cascaded gains ``g_l * f_lk``."""
        return self.tx_to_element[:, None] * self.element_to_user

    @cached_property
    def cascade_warden(self) -> np.ndarray:
        return self.tx_to_element[:, None] * self.element_to_warden

    def identical(self, other: ChannelSet) -> bool:
        """Bit-for-bit equality of every gain array."""
        names = ("direct_user", "tx_to_element", "element_to_user",
                 "direct_warden", "element_to_warden")
        return all(getattr(self, n).tobytes() == getattr(other, n).tobytes() for n in names)


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    phases: np.ndarray
    amplitude: float = 1.0

    @property
    def coefficients(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * np.asarray(self.phases))


@dataclass(frozen=True)
class ModuleAllocation:
    modules_per_user: tuple[int, ...]
    elements_per_module: int = 1

    def __post_init__(self):
        object.__setattr__(self, "modules_per_user",
                           tuple(int(a) for a in self.modules_per_user))
        if any(a < 0 for a in self.modules_per_user):
            raise ValueError(f"negative module count in {self.modules_per_user}")
        if self.elements_per_module < 1:
            raise ValueError("elements_per_module must be >= 1")

    @classmethod
    def for_ris(cls, modules_per_user, ris: RisConfig) -> ModuleAllocation:
        return cls(tuple(modules_per_user), ris.elements_per_module)

    def owners(self, num_elements: int) -> np.ndarray:
        """Owning user of each element, ``-1`` for unassigned elements."""
        per = self.elements_per_module
        if sum(self.modules_per_user) * per > num_elements:
            raise ValueError(f"{sum(self.modules_per_user)} modules of {per} elements "
                             f"exceed a {num_elements}-element surface")
        owner = np.full(num_elements, -1, dtype=int)
        start = 0
        for k, a in enumerate(self.modules_per_user):
            owner[start:start + a * per] = k
            start += a * per
        return owner


def _small_scale(rng: np.random.Generator, shape, kind: str, k_factor: float) -> np.ndarray:
    if kind == "deterministic-unit":
        return np.ones(shape, dtype=complex)
    scatter = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    if kind == "rayleigh":
        return scatter
    # Rician: unit-power LoS term with a uniformly random phase per link.
    los = np.exp(1j * rng.uniform(0.0, TWO_PI, shape))
    return np.sqrt(k_factor / (k_factor + 1.0)) * los + np.sqrt(1.0 / (k_factor + 1.0)) * scatter


def draw_channels(scenario: Scenario, seed: int = 0) -> ChannelSet:
    """Draw one fading realization.

    Direct links (transmitter to user / warden) are always Rayleigh in the
    ``rician`` mode; only RIS-related links carry the LoS component.
    """
    g = scenario.geometry
    L = scenario.ris.num_elements
    kind, k = scenario.fading_mode.kind, scenario.fading_mode.k_factor
    direct_kind = "rayleigh" if kind == "rician" else kind
    rng = np.random.default_rng(seed)

    tx = np.asarray(g.transmitter_position, dtype=float)
    ris = np.asarray(g.ris_position, dtype=float)
    users = np.asarray(g.user_positions, dtype=float).reshape(-1, 3)
    wardens = np.asarray(g.warden_positions, dtype=float).reshape(-1, 3)

    def amp(points, origin, exponent):
        d = np.linalg.norm(points - origin, axis=-1)
        return np.sqrt(path_gain(d, exponent, g.reference_gain))

    a_du = amp(users, tx, g.path_loss_exponent_direct)
    a_tr = amp(ris, tx, g.path_loss_exponent_ris)
    a_ru = amp(users, ris, g.path_loss_exponent_ris)
    a_dw = amp(wardens, tx, g.path_loss_exponent_direct)
    a_rw = amp(wardens, ris, g.path_loss_exponent_ris)

    K, W = len(users), len(wardens)
    direct_user = a_du * _small_scale(rng, K, direct_kind, k)
    tx_to_element = a_tr * _small_scale(rng, L, kind, k)
    element_to_user = a_ru[None, :] * _small_scale(rng, (L, K), kind, k)
    direct_warden = a_dw * _small_scale(rng, W, direct_kind, k)
    element_to_warden = a_rw[None, :] * _small_scale(rng, (L, W), kind, k)
    return ChannelSet(direct_user, tx_to_element, element_to_user,
                      direct_warden, element_to_warden, seed)


def effective_channel(channels: ChannelSet, phases: PhaseConfig, alloc: ModuleAllocation,
                      user: int) -> complex:
    """Direct gain plus the reflections from the elements assigned to ``user``.

    Elements owned by other users (or unassigned) do not contribute.
    """
    if not 0 <= user < channels.num_users:
        raise IndexError(f"user {user} out of range for {channels.num_users} users")
    mask = alloc.owners(channels.num_elements) == user
    refl = phases.coefficients[mask] * channels.cascade_user[mask, user]
    return complex(channels.direct_user[user] + refl.sum())


def quantize_phases(phases: np.ndarray, bits: int) -> np.ndarray:
    """Snap phases to the nearest multiple of ``2*pi / 2**bits``; result in [0, 2*pi)."""
    phases = np.mod(phases, TWO_PI)
    if bits <= 0:
        return phases
    levels = 2 ** bits
    step = TWO_PI / levels
    return np.mod(np.rint(phases / step), levels) * step


def aligned_phase_matrix(channels: ChannelSet) -> np.ndarray:
    """(L, K) continuous phases that co-phase element l with user k's direct path."""
    casc = channels.cascade_user
    ph = np.angle(channels.direct_user)[None, :] - np.angle(casc)
    ph = np.where(np.abs(casc) > 0, ph, 0.0)
    return np.mod(ph, TWO_PI)


def align_phases(channels: ChannelSet, alloc: ModuleAllocation, user: int,
                 phase_bits: int = 0, amplitude: float = 1.0) -> PhaseConfig:
    """Co-phase ``user``'s elements with its direct path; other elements get phase 0.

    Elements with a zero cascaded gain get phase 0. A blocked direct path
    (``h_d = 0``) is treated as having argument 0.
    """
    if not 0 <= user < channels.num_users:
        raise IndexError(f"user {user} out of range for {channels.num_users} users")
    mask = alloc.owners(channels.num_elements) == user
    phases = np.zeros(channels.num_elements)
    phases[mask] = aligned_phase_matrix(channels)[mask, user]
    return PhaseConfig(quantize_phases(phases, phase_bits), amplitude)


def align_all(channels: ChannelSet, alloc: ModuleAllocation, phase_bits: int = 0,
              amplitude: float = 1.0) -> PhaseConfig:
    """Surface configuration with each user's block aligned to that user."""
    owner = alloc.owners(channels.num_elements)
    phases = np.zeros(channels.num_elements)
    idx = np.nonzero(owner >= 0)[0]
    if idx.size:
        phases[idx] = aligned_phase_matrix(channels)[idx, owner[idx]]
    return PhaseConfig(quantize_phases(phases, phase_bits), amplitude)


def worst_case_magnitude(nominal: complex | float, epsilon: float) -> float:
    """Smallest magnitude inside the CSI-error ball of radius ``epsilon``."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be non-negative, got {epsilon}")
    return max(abs(nominal) - epsilon, 0.0)
