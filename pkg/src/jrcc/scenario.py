"""Experiment data model: physical constants, geometry, budgets, and validation.

All quantities are stored in linear units. Scenario files may give any
scalar with a ``_db`` / ``_dbw`` suffix; the loader converts it with
``10 ** (x / 10)`` and stores it under the bare name.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

FADING_KINDS = ("deterministic-unit", "rayleigh", "rician")
NOISE_MODES = ("fixed-noise", "density-noise")


@dataclass(frozen=True)
class RadarParams:
    transmit_power: float
    tx_gain: float
    rx_gain: float
    wavelength: float
    rcs: float
    pulse_duration: float
    estimator_variance: float
    snr_threshold: float
    system_temperature: float = 290.0
    noise_figure: float = 1.0
    ris_threshold_reduction: float = 1.0

    @property
    def effective_threshold(self) -> float:
        return self.snr_threshold / self.ris_threshold_reduction


@dataclass(frozen=True)
class RisConfig:
    num_elements: int
    num_modules: int
    element_amplitude: float = 1.0
    phase_bits: int = 0

    @property
    def elements_per_module(self) -> int:
        return self.num_elements // self.num_modules


@dataclass(frozen=True)
class CovertParams:
    user_noise_power: float
    warden_noise_power: float
    warden_samples: int = 100
    covert_threshold: float = 0.95
    noise_mode: str = "fixed-noise"
    noise_density: float = 4.00393e-21
    antenna_gain: float = 1.0
    csi_error: float = 0.0


@dataclass(frozen=True)
class Geometry:
    transmitter_position: tuple[float, float, float]
    ris_position: tuple[float, float, float]
    user_positions: tuple[tuple[float, float, float], ...]
    warden_positions: tuple[tuple[float, float, float], ...] = ()
    target_positions: tuple[tuple[float, float, float], ...] = ()
    path_loss_exponent_direct: float = 3.0
    path_loss_exponent_ris: float = 2.0
    reference_gain: float = 1.0

    @property
    def num_users(self) -> int:
        return len(self.user_positions)

    @property
    def num_wardens(self) -> int:
        return len(self.warden_positions)


@dataclass(frozen=True)
class Budgets:
    total_power: float
    total_bandwidth: float
    total_modules: int
    power_allocation_parameter: float = 1.0
    radar_bandwidth_fraction: float = 1.0
    optimize_bandwidth: bool = False
    optimize_pap: bool = False

    @property
    def comm_power(self) -> float:
        return self.total_power * self.power_allocation_parameter

    @property
    def radar_power(self) -> float:
        return self.total_power * (1.0 - self.power_allocation_parameter)

    @property
    def radar_bandwidth(self) -> float:
        return self.total_bandwidth * self.radar_bandwidth_fraction


@dataclass(frozen=True)
class FadingMode:
    kind: str = "rician"
    k_factor: float = 10.0


@dataclass(frozen=True)
class Scenario:
    radar: RadarParams
    ris: RisConfig
    covert: CovertParams
    geometry: Geometry
    budgets: Budgets
    fading_mode: FadingMode = field(default_factory=FadingMode)

    @property
    def num_users(self) -> int:
        return self.geometry.num_users

    def with_elements(self, num_elements: int) -> Scenario:
        return replace(self, ris=replace(self.ris, num_elements=int(num_elements)))

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def content_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class Diagnostic:
    field: str
    value: Any
    message: str

    def __str__(self) -> str:
        return f"{self.field}={self.value!r}: {self.message}"


class ScenarioError(ValueError):
    """Raised when a scenario violates one or more invariants."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        lines = "\n  ".join(str(d) for d in self.diagnostics)
        super().__init__(f"{len(self.diagnostics)} invalid field(s):\n  {lines}")


def _positive(out, name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and value > 0
            and math.isfinite(value)):
        out.append(Diagnostic(name, value, "must be strictly positive"))


def check(scenario: Scenario) -> list[Diagnostic]:
    """Return every invariant violation in ``scenario`` (empty when valid)."""
    out: list[Diagnostic] = []
    r = scenario.radar
    for name in ("transmit_power", "tx_gain", "rx_gain", "wavelength", "rcs",
                 "pulse_duration", "estimator_variance", "snr_threshold",
                 "system_temperature", "noise_figure"):
        _positive(out, f"radar.{name}", getattr(r, name))
    if not r.ris_threshold_reduction >= 1:
        out.append(Diagnostic("radar.ris_threshold_reduction", r.ris_threshold_reduction,
                              "must be >= 1"))

    s = scenario.ris
    if s.num_elements < 1:
        out.append(Diagnostic("ris.num_elements", s.num_elements, "must be >= 1"))
    if s.num_modules < 1:
        out.append(Diagnostic("ris.num_modules", s.num_modules, "must be >= 1"))
    elif s.num_elements % s.num_modules != 0:
        out.append(Diagnostic("ris.num_elements", s.num_elements,
                              f"not divisible by num_modules={s.num_modules}"))
    elif s.num_elements // s.num_modules < 1:
        out.append(Diagnostic("ris.num_modules", s.num_modules,
                              "elements per module must be >= 1"))
    if not 0 < s.element_amplitude <= 1:
        out.append(Diagnostic("ris.element_amplitude", s.element_amplitude,
                              "must lie in (0, 1]"))
    if s.phase_bits < 0:
        out.append(Diagnostic("ris.phase_bits", s.phase_bits, "must be >= 0"))

    c = scenario.covert
    _positive(out, "covert.user_noise_power", c.user_noise_power)
    _positive(out, "covert.warden_noise_power", c.warden_noise_power)
    _positive(out, "covert.noise_density", c.noise_density)
    _positive(out, "covert.antenna_gain", c.antenna_gain)
    if not 0 < c.covert_threshold < 1:
        out.append(Diagnostic("covert.covert_threshold", c.covert_threshold,
                              "probability must lie in (0, 1)"))
    if c.warden_samples < 1:
        out.append(Diagnostic("covert.warden_samples", c.warden_samples, "must be >= 1"))
    if c.noise_mode not in NOISE_MODES:
        out.append(Diagnostic("covert.noise_mode", c.noise_mode, f"must be one of {NOISE_MODES}"))
    if c.csi_error < 0:
        out.append(Diagnostic("covert.csi_error", c.csi_error, "must be >= 0"))

    g = scenario.geometry
    if g.num_users < 1:
        out.append(Diagnostic("geometry.user_positions", g.num_users, "need at least one user"))
    for name in ("path_loss_exponent_direct", "path_loss_exponent_ris"):
        if getattr(g, name) < 2:
            out.append(Diagnostic(f"geometry.{name}", getattr(g, name), "must be >= 2"))
    _positive(out, "geometry.reference_gain", g.reference_gain)
    nodes = [("transmitter_position", g.transmitter_position), ("ris_position", g.ris_position)]
    nodes += [(f"user_positions[{i}]", p) for i, p in enumerate(g.user_positions)]
    nodes += [(f"warden_positions[{i}]", p) for i, p in enumerate(g.warden_positions)]
    for i, (na, pa) in enumerate(nodes):
        if len(pa) != 3:
            out.append(Diagnostic(f"geometry.{na}", pa, "must be a 3-vector"))
            continue
        for nb, pb in nodes[i + 1:]:
            if len(pb) == 3 and np.linalg.norm(np.subtract(pa, pb)) <= 0:
                out.append(Diagnostic(f"geometry.{na}", pa, f"coincides with {nb}"))

    b = scenario.budgets
    _positive(out, "budgets.total_power", b.total_power)
    _positive(out, "budgets.total_bandwidth", b.total_bandwidth)
    _positive(out, "budgets.total_modules", b.total_modules)
    if b.total_modules > s.num_modules:
        out.append(Diagnostic("budgets.total_modules", b.total_modules,
                              f"exceeds ris.num_modules={s.num_modules}"))
    if not 0 <= b.power_allocation_parameter <= 1:
        out.append(Diagnostic("budgets.power_allocation_parameter",
                              b.power_allocation_parameter, "must lie in [0, 1]"))
    if not 0 < b.radar_bandwidth_fraction <= 1:
        out.append(Diagnostic("budgets.radar_bandwidth_fraction",
                              b.radar_bandwidth_fraction, "must lie in (0, 1]"))
    if not math.isclose(b.total_power, r.transmit_power, rel_tol=1e-12):
        out.append(Diagnostic("budgets.total_power", b.total_power,
                              f"differs from radar.transmit_power={r.transmit_power}"))

    f = scenario.fading_mode
    if f.kind not in FADING_KINDS:
        out.append(Diagnostic("fading_mode.kind", f.kind, f"must be one of {FADING_KINDS}"))
    if f.k_factor < 0:
        out.append(Diagnostic("fading_mode.k_factor", f.k_factor, "must be >= 0"))
    return out


def validate(scenario: Scenario) -> Scenario:
    """Return ``scenario`` unchanged, or raise :class:`ScenarioError` listing all violations."""
    diagnostics = check(scenario)
    if diagnostics:
        raise ScenarioError(diagnostics)
    return scenario


# ---------------------------------------------------------------------------
# JSON loading

def _from_db(section: dict[str, Any]) -> dict[str, Any]:
    out = {}
    for key, value in section.items():
        for suffix in ("_dbw", "_db"):
            if key.endswith(suffix):
                out[key[: -len(suffix)]] = 10.0 ** (float(value) / 10.0)
                break
        else:
            out[key] = value
    return out


def _points(seq) -> tuple[tuple[float, float, float], ...]:
    return tuple(tuple(float(x) for x in p) for p in seq)


def from_dict(doc: dict[str, Any]) -> Scenario:
    """Build a scenario from a nested mapping (dB suffixes converted, no validation)."""
    radar = RadarParams(**_from_db(doc["radar"]))
    ris = RisConfig(**doc["ris"])
    covert = CovertParams(**_from_db(doc["covert"]))
    geo = dict(doc["geometry"])
    geo = _from_db(geo)
    geometry = Geometry(
        transmitter_position=tuple(float(x) for x in geo.pop("transmitter_position")),
        ris_position=tuple(float(x) for x in geo.pop("ris_position")),
        user_positions=_points(geo.pop("user_positions")),
        warden_positions=_points(geo.pop("warden_positions", ())),
        target_positions=_points(geo.pop("target_positions", ())),
        **geo,
    )
    budgets_doc = _from_db(doc.get("budgets", {}))
    budgets_doc.setdefault("total_power", radar.transmit_power)
    budgets_doc.setdefault("total_modules", ris.num_modules)
    budgets = Budgets(**budgets_doc)
    fading = doc.get("fading_mode", {})
    if isinstance(fading, str):
        fading = {"kind": fading}
    return Scenario(radar, ris, covert, geometry, budgets, FadingMode(**fading))


def load(path: str | Path) -> Scenario:
    """Load and validate a JSON scenario file."""
    with open(path) as fh:
        return validate(from_dict(json.load(fh)))


def bundled_path(name: str) -> Path:
    """Path of a bundled scenario, e.g. ``bundled_path("paper_fig5")``."""
    if not name.endswith(".json"):
        name += ".json"
    return Path(str(resources.files("jrcc") / "data" / name))


def load_bundled(name: str) -> Scenario:
    return load(bundled_path(name))
