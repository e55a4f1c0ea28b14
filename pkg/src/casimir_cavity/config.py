"""JSON run configuration with strict key checking.

Example::

    {
      "geometry": {"Lx": 3.141592653589793, "Ly": 3.141592653589793},
      "motions": [{"wall": "right", "epsilon": 1e-3, "Omega": 3.65, "cycles": 100}]
    }

Each motion takes either ``duration_T`` or ``cycles`` (T = cycles * 2 pi / Omega).
Lengths default to units of Lx (``Lx`` = 1 when omitted).
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .cavity import CavityGeometry, Wall, WallMotion
from .dynamics import DEFAULT_DT_TOL
from .perturbation import ScanGrid, TwoWallConfig

UNITS = ("normalized", "absolute")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class ModeCutoffs:
    kx_max: int = 30
    ky_max: int = 10
    max_modes: int = 10_000


@dataclass(frozen=True)
class IntegratorSettings:
    dt: Optional[float] = None
    dt_tolerance: float = DEFAULT_DT_TOL


@dataclass(frozen=True)
class ScanSettings:
    """Grid ranges; ``None`` entries are filled relative to Omega by ScanGrid.default."""

    kx_min: Optional[float] = None
    kx_max: Optional[float] = None
    kx_count: int = 200
    ky_min: Optional[float] = None
    ky_max: Optional[float] = None
    ky_count: int = 200


@dataclass(frozen=True)
class EvolveSettings:
    n: tuple[int, int] = (1, 1)
    k: tuple[int, int] = (1, 1)
    every: int = 1


@dataclass(frozen=True)
class InterfereSettings:
    k: Optional[tuple[float, float]] = None
    phi_count: int = 73


@dataclass(frozen=True)
class ValidateSettings:
    rel_err_max: float = 0.10
    defect_factor: float = 10.0


@dataclass(frozen=True)
class SnapshotSettings:
    t: float = 0.0
    x_count: int = 21
    y_min: float = 0.0
    y_max: float = 10.0
    y_count: int = 101


@dataclass(frozen=True)
class RunConfig:
    geometry: CavityGeometry
    motions: tuple[WallMotion, ...]
    modes: ModeCutoffs = field(default_factory=ModeCutoffs)
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    scan: ScanSettings = field(default_factory=ScanSettings)
    evolve: EvolveSettings = field(default_factory=EvolveSettings)
    interfere: InterfereSettings = field(default_factory=InterfereSettings)
    validate: ValidateSettings = field(default_factory=ValidateSettings)
    packet: Optional[str] = None
    packet_kx: Optional[int] = None
    snapshot: Optional[SnapshotSettings] = None
    output_dir: str = "out"
    units: str = "normalized"

    @property
    def right(self) -> WallMotion:
        return next(m for m in self.motions if m.wall is Wall.RIGHT)

    @property
    def drive(self):
        """The right-wall motion, or a TwoWallConfig when both walls move."""
        if len(self.motions) == 2:
            left = next(m for m in self.motions if m.wall is Wall.LEFT)
            return TwoWallConfig(left=left, right=self.right)
        return self.right

    @property
    def normalized(self) -> bool:
        return self.units == "normalized"

    def scan_grid(self) -> ScanGrid:
        s = self.scan
        base = ScanGrid.default(self.right.Omega, count=s.kx_count)
        pick = lambda value, fallback: fallback if value is None else value  # noqa: E731
        return ScanGrid(
            kx_min=pick(s.kx_min, base.kx_min),
            kx_max=pick(s.kx_max, base.kx_max),
            kx_count=s.kx_count,
            ky_min=pick(s.ky_min, base.ky_min),
            ky_max=pick(s.ky_max, base.ky_max),
            ky_count=s.ky_count,
        )

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "motions":
                value = [_motion_dict(m) for m in value]
            elif dataclasses.is_dataclass(value):
                value = dataclasses.asdict(value)
            out[f.name] = value
        return out


def _motion_dict(m: WallMotion) -> dict:
    return {
        "wall": m.wall.value,
        "epsilon": m.epsilon,
        "Omega": m.Omega,
        "phase": m.phase,
        "duration_T": m.duration_T,
    }


def _check_keys(section: str, data: Any, allowed) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object, got {type(data).__name__}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        name = f"{section}.{unknown[0]}" if section else unknown[0]
        raise ConfigError(f"unknown config key '{name}'")
    return data


def _number(section, key, value, positive=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key} must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{section}.{key} must be > 0, got {value!r}")
    return int(value) if integer else float(value)


def _section(cls, name, data, positive=(), integer=(), pairs=()):
    if data is None:
        return cls()
    allowed = [f.name for f in dataclasses.fields(cls)]
    _check_keys(name, data, allowed)
    kwargs = {}
    for key, value in data.items():
        if value is None:
            kwargs[key] = None
        elif key in pairs:
            if not (isinstance(value, list) and len(value) == 2):
                raise ConfigError(f"{name}.{key} must be a two-element list")
            kwargs[key] = tuple(
                _number(name, key, v, positive=True, integer=key in integer) for v in value
            )
        else:
            kwargs[key] = _number(name, key, value, positive=key in positive, integer=key in integer)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _parse_motion(i, data) -> WallMotion:
    name = f"motions[{i}]"
    _check_keys(name, data, ["wall", "epsilon", "Omega", "phase", "duration_T", "cycles"])
    for key in ("epsilon", "Omega"):
        if key not in data:
            raise ConfigError(f"{name}.{key} is required")
    wall = data.get("wall", "right")
    if wall not in ("left", "right"):
        raise ConfigError(f"{name}.wall must be 'left' or 'right', got {wall!r}")
    eps = _number(name, "epsilon", data["epsilon"])
    if not 0 <= eps < 0.1:
        raise ConfigError(f"{name}.epsilon must be < 0.1 and >= 0, got {eps}")
    Omega = _number(name, "Omega", data["Omega"], positive=True)
    if ("duration_T" in data) == ("cycles" in data):
        raise ConfigError(f"{name}: give exactly one of duration_T or cycles")
    if "cycles" in data:
        T = _number(name, "cycles", data["cycles"], positive=True) * 2.0 * math.pi / Omega
    else:
        T = _number(name, "duration_T", data["duration_T"], positive=True)
    phase = _number(name, "phase", data.get("phase", 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            return WallMotion(epsilon=eps, Omega=Omega, duration_T=T, phase=phase, wall=Wall(wall))
        except ValueError as exc:
            raise ConfigError(f"{name}: {exc}") from exc


def parse_config(data: dict, base_dir: Optional[Path] = None) -> RunConfig:
    top = [
        "geometry", "motions", "modes", "integrator", "scan", "evolve", "interfere",
        "validate", "packet", "packet_kx", "snapshot", "output_dir", "units",
    ]
    _check_keys("", data, top)
    if "geometry" not in data:
        raise ConfigError("geometry is required")
    geo = _check_keys("geometry", data["geometry"], ["Lx", "Ly", "Lz"])
    if "Ly" not in geo:
        raise ConfigError("geometry.Ly is required")
    try:
        geometry = CavityGeometry(
            Lx=_number("geometry", "Lx", geo.get("Lx", 1.0), positive=True),
            Ly=_number("geometry", "Ly", geo["Ly"], positive=True),
            Lz=_number("geometry", "Lz", geo.get("Lz", 1.0), positive=True),
        )
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from exc

    raw_motions = data.get("motions")
    if not isinstance(raw_motions, list) or not 1 <= len(raw_motions) <= 2:
        raise ConfigError("motions must be a list of one or two wall motions")
    motions = tuple(_parse_motion(i, m) for i, m in enumerate(raw_motions))
    walls = [m.wall for m in motions]
    if Wall.RIGHT not in walls:
        raise ConfigError("motions must include a right-wall motion")
    if len(motions) == 2 and sorted(w.value for w in walls) != ["left", "right"]:
        raise ConfigError("two motions must be one left wall and one right wall")

    modes = _section(ModeCutoffs, "modes", data.get("modes"), positive=("kx_max", "ky_max", "max_modes"),
                     integer=("kx_max", "ky_max", "max_modes"))
    if modes.kx_max * modes.ky_max > modes.max_modes:
        raise ConfigError(f"modes: kx_max*ky_max exceeds max_modes={modes.max_modes}")
    integrator = _section(IntegratorSettings, "integrator", data.get("integrator"),
                          positive=("dt", "dt_tolerance"))
    scan = _section(ScanSettings, "scan", data.get("scan"),
                    positive=("kx_min", "kx_max", "ky_min", "ky_max", "kx_count", "ky_count"),
                    integer=("kx_count", "ky_count"))
    evolve = _section(EvolveSettings, "evolve", data.get("evolve"), positive=("every",),
                      integer=("n", "k", "every"), pairs=("n", "k"))
    interfere = _section(InterfereSettings, "interfere", data.get("interfere"), positive=("phi_count",),
                         integer=("phi_count",), pairs=("k",))
    validate = _section(ValidateSettings, "validate", data.get("validate"),
                        positive=("rel_err_max", "defect_factor"))
    snapshot = None
    if data.get("snapshot") is not None:
        snapshot = _section(SnapshotSettings, "snapshot", data["snapshot"],
                            positive=("x_count", "y_count"), integer=("x_count", "y_count"))

    units = data.get("units", "normalized")
    if units not in UNITS:
        raise ConfigError(f"units must be one of {UNITS}, got {units!r}")
    packet = data.get("packet")
    if packet is not None:
        if not isinstance(packet, str):
            raise ConfigError("packet must be a file path")
        if base_dir is not None and not Path(packet).is_absolute():
            packet = str(base_dir / packet)
    packet_kx = data.get("packet_kx")
    if packet_kx is not None:
        packet_kx = _number("", "packet_kx", packet_kx, positive=True, integer=True)
    output_dir = data.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir must be a string")

    cfg = RunConfig(
        geometry=geometry, motions=motions, modes=modes, integrator=integrator, scan=scan,
        evolve=evolve, interfere=interfere, validate=validate, packet=packet, packet_kx=packet_kx,
        snapshot=snapshot, output_dir=output_dir, units=units,
    )
    try:
        cfg.scan_grid()
    except ValueError as exc:
        raise ConfigError(f"scan: {exc}") from exc
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data, base_dir=path.parent)
