"""Run configuration: a single JSON document with fixed key names."""

import json
from dataclasses import dataclass

from .barrier import BarrierParams
from .propagator import PacketParams
from .units import free_passage_time, wavenumber_from_energy

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


_SCHEMA = {
    "barrier": {"V0_eV": True, "d_nm": True, "m_ratio": True},
    "packet": {"E0_eV": False, "k0_per_nm": False, "delta_over_k0": False},
    "poles": {"count_per_quadrant": False},
    "scan": {"t_min_over_tf": False, "t_max_over_tf": False, "steps": False,
             "x_obs_nm": False},
    "output": {"format": False, "path": False},
}
_REQUIRED_SECTIONS = ("barrier", "packet")


@dataclass(frozen=True)
class RunConfig:
    barrier: BarrierParams
    packet: PacketParams
    count_per_quadrant: int = 1000
    t_min_over_tf: float = 0.01
    t_max_over_tf: float = 5.0
    steps: int = 2000
    x_obs: float = None
    output_format: str = None
    output_path: str = None

    @property
    def t_f(self):
        return free_passage_time(self.barrier.d, self.packet.k0, self.barrier.m_ratio)

    @property
    def x(self):
        return self.barrier.d if self.x_obs is None else self.x_obs

    def time_grid(self):
        import numpy as np

        return np.linspace(self.t_min_over_tf, self.t_max_over_tf, self.steps) * self.t_f


def _number(section, key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    return int(value) if integer else float(value)


def parse_config(doc):
    """Validate a config mapping and build a :class:`RunConfig`.

    Unknown sections or keys are rejected.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    for sec in doc:
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown config section {sec!r}")
    for sec in _REQUIRED_SECTIONS:
        if sec not in doc:
            raise ConfigError(f"missing config section {sec!r}")
    for sec, body in doc.items():
        if not isinstance(body, dict):
            raise ConfigError(f"section {sec!r} must be an object")
        for key in body:
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"unknown key {sec}.{key}")
        for key, required in _SCHEMA[sec].items():
            if required and key not in body:
                raise ConfigError(f"missing key {sec}.{key}")

    b = doc["barrier"]
    try:
        barrier = BarrierParams(_number("barrier", "V0_eV", b["V0_eV"]),
                                _number("barrier", "d_nm", b["d_nm"]),
                                _number("barrier", "m_ratio", b["m_ratio"]))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    p = doc["packet"]
    if ("E0_eV" in p) == ("k0_per_nm" in p):
        raise ConfigError("packet needs exactly one of E0_eV / k0_per_nm")
    try:
        if "E0_eV" in p:
            k0 = wavenumber_from_energy(_number("packet", "E0_eV", p["E0_eV"]), barrier.m_ratio)
        else:
            k0 = _number("packet", "k0_per_nm", p["k0_per_nm"])
        ratio = _number("packet", "delta_over_k0", p.get("delta_over_k0", 0.0))
        if ratio < 0:
            raise ConfigError("packet.delta_over_k0 must be >= 0")
        packet = PacketParams(k0, ratio * k0)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    count = _number("poles", "count_per_quadrant",
                    doc.get("poles", {}).get("count_per_quadrant", 1000), integer=True)
    if count < 1:
        raise ConfigError("poles.count_per_quadrant must be >= 1")

    s = doc.get("scan", {})
    t_min = _number("scan", "t_min_over_tf", s.get("t_min_over_tf", 0.01))
    t_max = _number("scan", "t_max_over_tf", s.get("t_max_over_tf", 5.0))
    steps = _number("scan", "steps", s.get("steps", 2000), integer=True)
    x_obs = s.get("x_obs_nm")
    if x_obs is not None:
        x_obs = _number("scan", "x_obs_nm", x_obs)
        if x_obs < barrier.d:
            raise ConfigError("scan.x_obs_nm must be >= d_nm (transmitted region)")
    if not t_min > 0:
        raise ConfigError("scan.t_min_over_tf must be > 0")
    if not t_max > t_min:
        raise ConfigError("scan.t_max_over_tf must exceed t_min_over_tf")
    if steps < 2:
        raise ConfigError("scan.steps must be >= 2")

    o = doc.get("output", {})
    fmt = o.get("format")
    if fmt is not None and fmt not in ("csv", "json"):
        raise ConfigError("output.format must be 'csv' or 'json'")
    path = o.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path must be a string")

    return RunConfig(barrier, packet, count, t_min, t_max, steps, x_obs, fmt, path)


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(doc)
