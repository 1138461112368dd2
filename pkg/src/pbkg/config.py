"""Run configuration stored as a sectioned ``key = value`` file."""
from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, fields, replace

from .errors import ConfigError, PBKGError
from .modespace import ModeLattice
from .pseudoboson import ThetaParam
from .quadrature import TAIL_METHODS, QuadSpec

OUTPUT_FORMATS = ("csv", "json")


def parse_list(text, item=float):
    """Comma-separated list; empty items are rejected."""
    parts = [p.strip() for p in str(text).split(",")]
    if not parts or any(not p for p in parts):
        raise ConfigError(f"malformed list {text!r}")
    try:
        return [item(p) for p in parts]
    except (ValueError, PBKGError) as exc:
        raise ConfigError(f"malformed list {text!r}: {exc}") from None


def parse_angle(text):
    return ThetaParam.parse(text).theta


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run depends on.

    Angles are kept as text (``"0.25pi"``, ``"pi/6"`` or radians) so that the
    file round-trips exactly and ``pi/4`` stays an exact intent.
    """

    m: float = 1.0
    theta: str = "0.25pi"
    M: int = 9
    dk: float = 0.5
    d: int = 2
    rule: str = "trapezoid"
    k_max: float = 40.0
    refinements: str = "0.1, 0.05, 0.025"
    lattice_x: float = 0.5
    abs_tol: float = 1e-10
    tail_method: str = "between_zeros_acceleration"
    max_subdivisions: int = 50000
    acceleration_depth: int = 12
    format: str = "csv"
    out: str = ""
    seed: int = 20240611
    scan_thetas: str = "0.25pi"
    x_start: float = 0.1
    x_stop: float = 3.0
    x_step: float = 0.1
    smear_n: str = "4, 8, 16, 32"
    smear_y: str = "1.0"
    divergence_thetas: str = "0, 0.125pi, pi/6, 0.2, 0.25pi"

    SECTIONS = {
        "physics": ("m", "theta"),
        "lattice": ("M", "dk", "d", "rule", "k_max", "refinements", "lattice_x"),
        "quadrature": ("abs_tol", "tail_method", "max_subdivisions", "acceleration_depth"),
        "output": ("format", "out"),
        "run": ("seed",),
        "scan": ("scan_thetas", "x_start", "x_stop", "x_step"),
        "smear": ("smear_n", "smear_y"),
        "divergence": ("divergence_thetas",),
    }

    def validate(self):
        """Raise :class:`ConfigError` on any invalid field; returns ``self``."""
        if not self.m > 0:
            raise ConfigError(f"mass must be positive, got {self.m}")
        try:
            ThetaParam.parse(self.theta)
            self.lattice()
            self.quad_spec()
        except PBKGError as exc:
            raise ConfigError(str(exc)) from None
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError(f"format must be one of {OUTPUT_FORMATS}, got {self.format!r}")
        if self.tail_method not in TAIL_METHODS:
            raise ConfigError(f"tail_method must be one of {TAIL_METHODS}")
        parse_list(self.refinements)
        parse_list(self.scan_thetas, parse_angle)
        parse_list(self.divergence_thetas, parse_angle)
        parse_list(self.smear_n, int)
        parse_list(self.smear_y)
        if not self.x_step > 0 or self.x_stop < self.x_start:
            raise ConfigError("scan range needs x_step > 0 and x_stop >= x_start")
        return self

    def lattice(self):
        return ModeLattice(M=self.M, dk=self.dk, m=self.m, d=self.d, rule=self.rule)

    def quad_spec(self):
        return QuadSpec(abs_tol=self.abs_tol, tail_method=self.tail_method,
                        max_subdivisions=self.max_subdivisions, acceleration_depth=self.acceleration_depth)

    @property
    def theta_value(self):
        return parse_angle(self.theta)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_text(self):
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        values = asdict(self)
        for section, keys in self.SECTIONS.items():
            parser[section] = {k: _format_value(values[k]) for k in keys}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text):
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"unreadable config: {exc}") from None
        types = {f.name: f.type for f in fields(cls)}
        known = {k: s for s, keys in cls.SECTIONS.items() for k in keys}
        kwargs = {}
        for section in parser.sections():
            for key, raw in parser[section].items():
                if known.get(key) != section:
                    raise ConfigError(f"unknown key {section}.{key}")
                kwargs[key] = _coerce(raw, types[key], key)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def _format_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(raw, typ, key):
    try:
        if typ in ("int", int):
            return int(raw)
        if typ in ("float", float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw
