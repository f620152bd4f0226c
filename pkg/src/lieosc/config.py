"""Run configuration: an INI file with flat key = value sections.

Example::

    [system]
    family = caldirola-kanai

    [parameters]
    m0 = 1
    mu = 0.5
    omega = 2

    [span]
    t0 = 0
    t1 = 10
    n_points = 1001

    [initial]
    x0 = 1
    p0 = 0

Sampled systems take either ``F = <expression in t>`` or ``file = <csv>``
(columns ``t,b0,b1,b2`` or ``t,F``) in a ``[sampled]`` section.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .system import CATALOG, CoefficientCurve, catalog_curve, sampled_coefficients

REQUIRED = {
    "constant": ("omega",),
    "caldirola-kanai": ("mu", "omega"),
    "powerlaw2": ("L", "c1", "omega"),
    "quartic": ("u0", "u1", "omega"),
    "sampled": (),
}
PARAMETER_NAMES = ("m0", "mu", "omega", "L", "c1", "u0", "u1", "k", "b0", "b1", "b2")
TOLERANCE_NAMES = ("rel_tol", "abs_tol", "detect_tol", "compare_tol", "drift_tol")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str
    parameters: dict
    t0: float
    t1: float
    n_points: int
    x0: float = 1.0
    p0: float = 0.0
    rho0: Optional[float] = None
    rhodot0: Optional[float] = None
    tolerances: dict = field(default_factory=dict)
    invariants: tuple = ()
    sampled: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def __post_init__(self):
        if self.family not in CATALOG:
            raise ConfigError(f"unknown family {self.family!r}; expected one of {', '.join(CATALOG)}")
        if not self.t1 > self.t0:
            raise ConfigError(f"span needs t1 > t0, got t0={self.t0}, t1={self.t1}")
        if self.n_points < 2:
            raise ConfigError(f"n_points must be at least 2, got {self.n_points}")
        missing = [p for p in REQUIRED[self.family] if p not in self.parameters]
        if self.family == "constant" and {"b0", "b1", "b2"} & self.parameters.keys():
            missing = []
        if missing:
            raise ConfigError(f"family {self.family!r} needs parameters: {', '.join(missing)}")
        if self.family == "sampled" and not ({"F", "file"} & self.sampled.keys()):
            raise ConfigError("family 'sampled' needs F or file in the [sampled] section")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_points)

    @property
    def omega(self) -> float:
        return float(self.parameters.get("omega", 1.0))

    def tol(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def curve(self) -> CoefficientCurve:
        if self.family != "sampled":
            try:
                return catalog_curve(self.family, **self.parameters)
            except (KeyError, ValueError) as exc:
                raise ConfigError(str(exc)) from exc
        return self._sampled_curve()

    def _sampled_curve(self) -> CoefficientCurve:
        if "file" in self.sampled:
            path = Path(self.sampled["file"])
            if not path.is_absolute():
                path = self.base_dir / path
            try:
                data = np.genfromtxt(path, delimiter=",", names=True)
            except OSError as exc:
                raise ConfigError(f"cannot read samples: {exc}") from exc
            names = data.dtype.names or ()
            t = np.asarray(data["t"], dtype=float) if "t" in names else None
            if t is None:
                raise ConfigError("sample file needs a 't' column")
            if {"b0", "b1", "b2"} <= set(names):
                values = np.column_stack([data["b0"], data["b1"], data["b2"]])
            elif "F" in names:
                values = self._from_frequency(np.asarray(data["F"], dtype=float))
            else:
                raise ConfigError("sample file needs columns b0,b1,b2 or F")
        else:
            n = int(self.sampled.get("samples", 2001))
            t = np.linspace(self.t0, self.t1, n)
            values = self._from_frequency(parse_expression(self.sampled["F"])(t) * np.ones_like(t))
        try:
            return sampled_coefficients(t, values)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def _from_frequency(self, F: np.ndarray) -> np.ndarray:
        m0 = float(self.parameters.get("m0", 1.0))
        return np.column_stack([np.full_like(F, 1.0 / m0), np.zeros_like(F), self.omega ** 2 * F])


def parse_expression(text: str):
    """Compile an expression in ``t`` to a numpy function."""
    import sympy

    t = sympy.Symbol("t")
    try:
        expr = sympy.parse_expr(text, local_dict={"t": t})
    except (SyntaxError, TypeError, sympy.SympifyError) as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc}") from exc
    extra = expr.free_symbols - {t}
    if extra:
        raise ConfigError(f"expression {text!r} uses unknown symbols {sorted(map(str, extra))}")
    return sympy.lambdify(t, expr, "numpy")


def _float(section, key, where):
    try:
        return float(section[key])
    except ValueError as exc:
        raise ConfigError(f"[{where}] {key} is not a number: {section[key]!r}") from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys such as L and F are case sensitive
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_parser(parser, base_dir=path.parent)


def config_from_parser(parser: configparser.ConfigParser, base_dir=Path(".")) -> RunConfig:
    for name in ("system", "span"):
        if not parser.has_section(name):
            raise ConfigError(f"missing section [{name}]")
    system = parser["system"]
    if "family" not in system:
        raise ConfigError("[system] needs a family")

    params = {}
    if parser.has_section("parameters"):
        for key in parser["parameters"]:
            if key not in PARAMETER_NAMES:
                raise ConfigError(f"unknown parameter {key!r}")
            params[key] = _float(parser["parameters"], key, "parameters")

    span = parser["span"]
    for key in ("t0", "t1", "n_points"):
        if key not in span:
            raise ConfigError(f"[span] needs {key}")
    try:
        n_points = int(span["n_points"])
    except ValueError as exc:
        raise ConfigError(f"[span] n_points is not an integer: {span['n_points']!r}") from exc

    initial = parser["initial"] if parser.has_section("initial") else {}
    opt = {k: _float(initial, k, "initial") for k in ("x0", "p0", "rho0", "rhodot0") if k in initial}

    tolerances = {}
    if parser.has_section("tolerances"):
        for key in parser["tolerances"]:
            if key not in TOLERANCE_NAMES:
                raise ConfigError(f"unknown tolerance {key!r}")
            tolerances[key] = _float(parser["tolerances"], key, "tolerances")

    invariants = ()
    if parser.has_section("invariants") and "names" in parser["invariants"]:
        invariants = tuple(n.strip() for n in parser["invariants"]["names"].split(",") if n.strip())

    sampled = dict(parser["sampled"]) if parser.has_section("sampled") else {}
    return RunConfig(
        family=system["family"].strip(), parameters=params,
        t0=_float(span, "t0", "span"), t1=_float(span, "t1", "span"), n_points=n_points,
        tolerances=tolerances, invariants=invariants, sampled=sampled, base_dir=Path(base_dir),
        **opt,
    )
