"""INI run configuration: schema, validation and a stable hash.

Every section and key is declared up front; anything else is rejected with
the file, line, section and key named in the message.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "SCHEMA", "COMMANDS"]

COMMANDS = ("hf", "scatter", "verify", "asympt")


class ConfigError(ValueError):
    pass


def _number(text: str) -> float:
    """Float or exact fraction such as ``1/3``."""
    text = text.strip()
    try:
        return float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}") from None


def _positive(text: str) -> float:
    x = _number(text)
    if not (x > 0 and math.isfinite(x)):
        raise ValueError(f"must be positive, got {text!r}")
    return x


def _nonnegative(text: str) -> float:
    x = _number(text)
    if not (x >= 0 and math.isfinite(x)):
        raise ValueError(f"must be nonnegative, got {text!r}")
    return x


def _count(text: str) -> int:
    x = int(text.strip())
    if x < 0:
        raise ValueError(f"must be a nonnegative integer, got {text!r}")
    return x


def _list(item):
    def parse(text: str):
        parts = text.replace(",", " ").split()
        if not parts:
            raise ValueError("empty list")
        return tuple(item(p) for p in parts)

    return parse


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(*options):
    def parse(text: str) -> str:
        t = text.strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return t

    return parse


def _momenta(text: str) -> tuple[tuple[int, int, int], ...]:
    """``"1,1,0; -1,0,0"`` -> integer triples."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = [int(v) for v in chunk.replace(",", " ").split()]
        if len(vals) != 3:
            raise ValueError(f"momentum {chunk!r} needs three integers")
        out.append(tuple(vals))
    return tuple(out)


# section -> key -> (parser, default); default None means "not set"
SCHEMA: dict[str, dict[str, tuple]] = {
    "potential": {
        "kind": (_choice("bump", "soft_sphere"), "bump"),
        "V0": (_nonnegative, 1.0),
        "R0": (_positive, 1.0),
        "quadrature_tol": (_positive, 1e-10),
    },
    "box": {
        "L": (_list(_positive), (20.0,)),
        "N_up": (_count, None),
        "N_down": (_count, None),
        "rho_up": (_positive, None),
        "rho_down": (_positive, None),
        "auto_snap": (_bool, False),
    },
    "scattering": {
        "gamma": (_nonnegative, 1.0 / 3.0),
        "rho": (_list(_positive), (1e-4, 1e-3, 1e-2)),
        "tol": (_positive, 1e-12),
    },
    "asymptotics": {
        "rho_up": (_list(_nonnegative), (0.005,)),
        "rho_down": (_list(_nonnegative), (0.005,)),
        "a": (_nonnegative, None),
        "C": (_positive, 1.0),
    },
    "fock": {
        "L": (_positive, 2.0 * math.pi),
        "N_up": (_count, 7),
        "N_down": (_count, 7),
        "extra_up": (_momenta, ((1, 1, 0),)),
        "extra_down": (_momenta, ((-1, -1, 0),)),
        "max_modes": (_count, 16),
        "n_states": (_count, 20),
        "mode": (_choice("lower", "upper"), "lower"),
        "gamma": (_nonnegative, None),
        "alpha": (_positive, None),
        "beta": (_positive, 0.1),
        "cutoffs": (_choice("smooth", "indicator"), "smooth"),
        "h": (_positive, 1e-4),
        "lambda": (_nonnegative, 0.5),
        "enforce_discard": (_bool, False),
        "corrupt_sign": (_bool, False),
    },
}

COMMAND_SECTIONS = {
    "hf": ("potential", "box"),
    "scatter": ("potential", "scattering"),
    "asympt": ("potential", "asymptotics"),
    "verify": ("potential", "fock"),
}

# exponents used when [fock] gamma / alpha are left unset
MODE_DEFAULTS = {"lower": (1.0 / 3.0, 2.0 / 3.0), "upper": (2.0 / 9.0, 2.0 / 3.0 + 1.0 / 42.0)}


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)
    explicit: frozenset = frozenset()
    digest: str = ""

    def get(self, section: str, key: str):
        return self.values[section][key]

    def is_set(self, section: str, key: str) -> bool:
        return (section, key) in self.explicit


def _line_of(text: str, section: str, key: str | None) -> int | None:
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if key is None and current == section:
                return no
        elif key is not None and current == section and "=" in line:
            if line.split("=", 1)[0].strip() == key:
                return no
    return None


def parse_config(text: str, command: str, source: str = "<config>") -> RunConfig:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None

    def where(section, key=None):
        line = _line_of(text, section, key)
        loc = f"{source}:{line}" if line else source
        return f"{loc}: [{section}]" + (f" {key}" if key else "")

    allowed = COMMAND_SECTIONS[command]
    values: dict[str, dict] = {}
    explicit = set()
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{where(section)}: unknown section")
        if section not in allowed:
            raise ConfigError(f"{where(section)}: section is not used by '{command}'")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{where(section, key)}: unknown key")
            parser, _ = SCHEMA[section][key]
            try:
                values.setdefault(section, {})[key] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"{where(section, key)}: {exc}") from None
            explicit.add((section, key))
    for section in allowed:
        sect = values.setdefault(section, {})
        for key, (_, default) in SCHEMA[section].items():
            sect.setdefault(key, default)
    _cross_validate(command, values, explicit, where)
    canon = repr(sorted((s, sorted(v.items())) for s, v in values.items()))
    digest = hashlib.sha256(f"{command}|{canon}".encode()).hexdigest()
    return RunConfig(command, values, frozenset(explicit), digest)


def _cross_validate(command, values, explicit, where):
    if command == "hf":
        box = values["box"]
        counts = box["N_up"] is not None and box["N_down"] is not None
        targets = box["rho_up"] is not None and box["rho_down"] is not None
        if counts == targets:
            raise ConfigError(f"{where('box')}: give either N_up and N_down or rho_up and rho_down")
        if counts and min(box["N_up"], box["N_down"]) < 1:
            raise ConfigError(f"{where('box', 'N_up')}: particle numbers must be at least 1")
    if command == "scatter":
        sc, R0 = values["scattering"], values["potential"]["R0"]
        for rho in sc["rho"]:
            if rho ** (-sc["gamma"]) <= R0:
                raise ConfigError(f"{where('scattering', 'rho')}: radius rho^-gamma = {rho ** (-sc['gamma']):g} must exceed R0 = {R0:g}")
    if command == "asympt":
        a = values["asymptotics"]
        if len(a["rho_up"]) != len(a["rho_down"]):
            raise ConfigError(f"{where('asymptotics', 'rho_down')}: rho_up and rho_down need equal lengths")
    if command == "verify":
        f = values["fock"]
        if min(f["N_up"], f["N_down"]) < 1:
            raise ConfigError(f"{where('fock', 'N_up')}: particle numbers must be at least 1")
        g, al = MODE_DEFAULTS[f["mode"]]
        if f["gamma"] is None:
            f["gamma"] = g
        if f["alpha"] is None:
            f["alpha"] = al
        if f["lambda"] > 1:
            raise ConfigError(f"{where('fock', 'lambda')}: must lie in [0, 1]")


def load_config(path: str | Path, command: str) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, command, str(path))
