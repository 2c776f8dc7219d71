"""System parameters and the flat key=value configuration format.

Config files are plain text, one ``key = value`` per line, ``#`` starts a
comment. Keys are exactly the ``SystemParams`` field names (the confidence
parameter is spelled ``lambda`` in files and ``lambda_`` in Python).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, DomainError

OPEN = "open"
CLOSED = "closed"


@dataclass(frozen=True)
class SystemParams:
    """All physical and numerical parameters of one run.

    Sites are numbered 1..L. The initial product state has sites 1..l up,
    l+1..l+w down, the rest up. ``n_max = 0`` freezes the phonons out
    (pure spin chain).
    """

    L: int
    w: int
    t_max: float
    l: int = -1  # -1 means "center the string": l = (L - w) // 2
    h_x: float = 0.2
    h_z: float = 1.0
    omega0: float = 1.0
    g: float = 0.0
    n_max: int = 0
    boundary: str = OPEN
    dt_sample: float = 0.5
    dt_step: float = 0.05
    krylov_dim: int = 30
    krylov_tol: float = 1e-9
    lambda_: float = 0.25

    def __post_init__(self):
        if self.l < 0:
            object.__setattr__(self, "l", (self.L - self.w) // 2)
        _validate(self)

    @property
    def n_bonds(self) -> int:
        return self.L if self.boundary == CLOSED else self.L - 1

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


def _validate(p: SystemParams) -> None:
    def fail(key, msg):
        raise DomainError(f"invalid parameter '{key}': {msg}")

    if p.L < 1:
        fail("L", f"site count must be >= 1, got {p.L}")
    if p.w < 1:
        fail("w", f"string width must be >= 1, got {p.w}")
    if p.l < 0:
        fail("l", f"left block length must be >= 0, got {p.l}")
    if p.l + p.w > p.L:
        fail("w", f"string does not fit: l + w = {p.l + p.w} > L = {p.L}")
    if p.omega0 <= 0:
        fail("omega0", f"phonon frequency must be > 0, got {p.omega0}")
    if p.g < 0:
        fail("g", f"coupling must be >= 0, got {p.g}")
    if p.n_max < 0:
        fail("n_max", f"phonon cutoff must be >= 0, got {p.n_max}")
    if p.boundary not in (OPEN, CLOSED):
        fail("boundary", f"must be '{OPEN}' or '{CLOSED}', got {p.boundary!r}")
    if p.boundary == CLOSED and p.L < 3:
        fail("boundary", f"closed boundary needs L >= 3, got L = {p.L}")
    if p.t_max < 0:
        fail("t_max", f"must be >= 0, got {p.t_max}")
    if p.dt_sample <= 0:
        fail("dt_sample", f"must be > 0, got {p.dt_sample}")
    if p.dt_step <= 0:
        fail("dt_step", f"must be > 0, got {p.dt_step}")
    if p.krylov_dim < 2:
        fail("krylov_dim", f"must be >= 2, got {p.krylov_dim}")
    if p.krylov_tol <= 0:
        fail("krylov_tol", f"must be > 0, got {p.krylov_tol}")
    if p.lambda_ < 0:
        fail("lambda", f"must be >= 0, got {p.lambda_}")


# config key -> (field name, parser)
def _parse_int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"key '{key}': expected an integer, got {text!r}") from None


def _parse_float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"key '{key}': expected a number, got {text!r}") from None


def _parse_str(key, text):
    return text


_INT_KEYS = ("L", "l", "w", "n_max", "krylov_dim")
_FLOAT_KEYS = ("h_x", "h_z", "omega0", "g", "t_max", "dt_sample", "dt_step",
               "krylov_tol", "lambda")
_STR_KEYS = ("boundary",)

CONFIG_KEYS = _INT_KEYS + _FLOAT_KEYS + _STR_KEYS


def _field_name(key: str) -> str:
    return "lambda_" if key == "lambda" else key


def _config_key(field: str) -> str:
    return "lambda" if field == "lambda_" else field


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse key=value lines into a {config key: string value} dict."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        entries[key] = value
    return entries


def params_from_entries(entries: dict) -> SystemParams:
    kwargs = {}
    for key, value in entries.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key '{key}'")
        if key in _INT_KEYS:
            parsed = _parse_int(key, value)
        elif key in _FLOAT_KEYS:
            parsed = _parse_float(key, value)
        else:
            parsed = _parse_str(key, value)
        kwargs[_field_name(key)] = parsed
    missing = [k for k in ("L", "w", "t_max") if _field_name(k) not in kwargs]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    return SystemParams(**kwargs)


def load_params(path, overrides: dict | None = None) -> SystemParams:
    """Read a config file and apply ``overrides`` (config-key -> string) after parsing."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file '{path}': {exc}") from None
    entries = parse_config_text(text, source=str(path))
    for key, value in (overrides or {}).items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key '{key}' in override")
        entries[key] = str(value)
    return params_from_entries(entries)


def format_config(p: SystemParams) -> str:
    """Render effective parameters; parsing the result reproduces ``p`` exactly."""
    lines = []
    for key in CONFIG_KEYS:
        value = getattr(p, _field_name(key))
        lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
    return "\n".join(lines) + "\n"
