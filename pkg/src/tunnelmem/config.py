"""Run configuration: INI-style ``[model]``, ``[drive]`` and ``[sim]`` sections.

Every key is optional.  Missing model keys fall back to the fitted
defaults, a missing drive falls back to the ``fig2-drive`` preset, and each
applied default is recorded in ``RunConfig.provenance``.  Unknown sections
or keys are rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from importlib import resources

from .errors import InvariantViolation, ParseError, UnknownKey
from .model import ModelParams
from .solver import SolverConfig
from .transient import DEFAULT_W0, Waveform

DEFAULT_PRESET = "fig2-drive"

_MODEL_KEYS = {f.name: f for f in fields(ModelParams)}
_SOLVER_KEYS = {f.name: f for f in fields(SolverConfig)}
_DRIVE_KEYS = ("preset", "kind", "amplitude_pos", "amplitude_neg", "period", "t_end", "breakpoints")
_SIM_EXTRA = ("w0", "output")
_INT_KEYS = {"newton_max_iter", "substeps"}
_STR_KEYS = {"variant", "ode_method", "kind", "preset", "output", "breakpoints"}


@dataclass
class RunConfig:
    params: ModelParams
    solver: SolverConfig
    drive: Waveform
    drive_name: str
    w0: float = DEFAULT_W0
    output: str | None = None
    provenance: list = field(default_factory=list)


def _parser():
    return configparser.ConfigParser(
        interpolation=None, delimiters=("=",), inline_comment_prefixes=("#", ";"),
        default_section="\0none")


def _read(text, source):
    cp = _parser()
    try:
        cp.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError(exc.lineno, f"key outside of a [section]: {exc.line.strip()!r}") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ParseError(lineno, f"expected 'key = value', got {line.strip()!r}") from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ParseError(exc.lineno, str(exc).split(": ", 1)[-1]) from None
    return cp


def _convert(key, raw):
    if key in _STR_KEYS:
        return raw.strip()
    try:
        value = float(raw)
    except ValueError:
        raise InvariantViolation(key, f"expected a number, got {raw!r}") from None
    if key in _INT_KEYS:
        if value != int(value):
            raise InvariantViolation(key, f"expected an integer, got {raw!r}")
        return int(value)
    return value


def _parse_breakpoints(raw):
    points = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            t, v = item.split(":")
            points.append((float(t), float(v)))
        except ValueError:
            raise InvariantViolation("breakpoints", f"expected 't:v' pairs, got {item!r}") from None
    return tuple(points)


def load_presets() -> dict:
    """Named drive presets shipped with the package, as field dicts."""
    text = resources.files(__package__).joinpath("presets.cfg").read_text(encoding="utf-8")
    cp = _read(text, "presets.cfg")
    return {name: {k: _convert(k, v) for k, v in cp[name].items()} for name in cp.sections()}


def preset_waveform(name: str) -> Waveform:
    presets = load_presets()
    if name not in presets:
        raise UnknownKey(f"unknown drive preset {name!r} (known: {', '.join(sorted(presets))})")
    return Waveform(**presets[name])


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    cp = _read(text, source)
    for section in cp.sections():
        if section not in ("model", "drive", "sim"):
            raise UnknownKey(f"unknown section [{section}]")
    sections = {s: dict(cp[s]) if cp.has_section(s) else {} for s in ("model", "drive", "sim")}
    provenance = []

    def given(section, key, value):
        provenance.append(f"{section}.{key} = {value}  (from {source})")

    def default(section, key, value):
        provenance.append(f"{section}.{key} = {value}  (default)")

    model_kw = {}
    for key, raw in sections["model"].items():
        if key not in _MODEL_KEYS:
            raise UnknownKey(f"[model] has no key {key!r}")
        model_kw[key] = _convert(key, raw)
        given("model", key, model_kw[key])
    for name, f in _MODEL_KEYS.items():
        if name not in model_kw:
            default("model", name, getattr(f.default, "value", f.default))
    params = ModelParams(**model_kw)

    sim_kw, w0, output = {}, DEFAULT_W0, None
    for key, raw in sections["sim"].items():
        if key not in _SOLVER_KEYS and key not in _SIM_EXTRA:
            raise UnknownKey(f"[sim] has no key {key!r}")
        value = _convert(key, raw)
        given("sim", key, value)
        if key == "w0":
            w0 = value
        elif key == "output":
            output = value
        else:
            sim_kw[key] = value
    for name, f in _SOLVER_KEYS.items():
        if name not in sim_kw:
            default("sim", name, getattr(f.default, "value", f.default))
    if "w0" not in sections["sim"]:
        default("sim", "w0", DEFAULT_W0)
    solver = SolverConfig(**sim_kw)
    if not w0 > params.w1_const:
        raise InvariantViolation("w0", f"{w0} nm must exceed w1={params.w1_const} nm")
    if params.modified and not params.w_min <= w0 <= params.w_max:
        raise InvariantViolation("w0", f"{w0} nm outside [{params.w_min}, {params.w_max}]")

    drive_kw = {}
    for key, raw in sections["drive"].items():
        if key not in _DRIVE_KEYS:
            raise UnknownKey(f"[drive] has no key {key!r}")
        value = _convert(key, raw)
        if key == "breakpoints":
            value = _parse_breakpoints(value)
        drive_kw[key] = value
        given("drive", key, value)
    preset = drive_kw.pop("preset", None)
    if preset is None and "kind" not in drive_kw:
        preset = DEFAULT_PRESET
        default("drive", "preset", preset)
    if preset is not None:
        presets = load_presets()
        if preset not in presets:
            raise UnknownKey(f"unknown drive preset {preset!r}")
        drive_kw = {**presets[preset], **drive_kw}
    drive = Waveform(**drive_kw)
    return RunConfig(params, solver, drive, preset or "custom", w0, output, provenance)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, str(path))


def format_params(params: ModelParams) -> str:
    """Model parameters in config syntax (a complete ``[model]`` section)."""
    lines = ["[model]"]
    for name, value in params.as_dict().items():
        lines.append(f"{name} = {value!r}" if isinstance(value, float) else f"{name} = {value}")
    return "\n".join(lines) + "\n"
