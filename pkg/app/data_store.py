"""Data persistence: model files, unfolding sidecars, engine config."""
import json
import logging
import os
import re
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from algebra import DegreeError, format_decimal, parse_degree
from models import DEPTH_SEPARATOR, Distribution, EngineSettings, Nfts, UnknownNameError


# ── Debug logging ─────────────────────────────────────────────────────────────

_debug: bool = False

logger = logging.getLogger("fuzzybisim")
logger.addHandler(logging.NullHandler())
_handler: Optional[logging.Handler] = None


def set_debug(enabled: bool) -> None:
    """Enable or disable debug logging to stderr.

    Standard output carries the JSON reports, so the handler always writes to
    stderr.
    """
    global _debug, _handler
    _debug = enabled
    if _handler is not None:
        logger.removeHandler(_handler)
        _handler = None
    if enabled:
        _handler = logging.StreamHandler(sys.stderr)
        _handler.setFormatter(logging.Formatter("[DEBUG] %(message)s"))
        logger.addHandler(_handler)
    logger.setLevel(logging.DEBUG if enabled else logging.WARNING)
    if enabled:
        logger.debug("Debug mode enabled")


def dbg(msg: str) -> None:
    """Log a debug message if debug mode is on."""
    if _debug:
        logger.debug(msg)


def _atomic_write(path: str, text: str) -> None:
    """Write *text* to *path* atomically (write to temp, then rename)."""
    dir_name = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=dir_name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except Exception:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _atomic_json_write(path: str, data) -> None:
    _atomic_write(path, json.dumps(data, indent=2) + "\n")


# ── Model files ───────────────────────────────────────────────────────────────
#
#   # comment
#   states: u u1 u2 u3
#   labels: t1 t2
#   trans u t1 { u1: 0.2, u2: 0.7 }
#   trans u t1 { u2: 0.9, u3: 1 }
#
# Repeated trans lines for one (state, label) add further distributions.

_NAME_RE = re.compile(r"[^\s{}:,#]+$")
_TRANS_RE = re.compile(r"trans\s+(?P<src>\S+)\s+(?P<label>\S+)\s*\{(?P<body>[^{}]*)\}\s*$")


class ModelParseError(ValueError):
    """A model file is malformed; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class ModelDocument:
    text: str
    model: Nfts
    positions: Dict[str, Tuple[int, int]] = field(default_factory=dict)


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _names(rest: str, line_no: int, offset: int, allow_depth_names: bool,
           positions: Dict[str, Tuple[int, int]]) -> List[str]:
    out = []
    for m in re.finditer(r"\S+", rest):
        name, col = m.group(0), offset + m.start() + 1
        if not _NAME_RE.match(name):
            raise ModelParseError(f"invalid name '{name}'", line_no, col)
        if DEPTH_SEPARATOR in name and not allow_depth_names:
            raise ModelParseError(
                f"'{DEPTH_SEPARATOR}' is reserved for unfolded states: '{name}'", line_no, col)
        if name in positions:
            raise ModelParseError(f"'{name}' declared twice", line_no, col)
        positions[name] = (line_no, col)
        out.append(name)
    return out


def _distribution(body: str, line_no: int, offset: int) -> Dict[str, object]:
    entries: Dict[str, object] = {}
    if not body.strip():
        return entries
    pos = 0
    for chunk in body.split(","):
        col = offset + pos + len(chunk) - len(chunk.lstrip()) + 1
        pos += len(chunk) + 1
        if ":" not in chunk:
            raise ModelParseError(f"expected 'state: degree', found '{chunk.strip()}'",
                                  line_no, col)
        name, _, literal = chunk.partition(":")
        name = name.strip()
        if name in entries:
            raise ModelParseError(f"state '{name}' appears twice in one distribution",
                                  line_no, col)
        try:
            entries[name] = parse_degree(literal)
        except DegreeError as exc:
            raise ModelParseError(str(exc), line_no, col) from None
    return entries


def parse_model_document(text: str, allow_depth_names: bool = False) -> ModelDocument:
    """Parse model file *text*, keeping declaration positions for diagnostics."""
    states: Optional[List[str]] = None
    labels: Optional[List[str]] = None
    state_pos: Dict[str, Tuple[int, int]] = {}
    label_pos: Dict[str, Tuple[int, int]] = {}
    pending = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        if stripped.startswith("states:"):
            if states is not None:
                raise ModelParseError("duplicate 'states:' section", line_no, indent + 1)
            states = _names(stripped[7:], line_no, indent + 7, allow_depth_names, state_pos)
            if not states:
                raise ModelParseError("'states:' section is empty", line_no, indent + 1)
        elif stripped.startswith("labels:"):
            if labels is not None:
                raise ModelParseError("duplicate 'labels:' section", line_no, indent + 1)
            labels = _names(stripped[7:], line_no, indent + 7, True, label_pos)
        elif stripped.startswith("trans"):
            m = _TRANS_RE.match(stripped)
            if not m:
                raise ModelParseError(
                    "expected 'trans STATE LABEL { state: degree, ... }'", line_no, indent + 1)
            entries = _distribution(m.group("body"), line_no, indent + m.start("body"))
            pending.append((line_no, indent, m, entries))
        else:
            raise ModelParseError(f"unrecognised line '{stripped}'", line_no, indent + 1)

    if states is None:
        raise ModelParseError("missing 'states:' section", max(1, len(text.splitlines())))
    labels = labels or []

    delta: Dict[Tuple[str, str], List[Distribution]] = {}
    for line_no, indent, m, entries in pending:
        src, label = m.group("src"), m.group("label")
        if src not in state_pos:
            raise ModelParseError(f"undeclared state '{src}'", line_no, indent + m.start("src") + 1)
        if label not in label_pos:
            raise ModelParseError(f"undeclared label '{label}'", line_no,
                                  indent + m.start("label") + 1)
        for name in entries:
            if name not in state_pos:
                raise ModelParseError(f"undeclared state '{name}'", line_no,
                                      indent + m.start("body") + 1)
        delta.setdefault((src, label), []).append(Distribution.from_mapping(entries))

    try:
        model = Nfts(states, labels, delta)
    except (ValueError, UnknownNameError) as exc:
        raise ModelParseError(str(exc), 1) from None
    dbg(f"Parsed model: {model!r}")
    positions = dict(label_pos)
    positions.update(state_pos)
    return ModelDocument(text=text, model=model, positions=positions)


def parse_model(text: str, allow_depth_names: bool = False) -> Nfts:
    return parse_model_document(text, allow_depth_names).model


def serialize_model(m: Nfts) -> str:
    """Canonical model text: names sorted, one sorted line per distribution."""
    lines = [
        "states: " + " ".join(sorted(m.states)),
        "labels: " + " ".join(sorted(m.labels)),
    ]
    trans = []
    for (src, label), dists in m.delta.items():
        for p in dists:
            body = ", ".join(f"{s}: {format_decimal(d)}" for s, d in p.items())
            trans.append(f"trans {src} {label} {{ {body} }}" if body else f"trans {src} {label} {{ }}")
    lines.extend(sorted(trans))
    return "\n".join(lines) + "\n"


def load_model(path: str, allow_depth_names: bool = False) -> Nfts:
    dbg(f"Loading model from {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_model(text, allow_depth_names)


def save_model(path: str, m: Nfts) -> None:
    _atomic_write(path, serialize_model(m))
    dbg(f"Model saved to {path}")


def save_sidecar(path: str, sidecar: dict) -> None:
    """Write an unfolding sidecar (relabeled state -> base, depth)."""
    _atomic_json_write(path, sidecar)
    dbg(f"Unfolding sidecar saved to {path}: {len(sidecar.get('states', {}))} state(s)")


# ── Engine config ─────────────────────────────────────────────────────────────

def _default_settings() -> dict:
    """Return a complete default engine config dict."""
    return asdict(EngineSettings())


def load_settings(path: Optional[str] = None) -> EngineSettings:
    """Read the engine config at *path* (defaults when absent).

    Missing keys take their default value; unknown keys are rejected so a
    typo does not silently fall back to a default.
    """
    config: dict = {}
    if path:
        dbg(f"Loading engine config from {path}")
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)
        if not isinstance(config, dict):
            raise ValueError(f"Engine config {path} must contain a JSON object")
    defaults = _default_settings()
    unknown = sorted(set(config) - set(defaults))
    if unknown:
        raise ValueError(f"Unknown engine config key(s): {', '.join(unknown)}")
    merged = {**defaults, **config}
    settings = EngineSettings(
        debug_mode=bool(merged["debug_mode"]),
        oracle_max_candidates=int(merged["oracle_max_candidates"]),
        closure_depth=int(merged["closure_depth"]),
        max_formulas=int(merged["max_formulas"]),
        formula_depth=int(merged["formula_depth"]),
    )
    for name in ("oracle_max_candidates", "closure_depth", "max_formulas", "formula_depth"):
        if getattr(settings, name) < 0:
            raise ValueError(f"Engine config '{name}' must be non-negative")
    if settings.debug_mode:
        set_debug(True)
    dbg(f"Engine settings: {settings}")
    return settings


def save_settings(path: str, settings: EngineSettings) -> None:
    _atomic_json_write(path, asdict(settings))
    dbg(f"Engine config saved to {path}")
