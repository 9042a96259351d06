"""Reading and writing experiment files.

Two formats are supported, both UTF-8:

* JSON: ``{"agents": [...], "outcomes": [...], "independents": [...],
  "steps": [{"independent_values": [...], "measurements": [[...], ...]}, ...]}``
  with an optional ``clustering`` object holding ``ClusterConfig`` fields.
* CSV (long form): header ``step,agent,outcome,value`` plus one ``iv:<name>``
  column per independent variable, one row per (step, agent, outcome) cell.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field

from .cluster import ClusterConfig
from .errors import ConfigError, ParseError, ValidationError
from .model import Experiment

_DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_CSV_BASE = ("step", "agent", "outcome", "value")
_MAX_MISSING_REPORTED = 10


@dataclass(frozen=True)
class IngestReport:
    experiment: Experiment
    warnings: list[str] = field(default_factory=list)
    clustering: ClusterConfig | None = None


def _decode(data) -> str:
    if isinstance(data, str):
        return data
    try:
        return bytes(data).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8: {exc.reason} at byte {exc.start}") from None


def _constant_outcome_warnings(exp: Experiment) -> list[str]:
    if exp.M * exp.T < 2:
        return []
    warnings = []
    for i, name in enumerate(exp.outcomes):
        values = {row[i] for step in exp.steps for row in step.measurements}
        if len(values) == 1:
            warnings.append(f"outcome {name!r} is constant across all agents and steps")
    return warnings


def _str_list(doc: dict, key: str) -> list[str]:
    value = doc.get(key)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ValidationError(f"{key!r} must be an array of strings")
    return value


def _check_numbers(values, where: str):
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValidationError(f"{where}: expected a number, got {json.dumps(v)}")


def _experiment_from_doc(doc) -> Experiment:
    if not isinstance(doc, dict):
        raise ValidationError("top level must be a JSON object")
    agents = _str_list(doc, "agents")
    outcomes = _str_list(doc, "outcomes")
    independents = _str_list(doc, "independents")
    steps = doc.get("steps")
    if not isinstance(steps, list):
        raise ValidationError("'steps' must be an array")
    raw = []
    for t, step in enumerate(steps):
        if not isinstance(step, dict):
            raise ValidationError(f"step {t}: must be an object")
        ivs = step.get("independent_values")
        rows = step.get("measurements")
        if not isinstance(ivs, list):
            raise ValidationError(f"step {t}: 'independent_values' must be an array")
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ValidationError(f"step {t}: 'measurements' must be an array of arrays")
        _check_numbers(ivs, f"step {t}, independent_values")
        for j, row in enumerate(rows):
            _check_numbers(row, f"step {t}, measurements row {j}")
        raw.append((ivs, rows))
    return Experiment(tuple(agents), tuple(outcomes), tuple(independents), tuple(raw))


def parse_json(data) -> IngestReport:
    text = _decode(data)
    try:
        # NaN/Infinity literals are let through here and rejected with context by Experiment
        doc = json.loads(text, parse_constant=float)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None
    except RecursionError:
        raise ParseError("malformed JSON: nesting too deep") from None
    exp = _experiment_from_doc(doc)
    clustering = None
    if isinstance(doc, dict) and "clustering" in doc:
        block = doc["clustering"]
        if not isinstance(block, dict):
            raise ValidationError("'clustering' must be an object")
        try:
            clustering = ClusterConfig.from_dict(block)
        except ConfigError as exc:
            raise ValidationError(f"clustering block: {exc}") from None
    return IngestReport(exp, _constant_outcome_warnings(exp), clustering)


def experiment_to_dict(exp: Experiment) -> dict:
    return {
        "agents": list(exp.agents),
        "outcomes": list(exp.outcomes),
        "independents": list(exp.independents),
        "steps": [
            {
                "independent_values": list(s.independent_values),
                "measurements": [list(row) for row in s.measurements],
            }
            for s in exp.steps
        ],
    }


def write_json(exp: Experiment) -> bytes:
    # json renders floats with repr(), the shortest string that round-trips
    return (json.dumps(experiment_to_dict(exp), indent=2, allow_nan=False) + "\n").encode("utf-8")


def _parse_decimal(text: str, where: str) -> float:
    text = text.strip()
    if not _DECIMAL.fullmatch(text):
        raise ValidationError(f"{where}: not a decimal number: {text!r}")
    value = float(text)
    if not math.isfinite(value):
        raise ValidationError(f"{where}: non-finite value {text!r}")
    return value


def parse_csv(data) -> IngestReport:
    text = _decode(data)
    try:
        rows = list(csv.reader(io.StringIO(text, newline="")))
    except csv.Error as exc:
        raise ParseError(f"malformed CSV: {exc}") from None
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError("empty CSV input")
    header = [h.strip() for h in rows[0]]
    if tuple(header[:4]) != _CSV_BASE:
        raise ValidationError(f"CSV header must start with {','.join(_CSV_BASE)}, got {','.join(header[:4])}")
    iv_cols = header[4:]
    bad = [h for h in iv_cols if not h.startswith("iv:") or len(h) == 3]
    if bad:
        raise ValidationError(f"unexpected CSV columns {bad}; independent columns must be named iv:<name>")
    independents = [h[3:] for h in iv_cols]
    if not independents:
        raise ValidationError("CSV needs at least one iv:<name> column")
    if len(set(independents)) != len(independents):
        raise ValidationError("duplicate independent variable columns")

    agents: dict[str, int] = {}
    outcomes: dict[str, int] = {}
    cells: dict[tuple[int, str, str], float] = {}
    step_ivs: dict[int, tuple[float, ...]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        step_text, agent, outcome, value_text = (c.strip() for c in row[:4])
        if not re.fullmatch(r"\d+", step_text):
            raise ValidationError(f"line {lineno}: step must be a non-negative integer, got {step_text!r}")
        t = int(step_text)
        agents.setdefault(agent, len(agents))
        outcomes.setdefault(outcome, len(outcomes))
        key = (t, agent, outcome)
        where = f"line {lineno} (step {t}, agent {agent!r}, outcome {outcome!r})"
        if key in cells:
            raise ValidationError(f"{where}: duplicate cell")
        cells[key] = _parse_decimal(value_text, where)
        ivs = tuple(_parse_decimal(c, f"line {lineno}, {h}") for c, h in zip(row[4:], iv_cols))
        if step_ivs.setdefault(t, ivs) != ivs:
            raise ValidationError(
                f"line {lineno}: inconsistent independent values for step {t}: "
                f"{list(step_ivs[t])} vs {list(ivs)}")
    if not cells:
        raise ValidationError("CSV contains no data rows")

    steps = sorted(step_ivs)
    if steps != list(range(len(steps))):
        raise ValidationError(f"steps must be numbered 0..T-1 without gaps, got {steps}")
    missing = [(t, a, o) for t in steps for a in agents for o in outcomes if (t, a, o) not in cells]
    if missing:
        shown = ", ".join(f"(step {t}, agent {a!r}, outcome {o!r})" for t, a, o in missing[:_MAX_MISSING_REPORTED])
        more = f" and {len(missing) - _MAX_MISSING_REPORTED} more" if len(missing) > _MAX_MISSING_REPORTED else ""
        raise ValidationError(f"{len(missing)} missing cells: {shown}{more}")
    raw = tuple(
        (step_ivs[t], [[cells[(t, a, o)] for o in outcomes] for a in agents])
        for t in steps
    )
    exp = Experiment(tuple(agents), tuple(outcomes), tuple(independents), raw)
    return IngestReport(exp, _constant_outcome_warnings(exp))


def write_csv(exp: Experiment) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(_CSV_BASE) + [f"iv:{name}" for name in exp.independents])
    for step in exp.steps:
        ivs = [repr(v) for v in step.independent_values]
        for agent, row in zip(exp.agents, step.measurements):
            for outcome, value in zip(exp.outcomes, row):
                writer.writerow([step.index, agent, outcome, repr(value)] + ivs)
    return out.getvalue().encode("utf-8")


def load(path) -> IngestReport:
    """Parse a file, choosing the format from its extension (.csv, else JSON)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if str(path).lower().endswith(".csv"):
        return parse_csv(data)
    return parse_json(data)
