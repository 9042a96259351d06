"""Command line driver.

Exit codes: 0 success, 2 invalid input data, 64 bad usage or configuration,
66 unreadable input, 73 unwritable output, 70 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import __version__
from .cluster import DEFAULT_CONFIG, LINKAGES, METHODS, METRICS, ClusterConfig
from .errors import CmdVizError, ConfigError, UsageError, ValidationError
from .ingest import load, write_csv, write_json
from .pipeline import DEFAULT_REDUCE_LIMIT, Analysis, analyze
from .render import RenderConfig, render_dot, render_svg
from .synth import SynthSpec, generate

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66
EXIT_INTERNAL = 70
EXIT_CANTCREAT = 73

EMIT_SELECTORS = ("diagram", "group-states", "clusters", "acm", "gcm", "pca")


class _IOFailure(Exception):
    def __init__(self, code, detail):
        super().__init__(detail)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _use_color() -> bool:
    return "CMDVIZ_NO_COLOR" not in os.environ and sys.stderr.isatty()


def _report(category: str, detail: str) -> None:
    detail = " ".join(str(detail).split())
    prefix = "\033[31merror\033[0m" if _use_color() else "error"
    print(f"{prefix}: {category}: {detail}", file=sys.stderr)


def _warn(message: str) -> None:
    prefix = "\033[33mwarning\033[0m" if _use_color() else "warning"
    print(f"{prefix}: {message}", file=sys.stderr)


def write_output(path, data: bytes) -> None:
    """Write atomically: a failed run never leaves a partial file behind."""
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".cmdviz-", dir=directory)
    except OSError as exc:
        raise _IOFailure(EXIT_CANTCREAT, f"cannot write {path}: {exc.strerror}") from None
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        os.unlink(tmp) if os.path.exists(tmp) else None
        raise _IOFailure(EXIT_CANTCREAT, f"cannot write {path}: {exc.strerror}") from None


def _load(path):
    try:
        return load(path)
    except OSError as exc:
        raise _IOFailure(EXIT_NOINPUT, f"cannot read {path}: {exc.strerror}") from None


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", "-i", required=True, help="experiment file (.json or .csv)")
    p.add_argument("--output", "-o", default="-", help="output path (default: stdout)")
    p.add_argument("--scheme", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--draw-edges", action="store_true", help="draw transition arrows under scheme 3")
    g = p.add_argument_group("clustering (defaults come from the file's clustering block, then built-ins)")
    g.add_argument("--method", choices=METHODS)
    g.add_argument("--linkage", choices=LINKAGES)
    g.add_argument("--threshold", type=float)
    g.add_argument("--k", type=int)
    g.add_argument("--metric", choices=METRICS)
    g.add_argument("--seed", type=int)
    g.add_argument("--max-iterations", type=int)
    r = p.add_argument_group("dimensionality reduction")
    r.add_argument("--reduce", choices=("auto", "pca", "none"), default="auto",
                   help="auto applies PCA when there are more than --reduce-limit outcomes")
    r.add_argument("--components", type=int, default=2)
    r.add_argument("--reduce-limit", type=int, default=DEFAULT_REDUCE_LIMIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmdviz", description="Cognitive Move Diagram toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="check an experiment file")
    v.add_argument("file")

    d = sub.add_parser("diagram", help="render a cognitive move diagram")
    _add_analysis_flags(d)
    d.add_argument("--format", choices=("svg", "dot", "json"), default="svg")
    d.add_argument("--width", type=int, default=960)
    d.add_argument("--height", type=int, default=540)
    d.add_argument("--font-size", type=float, default=12.0)

    e = sub.add_parser("emit", help="write an intermediate result as JSON")
    _add_analysis_flags(e)
    e.add_argument("--emit", required=True, choices=EMIT_SELECTORS)

    s = sub.add_parser("synth", help="generate a synthetic experiment from a spec")
    s.add_argument("--spec", required=True)
    s.add_argument("--output", "-o", default="-")
    s.add_argument("--format", choices=("json", "csv"), default=None,
                   help="output format (default: from the output extension, else json)")
    return parser


def _cluster_config(args, file_config: ClusterConfig | None) -> ClusterConfig:
    base = (file_config or DEFAULT_CONFIG).to_dict()
    for name in base:
        value = getattr(args, name, None)
        if value is not None:
            base[name] = value
    return ClusterConfig(**base)


def _analysis(args) -> Analysis:
    report = _load(args.input)
    for w in report.warnings:
        _warn(w)
    cfg = _cluster_config(args, report.clustering)
    if args.components < 1:
        raise ConfigError("--components must be at least 1")
    return analyze(report.experiment, cfg, args.reduce, args.components, args.reduce_limit)


def _dumps(obj) -> bytes:
    return (json.dumps(obj, indent=2, allow_nan=False) + "\n").encode("utf-8")


def _names(exp, members):
    return [exp.agents[j] for j in sorted(members)]


def emit_document(an: Analysis, selector: str, scheme: int = 1, draw_edges: bool = False) -> dict:
    exp = an.experiment
    doc = {"kind": selector, "axes": list(an.space.outcomes), "reduced": an.reduced}
    if selector == "diagram":
        doc["diagram"] = an.diagram(scheme, draw_edges).to_dict()
    elif selector == "clusters":
        doc["config"] = an.config.to_dict()
        doc["steps"] = [
            {
                "step": p.step_index,
                "assignments": list(p.assignments),
                "clusters": [{"id": cid, "members": _names(exp, c.members), "centroid": list(c.centroid)}
                             for cid, c in enumerate(p.clusters)],
            }
            for p in an.partitions
        ]
    elif selector == "group-states":
        doc["steps"] = [
            {"step": g.step_index, "assignments": list(g.partition.assignments),
             "matrix": [list(r) for r in g.matrix]}
            for g in an.group_states
        ]
        doc["transition_counts"] = [
            {"from_step": t, "to_step": t + 1, "counts": [list(c) for c in counts]}
            for t, counts in enumerate(an.transition_counts())
        ]
    elif selector == "acm":
        doc["moves"] = [
            {"agent": exp.agents[mv.agent_index], "from_step": mv.from_step, "to_step": mv.to_step,
             "from": list(mv.from_values), "to": list(mv.to_values)}
            for mv in an.agent_moves()
        ]
    elif selector == "gcm":
        doc["moves"] = [
            {"agent": exp.agents[mv.agent_index], "from_step": mv.from_step, "to_step": mv.to_step,
             "from": list(mv.from_row), "to": list(mv.to_row),
             "from_membership": _names(exp, mv.from_membership),
             "to_membership": _names(exp, mv.to_membership)}
            for mv in an.group_moves()
        ]
    elif selector == "pca":
        doc["model"] = an.pca.to_dict() if an.pca is not None else None
    else:
        raise UsageError(f"unknown emit selector {selector!r}")
    return doc


def _cmd_validate(args) -> int:
    report = _load(args.file)
    for w in report.warnings:
        _warn(w)
    exp = report.experiment
    print(f"ok: {exp.M} agents, {exp.N} outcomes, {exp.K} independents, {exp.T} steps",
          file=sys.stderr)
    return EXIT_OK


def _cmd_diagram(args) -> int:
    an = _analysis(args)
    if args.format == "json":
        write_output(args.output, _dumps(an.diagram(args.scheme, args.draw_edges).to_dict()))
        return EXIT_OK
    cfg = RenderConfig(args.format, args.width, args.height, args.font_size)
    dm = an.diagram(args.scheme, args.draw_edges)
    data = render_svg(dm, cfg) if args.format == "svg" else render_dot(dm, cfg)
    write_output(args.output, data)
    return EXIT_OK


def _cmd_emit(args) -> int:
    an = _analysis(args)
    write_output(args.output, _dumps(emit_document(an, args.emit, args.scheme, args.draw_edges)))
    return EXIT_OK


def _cmd_synth(args) -> int:
    try:
        with open(args.spec, "rb") as fh:
            text = fh.read().decode("utf-8")
    except OSError as exc:
        raise _IOFailure(EXIT_NOINPUT, f"cannot read {args.spec}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValidationError(f"synth spec is not valid JSON: {exc}") from None
    exp = generate(SynthSpec.from_dict(doc))
    fmt = args.format or ("csv" if str(args.output).lower().endswith(".csv") else "json")
    write_output(args.output, write_csv(exp) if fmt == "csv" else write_json(exp))
    return EXIT_OK


COMMANDS = {"validate": _cmd_validate, "diagram": _cmd_diagram, "emit": _cmd_emit, "synth": _cmd_synth}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _report("usage", exc)
        return EXIT_USAGE
    except ConfigError as exc:
        _report("config", exc)
        return EXIT_USAGE
    except ValidationError as exc:
        _report(exc.category, exc)
        return EXIT_DATA
    except _IOFailure as exc:
        _report("io", exc)
        return exc.code
    except CmdVizError as exc:
        _report(exc.category, exc)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        _report("internal", f"{type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
