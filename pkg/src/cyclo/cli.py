"""Command-line front end.

Exit codes: 0 success or SOUND, 1 UNSOUND (or a false ground instance for
``eval``), 2 structural errors in the input, 64 usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from collections import Counter
from dataclasses import dataclass

from . import checker
from .checker import CheckContext, StageError, check_soundness, format_report, report_sexpr
from .digraph import DigraphError, to_dot
from .ncycles import check_prior_criterion, redundancy_report
from .normalizer import NormalizationError, normalize_logged
from .proof_format import ProofFormatError, load, serialize
from .semantics import Truth, approximant, eval_ground_sequent, ground_instances, term_universe
from .sexpr import SexprError, dumps
from .treeset import ReferenceIntegrityError, validate_treeset

EXIT_OK, EXIT_UNSOUND, EXIT_STRUCTURAL, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str
    output: str | None = None
    dot: bool = False
    report: str | None = None
    depth: int = 15
    universe: int = 5
    closure: int | None = None
    jobs: int = 1
    quiet: bool = False


def _color_enabled() -> bool:
    v = os.environ.get("CYCLO_COLOR", "").strip().lower()
    return v not in ("", "0", "no", "false", "off", "never")


def _paint(text: str, good: bool) -> str:
    if not _color_enabled():
        return text
    code = "32" if good else "31"
    return f"\x1b[{code}m{text}\x1b[0m"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cyclo", description="Check cyclic induction proofs.")
    p.add_argument("--quiet", action="store_true", help="print verdicts only")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input", help=".proof file")
        sp.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
        return sp

    sp = cmd("parse", "parse and re-serialise a proof file")
    sp.add_argument("-o", "--output")
    cmd("validate", "check every inference step")
    sp = cmd("normalize", "normalise the tree-set and print the operations applied")
    sp.add_argument("-o", "--output")
    sp = cmd("graph", "build the annotated digraph")
    sp.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
    sp.add_argument("-o", "--output")
    sp = cmd("check", "decide soundness")
    sp.add_argument("--report", metavar="FILE", help="write an s-expression report")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-o", "--output")
    cmd("compare", "compare with the per-n-cycle criterion")
    sp = cmd("eval", "evaluate root sequents on ground instances")
    sp.add_argument("--depth", type=int, default=15, help="approximant stage k")
    sp.add_argument("--universe", type=int, default=5,
                    help="maximal depth of the terms substituted into root sequents")
    sp.add_argument("--closure", type=int, default=None,
                    help="term depth the approximants range over (default: twice --universe)")
    return p


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=ns.command, input=ns.input, output=getattr(ns, "output", None),
        dot=getattr(ns, "dot", False), report=getattr(ns, "report", None),
        depth=getattr(ns, "depth", 15), universe=getattr(ns, "universe", 5),
        closure=getattr(ns, "closure", None),
        jobs=getattr(ns, "jobs", 1), quiet=ns.quiet,
    )
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    if cfg.depth < 0 or cfg.universe < 0:
        raise UsageError("--depth and --universe must be non-negative")
    if cfg.closure is not None and cfg.closure < cfg.universe:
        raise UsageError("--closure must be at least --universe")
    return cfg


def _emit(cfg: RunConfig, text: str, out) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def _run(cfg: RunConfig, out, err) -> int:
    try:
        doc = load(cfg.input)
    except OSError as exc:
        err.write(f"parse: {exc}\n")
        return EXIT_STRUCTURAL
    except (ProofFormatError, SexprError, ReferenceIntegrityError) as exc:
        err.write(f"parse: {cfg.input}: {exc}\n")
        return EXIT_STRUCTURAL

    if cfg.command == "parse":
        _emit(cfg, serialize(doc), out)
        return EXIT_OK

    if cfg.command == "validate":
        found = validate_treeset(doc.defs, doc.proofs)
        errors = [v for v in found if not v.warning]
        if not cfg.quiet:
            for v in found:
                err.write(f"validate: {'warning' if v.warning else 'error'}: {v}\n")
        out.write(f"{len(doc.proofs.nodes)} nodes, {len(errors)} errors\n")
        return EXIT_STRUCTURAL if errors else EXIT_OK

    if cfg.command == "normalize":
        try:
            norm = normalize_logged(doc.proofs, doc.defs)
        except NormalizationError as exc:
            err.write(f"normalize: {exc}\n")
            return EXIT_STRUCTURAL
        if not cfg.quiet:
            for op in norm.log:
                err.write(f"{op}\n")
        _emit(cfg, serialize(doc.with_proofs(norm.proofs)), out)
        return EXIT_OK

    if cfg.command == "graph":
        _, _, g = checker.prepare(doc)
        if cfg.dot:
            _emit(cfg, to_dot(g), out)
        else:
            lines = [f"{len(g.nodes)} nodes, {len(g.arrows)} arrows, "
                     f"{len(g.backlinks())} back-links"]
            for comp in g.non_singleton_sccs():
                lines.append("SCC {" + ", ".join(comp) + "}")
            _emit(cfg, "\n".join(lines) + "\n", out)
        return EXIT_OK

    if cfg.command == "check":
        rep = check_soundness(doc, jobs=cfg.jobs)
        if cfg.report:
            with open(cfg.report, "w", encoding="utf-8") as fh:
                fh.write(dumps(report_sexpr(rep), indent=2) + "\n")
        text = rep.summary() + "\n" if cfg.quiet else format_report(rep)
        head, _, rest = text.partition("\n")
        _emit(cfg, _paint(head, rep.sound) + "\n" + rest, out)
        return EXIT_OK if rep.sound else EXIT_UNSOUND

    if cfg.command == "compare":
        rep = check_soundness(doc)
        prior = check_prior_criterion(CheckContext.of(doc), rep.digraph)
        distinct, total = redundancy_report(rep.digraph)
        prior_verdict = "SOUND" if prior.sound else "UNSOUND"
        lines = [f"rb-path criterion: {_paint(rep.verdict, rep.sound)}",
                 f"n-cycle criterion: {_paint(prior_verdict, prior.sound)}",
                 f"constraints: {distinct} distinct, {total} over all n-cycles"]
        if not cfg.quiet:
            for cyc, cs in prior.cycles:
                marks = ", ".join(f"{c.bud}:{'ok' if c.discharged else 'failed'}" for c in cs)
                lines.append(f"  cycle {' '.join(cyc.buds)}: {marks}")
        out.write("\n".join(lines) + "\n")
        return EXIT_OK if rep.sound == prior.sound else EXIT_UNSOUND

    if cfg.command == "eval":
        instances = term_universe(doc.defs.signature, cfg.universe)
        closure = 2 * cfg.universe if cfg.closure is None else cfg.closure
        universe = term_universe(doc.defs.signature, closure)
        approx = approximant(doc.defs, cfg.depth, universe)
        any_false = False
        for root in doc.proofs.roots:
            seq = doc.proofs[root].sequent
            tally: Counter = Counter()
            for _, inst in ground_instances(seq, instances):
                v = eval_ground_sequent(doc.defs, inst, cfg.depth, universe, approx)
                tally[v] += 1
                if v is Truth.FALSE and not cfg.quiet:
                    err.write(f"false: {inst}\n")
            any_false |= tally[Truth.FALSE] > 0
            counts = ", ".join(f"{tally[t]} {t}" for t in Truth)
            out.write(f"{root}: {seq}: {counts}\n")
        return EXIT_UNSOUND if any_false else EXIT_OK

    raise UsageError(f"unknown command {cfg.command}")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        sys.stderr.write(f"cyclo: error: {exc}\n")
        return EXIT_USAGE
    try:
        return _run(cfg, sys.stdout, sys.stderr)
    except StageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_STRUCTURAL
    except DigraphError as exc:
        sys.stderr.write(f"digraph: {exc}\n")
        return EXIT_STRUCTURAL


if __name__ == "__main__":
    sys.exit(main())
