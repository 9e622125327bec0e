"""``crnreach`` command line.

Exit codes: 0 when a verdict was produced (``unknown`` included), 2 on input
errors, 3 when ``--cross-check`` finds the chosen solver and the oracle
disagreeing.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import io
from .classify import classify
from .core import Instance, Problem, ProblemKind
from .errors import CrnError
from .random_instances import SUITES
from .reductions import (
    GadgetMode,
    HamPathVariant,
    gen_3dm,
    gen_3dm_species,
    gen_digraph_path,
    gen_gadget_crn,
    gen_hampath,
    gen_sat_production,
    pad_config,
    split_non_monotone,
)
from .search import Limits, Verdict, verify_certificate
from .solvers import DEFAULT_UNARY_CAP, METHODS, Decision, dispatch, oracle_decision, run_method

FORMAT_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_DISAGREE = 0, 2, 3


def digest(inst: Instance) -> str:
    return "sha256:" + hashlib.sha256(io.format_instance(inst).encode()).hexdigest()[:16]


@dataclass
class CrossCheck:
    oracle: Decision
    agreement: bool | None  # None: at least one side is unknown

    def to_dict(self) -> dict:
        return {
            "oracle_verdict": self.oracle.verdict.value,
            "oracle_bound": self.oracle.bound.value if self.oracle.bound else None,
            "agreement": self.agreement,
        }


def cross_check(inst: Instance, dec: Decision, limits: Limits) -> CrossCheck:
    oracle = oracle_decision(inst, limits)
    if Verdict.UNKNOWN in (oracle.verdict, dec.verdict):
        return CrossCheck(oracle, None)
    return CrossCheck(oracle, oracle.verdict is dec.verdict)


def solve(inst: Instance, args) -> tuple[Decision, CrossCheck | None]:
    limits = Limits(state_cap=args.oracle_states, volume_cap=args.oracle_volume)
    profile = classify(inst.crn)
    if args.force_method:
        dec = run_method(args.force_method, inst, limits, args.unary_cap, profile)
    else:
        dec = dispatch(inst, limits, args.unary_cap, profile)
    check = cross_check(inst, dec, limits) if args.cross_check else None
    return dec, check


def _text_profile(p: dict) -> list[str]:
    out = []
    for key, val in p.items():
        if isinstance(val, dict):
            val = " ".join(f"{k}={v}" for k, v in val.items()) or "-"
        elif isinstance(val, list):
            val = " ".join(map(str, val)) if val else "-"
        elif val is None:
            val = "-"
        out.append(f"{key}: {val}")
    return out


def _text_decision(d: dict) -> list[str]:
    out = [f"verdict: {d['verdict']}", f"method: {d['method']}"]
    if d.get("bound"):
        out.append(f"bound: {d['bound']}")
    if d.get("certificate") is not None:
        blocks = " ".join(f"{r}x{m}" for r, m in d["certificate"]) or "(empty)"
        out.append(f"certificate: {blocks}")
    for note in d.get("notes", ()):
        out.append(f"note: {note}")
    for w in d.get("warnings", ()):
        out.append(f"warning: {w}")
    return out


def emit(report: dict, fmt: str) -> None:
    if fmt == "structured":
        print(json.dumps(report, indent=2))
        return
    lines = []
    for key, val in report.items():
        if key in ("format_version",):
            continue
        if key == "profile":
            lines += _text_profile(val)
        elif key == "decision":
            lines += _text_decision(val)
        elif key == "cross_check" and val is not None:
            agree = {True: "agree", False: "DISAGREE", None: "inconclusive"}[val["agreement"]]
            lines.append(f"cross-check: {agree} (oracle {val['oracle_verdict']})")
        elif key == "time_ms":
            lines.append(f"time: {val:.3f} ms")
        elif isinstance(val, (str, int, bool)):
            lines.append(f"{key.replace('_', ' ')}: {val}")
    print("\n".join(lines))


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_instance(path: str, kind: ProblemKind, args) -> Instance:
    doc = io.parse_document(_read(path))
    problem = doc.problem or Problem()
    if kind is ProblemKind.PRODUCE:
        species = getattr(args, "species", None) or problem.species
        k = getattr(args, "k", None) or problem.k or 1
        if species is None:
            raise CrnError("production needs a species: pass --species or a 'problem: produce' line")
        problem = Problem.produce(species, k)
    else:
        problem = Problem(kind)
    doc.problem = problem
    return doc.instance()


def cmd_classify(args) -> int:
    crn = io.parse_crn(_read(args.file))
    report = {"format_version": FORMAT_VERSION, "command": "classify",
              "species": len(crn.species), "rules": len(crn.rules),
              "profile": classify(crn).to_dict()}
    emit(report, args.format)
    return EXIT_OK


def cmd_decide(args, kind: ProblemKind) -> int:
    inst = load_instance(args.file, kind, args)
    start = time.perf_counter()
    dec, check = solve(inst, args)
    elapsed = (time.perf_counter() - start) * 1000
    report = {
        "format_version": FORMAT_VERSION,
        "command": kind.value,
        "instance_digest": digest(inst),
        "profile": classify(inst.crn).to_dict(),
        "decision": dec.to_dict(),
        "time_ms": round(elapsed, 3),
        "cross_check": check.to_dict() if check else None,
    }
    if getattr(args, "cert_out", None) and dec.certificate is not None:
        _write(io.format_certificate(dec.certificate), args.cert_out)
    emit(report, args.format)
    if check is not None and check.agreement is False:
        return EXIT_DISAGREE
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.file, ProblemKind.REACH, args)
    cert = io.parse_certificate(_read(args.certificate))
    ok = verify_certificate(inst, cert)
    report = {"format_version": FORMAT_VERSION, "command": "verify-cert",
              "instance_digest": digest(inst), "blocks": len(cert), "accepted": ok}
    emit(report, args.format)
    return EXIT_OK


def cmd_gen(args) -> int:
    text = _read(args.input)
    if args.kind in ("hampath", "digraph"):
        g = io.parse_digraph(text)
        s, t = args.s or g.s, args.t or g.t
        if s is None or t is None:
            raise CrnError("the digraph needs 's:' and 't:' lines or --s/--t")
        if args.kind == "hampath":
            gen = gen_hampath(g.vertices, g.edges, s, t, args.variant)
        else:
            gen = gen_digraph_path(g.vertices, g.edges, s, t)
    elif args.kind in ("3dm", "3dm-species"):
        h = io.parse_hypergraph(text)
        fn = gen_3dm if args.kind == "3dm" else gen_3dm_species
        gen = fn(h.xs, h.ys, h.zs, h.edges)
    elif args.kind == "sat":
        n, clauses = io.parse_dimacs(text)
        gen = gen_sat_production(clauses, n)
    else:
        gen = gen_gadget_crn(io.parse_gadgets(text), args.mode, args.split)
    body = io.format_instance(gen.instance)
    if args.annotate:
        notes = "".join(f"# {s}: {gen.annotations[s]}\n" for s in gen.crn.species)
        notes += "".join(f"# note: {n}\n" for n in gen.notes)
        body = notes + body
    _write(body, args.output)
    return EXIT_OK


def cmd_split(args) -> int:
    doc = io.parse_document(_read(args.file))
    crn = split_non_monotone(doc.crn)
    configs = {k: pad_config(v, crn) for k, v in doc.configs.items()}
    _write(io.format_document(io.CrnDocument(crn, configs, doc.problem)), args.output)
    return EXIT_OK


def _batch_one(payload):
    text, args = payload
    inst = io.parse_instance(text)
    dec, check = solve(inst, args)
    row = {"digest": digest(inst), "method": dec.method, "verdict": dec.verdict.value}
    if dec.bound:
        row["bound"] = dec.bound.value
    if dec.warnings:
        row["warnings"] = list(dec.warnings)
    if check is not None:
        row["oracle_verdict"] = check.oracle.verdict.value
        row["agreement"] = check.agreement
    return row


def cmd_batch(args) -> int:
    if args.files:
        texts = [_read(p) for p in args.files]
        for t in texts:
            io.parse_instance(t)
    else:
        rng = random.Random(args.seed)
        gen = SUITES[args.suite]
        texts = [io.format_instance(gen(rng)) for _ in range(args.count)]
    payloads = [(t, args) for t in texts]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_batch_one, payloads))
    else:
        rows = [_batch_one(p) for p in payloads]
    for i, row in enumerate(rows):
        row["index"] = i
    disagree = sum(1 for r in rows if r.get("agreement") is False)
    verdicts = {v.value: sum(1 for r in rows if r["verdict"] == v.value) for v in Verdict}
    summary = {"instances": len(rows), **verdicts}
    if args.cross_check:
        summary["disagreements"] = disagree
    if args.format == "structured":
        print(json.dumps({"format_version": FORMAT_VERSION, "command": "batch",
                          "suite": None if args.files else args.suite,
                          "seed": None if args.files else args.seed,
                          "results": rows, "summary": summary}, indent=2))
    else:
        for r in rows:
            extra = ""
            if "agreement" in r:
                extra = {True: " agree", False: " DISAGREE", None: " inconclusive"}[r["agreement"]]
            print(f"{r['index']:5d} {r['digest']} {r['method']:15s} {r['verdict']}{extra}")
        print(" ".join(f"{k}={v}" for k, v in summary.items()))
    return EXIT_DISAGREE if disagree else EXIT_OK


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--oracle-states", type=int, default=10**6, metavar="N",
                   help="state cap of the bounded oracle (default 10^6)")
    p.add_argument("--oracle-volume", type=int, default=64, metavar="V",
                   help="volume cap of the bounded oracle (default 64)")
    p.add_argument("--unary-cap", type=int, default=DEFAULT_UNARY_CAP, metavar="N",
                   help="largest expanded graph for (2,0) matching (default 5000)")
    p.add_argument("--force-method", choices=METHODS,
                   help="run this procedure even outside its class")
    p.add_argument("--cross-check", action="store_true",
                   help="also run the oracle and report agreement")


def _format_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "structured"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crnreach", description="CRN reachability toolkit")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="report the restriction profile of a CRN")
    p.add_argument("file")
    _format_flag(p)
    p.set_defaults(func=cmd_classify)

    helps = {"reach": "decide whether the target is reachable",
             "universal": "decide whether every reachable configuration can still reach the target"}
    for name, kind in (("reach", ProblemKind.REACH), ("universal", ProblemKind.UNIVERSAL)):
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("file")
        p.add_argument("--cert-out", metavar="PATH", help="write the certificate here")
        _solver_flags(p)
        _format_flag(p)
        p.set_defaults(func=lambda a, k=kind: cmd_decide(a, k))

    p = sub.add_parser("produce", help="decide production of k copies of a species")
    p.add_argument("file")
    p.add_argument("--species")
    p.add_argument("--k", type=int)
    p.add_argument("--cert-out", metavar="PATH")
    _solver_flags(p)
    _format_flag(p)
    p.set_defaults(func=lambda a: cmd_decide(a, ProblemKind.PRODUCE))

    p = sub.add_parser("verify-cert", help="check an ordered certificate")
    p.add_argument("file")
    p.add_argument("certificate")
    _format_flag(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a reduction instance")
    p.add_argument("kind", choices=("hampath", "3dm", "3dm-species", "digraph", "sat", "gadgets"))
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--s")
    p.add_argument("--t")
    p.add_argument("--variant", choices=[v.value for v in HamPathVariant], default="size22")
    p.add_argument("--mode", choices=[m.value for m in GadgetMode], default="production")
    p.add_argument("--split", action="store_true", help="split (2,2) rules via intermediates")
    p.add_argument("--annotate", action="store_true", help="prefix species roles as comments")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("split", help="split every (2,2) rule into (2,1) and (1,2) rules")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("batch", help="run a random suite or a list of instance files")
    p.add_argument("files", nargs="*")
    p.add_argument("--suite", choices=sorted(SUITES), default="ff-ss-nv")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    _solver_flags(p)
    _format_flag(p)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CrnError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"crnreach: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
