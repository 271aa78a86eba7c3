"""Command-line interface: ``qmoduli pattern info``, ``qmoduli emit`` and
``qmoduli check <suite>``.

Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 I/O failure.
Every command prints a JSON run report on stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

from . import __version__
from .algebra import (
    build_presentation, commutative_count, counit_of, rewrite_system,
)
from .classical import check_cybe, poly_str, qcl_identity_check, quasiclassical_report
from .pattern import (
    ALL_TYPES, PatternError, classifications, classify, parse_pattern, random_pattern,
    tau_perm, topology, witness_pattern,
)
from .tensor import (
    check_coherence, check_hecke, check_yang_baxter, crossing_from_pattern, crossing_operator,
    r_matrix,
)
SCHEMA_VERSION = 1
SUITES = ("yang-baxter", "hecke", "coherence", "flatness", "classical-limit",
          "qcl-identity", "crossing-consistency")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: list
    inputs: dict
    checks: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    seconds: float = 0.0
    error: str | None = None
    inline_output: str | None = None  # emit without --out prints the artifact instead

    def add(self, name: str, ok: bool, **details):
        self.checks.append({"name": name, "status": "pass" if ok else "fail", **details})

    @property
    def ok(self) -> bool:
        return self.error is None and all(c["status"] == "pass" for c in self.checks)

    def to_json_obj(self, timing: bool = True) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "tool": f"qmoduli {__version__}",
            "command": self.command,
            "inputs": self.inputs,
            "checks": self.checks,
            "artifacts": self.artifacts,
            "status": "pass" if self.ok else ("error" if self.error else "fail"),
        }
        if self.error:
            d["error"] = self.error
        if timing:
            d["timing"] = {"seconds": round(self.seconds, 3)}
        return d

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json_obj(timing), indent=1, sort_keys=True)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QMODULI_THREADS", "1")))
    except ValueError:
        return 1


def _pattern(args):
    if args.pattern is None:
        raise UsageError("this command needs --pattern")
    return parse_pattern(args.pattern)


def _n(args, default=None) -> int:
    N = args.N if args.N is not None else default
    if N is None:
        raise UsageError("this command needs --N")
    if N < 1:
        raise UsageError("--N must be positive")
    return N


# -- pattern info

def cmd_pattern_info(args, report: RunReport) -> int:
    P = parse_pattern(args.text)
    top = topology(P)
    info = {
        "pattern": list(P.targets),
        "n": P.n,
        "classifications": {f"{i},{j}": str(t) for (i, j), t in classifications(P).items()},
        "genus": top.genus,
        "boundary": top.boundary_components,
        "euler_char": top.euler_char,
        "tau": list(tau_perm(P)),
    }
    report.inputs["pattern"] = list(P.targets)
    report.checks.append({"name": "pattern", "status": "pass", **info})
    return EXIT_OK


# -- emit

def cmd_emit(args, report: RunReport) -> int:
    P = _pattern(args)
    N = _n(args)
    report.inputs.update(pattern=list(P.targets), N=N, format=args.format)
    pres = build_presentation(P, N)
    text = pres.to_json() if args.format == "json" else pres.to_latex()
    report.add("emit", True, generators=pres.ngens, relations=len(pres.relations))
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as e:
            report.error = f"cannot write {args.out}: {e}"
            return EXIT_IO
        report.artifacts.append(args.out)
    else:
        report.inline_output = text
    return EXIT_OK


# -- check suites

def _suite_yang_baxter(args, report):
    for N in _n_list(args):
        report.add(f"yang-baxter N={N}", check_yang_baxter(r_matrix(N)))


def _suite_hecke(args, report):
    for N in _n_list(args):
        report.add(f"hecke N={N}", check_hecke(N))


def _suite_coherence(args, report):
    N = _n(args, 2)
    for name, ok in check_coherence(N).items():
        report.add(f"{name} N={N}", ok)


def _suite_flatness(args, report):
    P = _pattern(args)
    N = _n(args)
    D = args.degree if args.degree is not None else 3
    if D < 1:
        raise UsageError("--degree must be positive")
    report.inputs.update(pattern=list(P.targets), degree=D)
    pres = build_presentation(P, N)
    rs = rewrite_system(pres, max(D, 2))
    for d in range(1, D + 1):
        got, want = rs.hilbert_count(d), commutative_count(pres.ngens, d)
        report.add(f"hilbert d={d}", got == want, count=got, expected=want)
    # the counit is defined on each O_A factor; linked cross blocks are not annihilated
    eps_ok = all(counit_of(pres.relations[k].vector(), N) == 0
                 for lab, _, first, cnt in pres.blocks if lab == "RE"
                 for k in range(first, first + cnt))
    report.add("counit annihilates RE blocks", eps_ok)


def _suite_classical_limit(args, report):
    P = _pattern(args)
    N = _n(args, 2)
    report.inputs["pattern"] = list(P.targets)
    table = []
    for r in quasiclassical_report(P, N):
        table.append({"pair": list(r.pair), "status": "pass" if r.ok else "fail"})
        if not r.ok:
            report.add("classical-limit", False, table=table, offending_pair=list(r.pair),
                       quantum=poly_str(r.quantum, N), fock_rosly=poly_str(r.classical, N))
            return
    report.add("classical-limit", True, table=table)


def _suite_qcl(args, report):
    for N in _n_list(args):
        report.add(f"qcl-identity N={N}", qcl_identity_check(N))


def _suite_crossing(args, report):
    N = _n(args, 2)
    pats = []
    if args.pattern is not None:
        pats.append(_pattern(args))
    else:
        pats += [witness_pattern(t) for t in ALL_TYPES]
        rng = random.Random(args.seed)
        pats += [random_pattern(rng.randint(2, 4), rng) for _ in range(args.samples)]
    report.inputs["patterns"] = [list(P.targets) for P in pats]
    for P in pats:
        for i in range(1, P.n + 1):
            for j in range(1, P.n + 1):
                if i == j:
                    continue
                t = classify(P, i, j)
                ok = crossing_from_pattern(P, i, j, N) == crossing_operator(t, N)
                report.add(f"{P} ({i},{j}) {t}", ok)


def _n_list(args) -> list[int]:
    if args.N is not None:
        return [_n(args)]
    return [1, 2, 3]


SUITE_FUNCS: dict[str, Callable] = {
    "yang-baxter": _suite_yang_baxter,
    "hecke": _suite_hecke,
    "coherence": _suite_coherence,
    "flatness": _suite_flatness,
    "classical-limit": _suite_classical_limit,
    "qcl-identity": _suite_qcl,
    "crossing-consistency": _suite_crossing,
}


def cmd_check(args, report: RunReport) -> int:
    report.inputs.update(suite=args.suite, N=args.N, seed=args.seed)
    SUITE_FUNCS[args.suite](args, report)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(report.dumps(timing=False) + "\n")
        except OSError as e:
            report.error = f"cannot write {args.out}: {e}"
            return EXIT_IO
        report.artifacts.append(args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


# -- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmoduli", description="Quantum moduli algebras of punctured surfaces.")
    sub = p.add_subparsers(dest="cmd", required=True)

    pp = sub.add_parser("pattern", help="gluing pattern utilities")
    psub = pp.add_subparsers(dest="pcmd", required=True)
    pi = psub.add_parser("info", help="topology, classifications and tau of a pattern")
    pi.add_argument("text", help='pattern as "P(1) P(1\') P(2) ..."')

    pe = sub.add_parser("emit", help="write the presentation of a_P")
    pe.add_argument("--pattern", required=True)
    pe.add_argument("--N", type=int, required=True)
    pe.add_argument("--format", choices=("json", "latex"), default="json")
    pe.add_argument("--out")

    pc = sub.add_parser("check", help="run a verification suite")
    pc.add_argument("suite", choices=SUITES)
    pc.add_argument("--pattern")
    pc.add_argument("--N", type=int)
    pc.add_argument("--degree", type=int)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--samples", type=int, default=3,
                    help="random patterns sampled by crossing-consistency")
    pc.add_argument("--out", help="also write the report (without timing) to this file")
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    report = RunReport(command=["qmoduli"] + argv, inputs={"threads": _threads()})
    t0 = time.perf_counter()
    try:
        if args.cmd == "pattern":
            code = cmd_pattern_info(args, report)
        elif args.cmd == "emit":
            code = cmd_emit(args, report)
        else:
            code = cmd_check(args, report)
    except (PatternError, UsageError, ValueError) as e:
        report.error = f"{type(e).__name__}: {e}"
        code = EXIT_USAGE
    report.seconds = time.perf_counter() - t0
    if report.inline_output is not None and code == EXIT_OK:
        sys.stdout.write(report.inline_output)
    else:
        print(report.dumps())
    return code


if __name__ == "__main__":
    sys.exit(main())
