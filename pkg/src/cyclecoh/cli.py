"""Command-line front end.

Four subcommands: `cohomology` (one group, up to three routes with
agreement flags), `extensions` (class enumeration), `verify` (the
verification suites for one family member), `table` (a sweep over all
family members up to a carrier bound).  One job per process; output is
a single report in json, tsv or pretty form, byte-identical for a fixed
job and seed (timing is only included on request).

Exit codes: 0 success, 2 parameter/usage error, 3 route disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .abelian import FinAbGroup, IntegerMatrix, smith_normal_form
from .cycleset import (
    CyclicFamilyParams,
    ParameterDomainError,
    derived_ybe_solution,
    family_members,
    invariant_elements,
    make_cyclic_lcs,
    verify_cycle_set,
    verify_linear,
    verify_ybe,
)
from .cyclic_resolution import dl_agreement_suite
from .extensions import enumerate_extension_classes
from .lcs_cohomology import cohomology, full_double_complex, reduced_complex

COHOMOLOGY_METHODS = ("full", "reduced", "closed", "all")
EXTENSION_METHODS = ("theorem", "brute", "all")


class RouteDisagreement(RuntimeError):
    pass


@dataclass
class JobSpec:
    command: str
    p: int = None
    nu: int = None
    eta: int = None
    coeff: tuple = ()
    degree: int = None
    method: str = None
    output: str = "json"
    seed: int = 0
    max_v: int = None
    timing: bool = False

    def params(self):
        return CyclicFamilyParams(self.p, self.nu, self.eta)

    def gamma(self):
        return FinAbGroup.from_cyclic_orders(self.coeff)

    def echo(self):
        out = {
            "command": self.command,
            "coeff": list(self.gamma().factors) if self.coeff else [],
            "seed": self.seed,
        }
        for key in ("p", "nu", "eta", "degree", "method", "max_v"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


@dataclass
class Report:
    job: dict
    results: list
    agreement: dict = field(default_factory=dict)
    version: str = __version__
    timing_seconds: float = None

    def as_dict(self, with_timing=False):
        out = {
            "job": self.job,
            "results": self.results,
            "agreement": self.agreement,
            "version": self.version,
        }
        if with_timing and self.timing_seconds is not None:
            out["timing_seconds"] = round(self.timing_seconds, 3)
        return out


def parse_coeff(text):
    """Comma-separated cyclic orders; 0 denotes an infinite cyclic factor."""
    if not text:
        raise ParameterDomainError("empty coefficient list")
    try:
        orders = [int(x) for x in text.split(",")]
    except ValueError:
        raise ParameterDomainError(f"cannot parse coefficients {text!r}")
    if any(o < 0 for o in orders):
        raise ParameterDomainError("cyclic orders must be nonnegative")
    return tuple(orders)


def thread_count():
    raw = os.environ.get("CYCLECOH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# the four commands
# ---------------------------------------------------------------------------


def run_cohomology(spec):
    params = spec.params()
    gamma = spec.gamma()
    degree = spec.degree if spec.degree is not None else 2
    method = spec.method or "all"
    if method == "all":
        methods = ["closed"]
        if gamma.is_finite:
            methods = ["full", "reduced", "closed"]
    else:
        methods = [method]
    results = []
    groups = {}
    for m in methods:
        res = cohomology(params, gamma, degree, m)
        groups[m] = res.group
        results.append(
            {
                "method": m,
                "invariant_factors": list(res.group.factors),
                "representatives": len(res.representatives),
            }
        )
    agreement = {}
    names = sorted(groups)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            agreement[f"{a}={b}"] = groups[a] == groups[b]
    agreement["all"] = all(agreement.values()) if agreement else True
    report = Report(spec.echo(), results, agreement)
    if not agreement["all"]:
        raise RouteDisagreement(render(report, spec))
    return report


def _render_parameters(tup):
    return [list(x.coords) for x in tup]


def run_extensions(spec):
    params = spec.params()
    gamma = spec.gamma()
    method = spec.method or "theorem"
    methods = ["theorem", "brute"] if method == "all" else [method]
    results = []
    counts = {}
    h2 = cohomology(params, gamma, 2, "closed").group.order()
    for m in methods:
        classes = enumerate_extension_classes(gamma, params, m)
        counts[m] = len(classes)
        reps = []
        for ext in classes:
            if ext.family is not None:
                reps.append(
                    {
                        "case": ext.family[0],
                        "parameters": _render_parameters(ext.family[1]),
                    }
                )
            else:
                reps.append({"cocycle_key": list(ext.pair.flat_key())})
        results.append({"method": m, "classes": len(classes), "representatives": reps})
    agreement = {"count=h2_order": all(c == h2 for c in counts.values())}
    if len(counts) == 2:
        agreement["theorem=brute"] = counts["theorem"] == counts["brute"]
    agreement["all"] = all(agreement.values())
    report = Report(spec.echo(), results, agreement)
    if not agreement["all"]:
        raise RouteDisagreement(render(report, spec))
    return report


def run_verify(spec):
    params = spec.params()
    rng = random.Random(spec.seed)
    lcs = make_cyclic_lcs(params)
    suites = []

    def record(name, finding):
        suites.append({"suite": name, "status": finding})

    record("cycle-set-axioms", "pass" if verify_cycle_set(lcs) else "fail")
    record("linearity", "pass" if verify_linear(lcs) else "fail")
    inv = invariant_elements(lcs)
    ok = inv == [params.t * k for k in range(params.u)]
    record("invariant-elements", "pass" if ok else "fail")
    try:
        verify_ybe(derived_ybe_solution(lcs))
        record("yang-baxter", "pass")
    except (ValueError, AssertionError):
        record("yang-baxter", "fail")
    try:
        full_double_complex(lcs, 3)
        record("full-complex", "pass")
    except AssertionError:
        record("full-complex", "fail")
    try:
        reduced_complex(params)
        record("reduced-transfer-agreement", "pass")
    except AssertionError:
        record("reduced-transfer-agreement", "fail")
    if params.t >= 2:
        try:
            dl_agreement_suite(params)
            record("dl-closed-forms", "pass")
        except AssertionError:
            record("dl-closed-forms", "fail")
    else:
        record("dl-closed-forms", "skipped")
    snf_ok = True
    for _ in range(20):
        rows = rng.randint(1, 5)
        cols = rng.randint(1, 5)
        M = IntegerMatrix.from_rows(
            [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)], cols
        )
        try:
            smith_normal_form(M)
        except AssertionError:
            snf_ok = False
    record("smith-normal-form", "pass" if snf_ok else "fail")
    if spec.coeff:
        gamma = spec.gamma()
        agree = True
        if gamma.is_finite:
            for n in (1, 2):
                gs = {
                    m: cohomology(params, gamma, n, m).group
                    for m in ("full", "reduced", "closed")
                }
                agree = agree and gs["full"] == gs["reduced"] == gs["closed"]
        record("route-agreement", "pass" if agree else "fail")
    failed = [s for s in suites if s["status"] == "fail"]
    report = Report(spec.echo(), suites, {"all": not failed})
    if failed:
        raise RouteDisagreement(render(report, spec))
    return report


def run_table(spec):
    max_v = spec.max_v or 9
    method = spec.method or "closed"
    degrees = (spec.degree,) if spec.degree else (1, 2)
    gamma = spec.gamma()
    members = family_members(max_v)
    rows = []

    def one(member):
        out = []
        for degree in degrees:
            if method == "all" and gamma.is_finite:
                groups = {
                    m: cohomology(member, gamma, degree, m).group
                    for m in ("full", "reduced", "closed")
                }
                agree = len(set(groups.values())) == 1
                factors = groups["closed"].factors
                word = "all-agree" if agree else "DISAGREE"
            else:
                factors = cohomology(member, gamma, degree, "closed").group.factors
                word = "closed-only"
            out.append(
                {
                    "p": member.p,
                    "nu": member.nu,
                    "eta": member.eta,
                    "coeff": list(gamma.factors),
                    "degree": degree,
                    "invariant_factors": list(factors),
                    "agreement": word,
                }
            )
        return out

    nthreads = thread_count()
    if nthreads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            for chunk in pool.map(one, members):
                rows.extend(chunk)
    else:
        for member in members:
            rows.extend(one(member))
    rows.sort(key=lambda r: (r["p"], r["nu"], r["eta"], r["degree"]))
    bad = [r for r in rows if r["agreement"] == "DISAGREE"]
    report = Report(spec.echo(), rows, {"all": not bad})
    if bad:
        raise RouteDisagreement(render(report, spec))
    return report


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render(report, spec):
    data = report.as_dict(with_timing=spec.timing)
    if spec.output == "json":
        return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
    if spec.output == "tsv":
        return render_tsv(report, spec)
    return render_pretty(report, spec)


def emit(report, output="json", timing=False):
    """Render a report without a live JobSpec, using its embedded job echo."""
    job = report.job
    spec = JobSpec(
        command=job["command"],
        p=job.get("p"),
        nu=job.get("nu"),
        eta=job.get("eta"),
        coeff=tuple(job.get("coeff", ())),
        degree=job.get("degree"),
        method=job.get("method"),
        output=output,
        seed=job.get("seed", 0),
        max_v=job.get("max_v"),
        timing=timing,
    )
    return render(report, spec)


def _fmt_factors(factors):
    return "[" + ",".join(str(f) for f in factors) + "]"


def render_tsv(report, spec):
    lines = []
    if spec.command in ("cohomology",):
        word = "all-agree" if report.agreement.get("all") else "DISAGREE"
        for res in report.results:
            lines.append(
                "\t".join(
                    str(x)
                    for x in (
                        spec.p,
                        spec.nu,
                        spec.eta,
                        _fmt_factors(report.job["coeff"]),
                        report.job.get("degree", 2),
                        _fmt_factors(res["invariant_factors"]),
                        word,
                    )
                )
            )
    elif spec.command == "table":
        for row in report.results:
            lines.append(
                "\t".join(
                    str(x)
                    for x in (
                        row["p"],
                        row["nu"],
                        row["eta"],
                        _fmt_factors(row["coeff"]),
                        row["degree"],
                        _fmt_factors(row["invariant_factors"]),
                        row["agreement"],
                    )
                )
            )
    elif spec.command == "extensions":
        for res in report.results:
            lines.append("\t".join(str(x) for x in (spec.p, spec.nu, spec.eta, res["method"], res["classes"])))
    else:
        for s in report.results:
            lines.append(f"{s['suite']}\t{s['status']}")
    return "\n".join(lines) + "\n"


def render_pretty(report, spec):
    lines = [f"# {spec.command} (version {report.version})"]
    lines.append(f"job: {json.dumps(report.job, sort_keys=True)}")
    if spec.command == "verify":
        width = max(len(s["suite"]) for s in report.results)
        for s in report.results:
            lines.append(f"  {s['suite']:<{width}}  {s['status']}")
    elif spec.command == "table":
        lines.append(f"  {'p':>2} {'nu':>2} {'eta':>3}  {'coeff':<10} {'n':>1}  {'H^n':<14} agreement")
        for row in report.results:
            lines.append(
                f"  {row['p']:>2} {row['nu']:>2} {row['eta']:>3}  "
                f"{_fmt_factors(row['coeff']):<10} {row['degree']:>1}  "
                f"{_fmt_factors(row['invariant_factors']):<14} {row['agreement']}"
            )
    elif spec.command == "extensions":
        for res in report.results:
            lines.append(f"  method {res['method']}: {res['classes']} classes")
            for rep in res["representatives"]:
                lines.append(f"    {json.dumps(rep, sort_keys=True)}")
    else:
        for res in report.results:
            lines.append(
                f"  {res['method']:<8} H^{report.job.get('degree', 2)} = "
                f"{_fmt_factors(res['invariant_factors'])}"
            )
        lines.append(f"agreement: {json.dumps(report.agreement, sort_keys=True)}")
    if spec.timing and report.timing_seconds is not None:
        lines.append(f"timing: {report.timing_seconds:.3f}s")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cyclecoh",
        description="Exact cohomology and central extensions of cyclic linear cycle sets",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_params=True):
        if with_params:
            sp.add_argument("--p", type=int, required=True, help="prime")
            sp.add_argument("--nu", type=int, required=True)
            sp.add_argument("--eta", type=int, required=True)
        sp.add_argument("--coeff", type=str, default=None, help="coefficients, e.g. 2,4 (0 = Z)")
        sp.add_argument("--output", choices=("json", "tsv", "pretty"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--timing", action="store_true", help="include timing in the report")

    sp = sub.add_parser("cohomology", help="compute H^n by one or all routes")
    common(sp)
    sp.add_argument("--degree", type=int, choices=(1, 2), default=2)
    sp.add_argument("--method", choices=COHOMOLOGY_METHODS, default="all")

    sp = sub.add_parser("extensions", help="enumerate central extension classes")
    common(sp)
    sp.add_argument("--method", choices=EXTENSION_METHODS, default="theorem")
    sp.add_argument("--enumerate", action="store_true", help="accepted for compatibility; enumeration always runs")

    sp = sub.add_parser("verify", help="run the verification suites")
    common(sp)

    sp = sub.add_parser("table", help="sweep all family members up to a carrier bound")
    common(sp, with_params=False)
    sp.add_argument("--max-v", type=int, default=9, dest="max_v")
    sp.add_argument("--degree", type=int, choices=(1, 2), default=None)
    sp.add_argument("--method", choices=("closed", "all"), default="closed")
    return parser


def spec_from_args(args):
    coeff = parse_coeff(args.coeff) if args.coeff else ()
    if args.command != "table" and not coeff:
        raise ParameterDomainError("--coeff is required")
    if args.command == "table" and not coeff:
        coeff = (2,)
    return JobSpec(
        command=args.command,
        p=getattr(args, "p", None),
        nu=getattr(args, "nu", None),
        eta=getattr(args, "eta", None),
        coeff=coeff,
        degree=getattr(args, "degree", None),
        method=getattr(args, "method", None),
        output=args.output,
        seed=args.seed,
        max_v=getattr(args, "max_v", None),
        timing=args.timing,
    )


RUNNERS = {
    "cohomology": run_cohomology,
    "extensions": run_extensions,
    "verify": run_verify,
    "table": run_table,
}


def run(spec):
    """Dispatch a job; returns the report (raises on domain errors and
    route disagreement, which the CLI turns into exit codes 2 and 3)."""
    start = time.monotonic()
    report = RUNNERS[spec.command](spec)
    report.timing_seconds = time.monotonic() - start
    return report


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args)
    except ParameterDomainError as exc:
        _emit_error("parameter-domain", str(exc))
        return 2
    try:
        report = run(spec)
    except ParameterDomainError as exc:
        _emit_error("parameter-domain", str(exc))
        return 2
    except ValueError as exc:
        _emit_error("parameter-domain", str(exc))
        return 2
    except RouteDisagreement as exc:
        sys.stdout.write(str(exc))
        _emit_error("route-disagreement", "independent routes disagree; this is a bug signal")
        return 3
    sys.stdout.write(render(report, spec))
    return 0


def _emit_error(kind, message):
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
