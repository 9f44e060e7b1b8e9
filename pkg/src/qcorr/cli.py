"""Command-line front end: compute measures, certify laws, run campaigns.

Exit codes are a stable contract: 0 all checks pass, 1 a law check failed,
2 usage or format error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._optim import derive_rng
from .hilbert import (
    DimensionError,
    InvalidPartitionError,
    PureState,
    conditional_entropy,
    reduced_state,
    subsystem_set,
    von_neumann_entropy,
)
from .laws import (
    CertificationError,
    CorrelationTerm,
    LawSpec,
    certify,
    default_tolerance,
    evaluate,
    evaluate_term,
    resolve_laws,
)
from .measures import OptimizerConfig, concurrence_wootters
from .states import (
    StateFormatError,
    derive_seed,
    parse_state_spec,
    realize,
    state_id,
    write_state,
)

CHECK_FAILED = 1
USAGE_ERROR = 2

MEASURES = (
    "entropy",
    "cond-entropy",
    "mutual-info",
    "ef",
    "concurrence",
    "classical-corr",
    "discord",
)
_TERM_KIND = {"ef": "EF", "classical-corr": "ClassicalCorr", "discord": "Discord"}


class UsageError(Exception):
    """Bad arguments or malformed input; mapped to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Echoable settings of one verification campaign."""

    laws: tuple[LawSpec, ...]
    states: str
    samples: int
    seed: int
    tolerance: float | None
    restarts: int
    max_iterations: int
    jobs: int
    out: str | None
    fmt: str

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise UsageError("samples must be >= 1")
        if self.tolerance is not None and self.tolerance <= 0:
            raise UsageError("tolerance must be positive")
        if self.restarts < 1 or self.max_iterations < 1 or self.jobs < 1:
            raise UsageError("restarts, max iterations, and jobs must be >= 1")

    def to_dict(self) -> dict:
        return {
            "laws": [law.name for law in self.laws],
            "states": self.states,
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "restarts": self.restarts,
            "max_iterations": self.max_iterations,
            "format": self.fmt,
        }


def _ids(indices: tuple[int, ...]) -> str:
    return ",".join(str(i) for i in indices)


def _parse_partition(text: str, n_groups: int) -> list[tuple[int, ...]]:
    # groups split on | or ; members on commas, e.g. 0,1|3
    groups = []
    for part in re.split(r"[|;]", text):
        items = [s.strip() for s in part.split(",")]
        if any(not s for s in items):
            raise UsageError(f"empty index in partition {text!r}")
        try:
            groups.append(tuple(int(s) for s in items))
        except ValueError:
            raise UsageError(f"non-integer index in partition {text!r}") from None
    if len(groups) != n_groups:
        raise UsageError(
            f"partition {text!r} has {len(groups)} group(s), expected {n_groups}"
        )
    return groups


def _optimizer_config(args: argparse.Namespace, seed: int) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=args.restarts, max_iterations=args.max_iterations, seed=seed
    )


def _compute_measure(
    measure: str,
    psi: PureState,
    groups: list[tuple[int, ...]],
    cfg: OptimizerConfig,
) -> tuple[float, bool]:
    if measure == "entropy":
        (a,) = groups
        return von_neumann_entropy(reduced_state(psi, a)), True
    a, c = groups
    if measure == "cond-entropy":
        return conditional_entropy(psi, a, c), True
    if measure == "mutual-info":
        sa = subsystem_set(a, psi.n_subsystems)
        sc = subsystem_set(c, psi.n_subsystems)
        if set(sa) & set(sc):
            raise InvalidPartitionError("the two sides overlap")
        union = tuple(sorted(sa + sc))
        s_a = von_neumann_entropy(reduced_state(psi, sa))
        s_c = von_neumann_entropy(reduced_state(psi, sc))
        s_ac = von_neumann_entropy(reduced_state(psi, union))
        return s_a + s_c - s_ac, True
    if measure == "concurrence":
        if len(a) != 1 or len(c) != 1:
            raise InvalidPartitionError("concurrence takes two single subsystems")
        return concurrence_wootters(reduced_state(psi, a + c)), True
    term = CorrelationTerm(_TERM_KIND[measure], a, c)
    result = evaluate_term(term, psi, cfg)
    return result.value, result.converged


def cmd_compute(args: argparse.Namespace) -> int:
    try:
        spec = parse_state_spec(args.state, seed=args.seed)
        psi = realize(spec, 0)
    except StateFormatError as exc:
        raise UsageError(str(exc)) from None
    groups = _parse_partition(args.partition, 1 if args.measure == "entropy" else 2)
    cfg = _optimizer_config(args, args.seed)
    try:
        value, converged = _compute_measure(args.measure, psi, groups, cfg)
    except (InvalidPartitionError, DimensionError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    print(f"{value:.6f}" + ("" if converged else "  [not converged]"))
    if args.out:
        payload = {
            "measure": args.measure,
            "state": args.state,
            "partition": args.partition,
            "value": value,
            "converged": converged,
            "config": {
                "restarts": cfg.restarts,
                "max_iterations": cfg.max_iterations,
                "seed": cfg.seed,
            },
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    status = 0
    for ident in args.laws:
        try:
            laws = resolve_laws(ident)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        for law in laws:
            try:
                cert = certify(law)
            except CertificationError as exc:
                print(f"{law.name}: certification FAILED: {exc}")
                status = CHECK_FAILED
                continue
            print(f"{law.name}: {law.text()}")
            for target, kept, measured in cert.kw_instances:
                print(
                    f"  identity: measuring ({_ids(measured)}) on target "
                    f"({_ids(target)}) trades against entanglement with "
                    f"({_ids(kept)})"
                )
            print(f"  residue: {cert.residue_text()}")
            if cert.is_zero:
                print("  certified: residue identically zero")
            else:
                print(f"  certified: {law.relation} with stored residue")
    return status


def _aggregate(reports: list, wall_time: float) -> dict:
    eq = [r.slack for r in reports if r.law.relation == "Eq"]
    ge = [r.slack for r in reports if r.law.relation == "Ge"]
    le = [r.slack for r in reports if r.law.relation == "Le"]
    return {
        "pass": sum(r.status == "pass" for r in reports),
        "total": len(reports),
        "max_abs_slack_eq": max(abs(s) for s in eq) if eq else None,
        "min_slack_ge": min(ge) if ge else None,
        "max_slack_le": max(le) if le else None,
        "wall_time_s": wall_time,
    }


def _csv_text(reports: list) -> str:
    law = reports[0].law
    terms = law.terms()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [
        "sample",
        "state",
        "law",
        "relation",
        "lhs_sum",
        "rhs_sum",
        "slack",
        "tolerance",
        "status",
        "converged",
    ]
    for k in range(len(terms)):
        header += [
            f"term_{k}_kind",
            f"term_{k}_target",
            f"term_{k}_other",
            f"term_{k}_value",
        ]
    writer.writerow(header)
    for i, rep in enumerate(reports):
        row = [
            i,
            rep.state_id,
            rep.law.name,
            rep.law.relation,
            repr(rep.lhs_sum),
            repr(rep.rhs_sum),
            repr(rep.slack),
            repr(rep.tolerance),
            rep.status,
            rep.converged,
        ]
        for tv in rep.lhs_terms + rep.rhs_terms:
            row += [
                tv.term.kind,
                _ids(tv.term.target),
                _ids(tv.term.other),
                repr(tv.value),
            ]
        writer.writerow(row)
    return buf.getvalue()


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        laws = tuple(
            law
            for ident in args.law.split(",")
            if ident.strip()
            for law in resolve_laws(ident.strip())
        )
        spec = parse_state_spec(args.states, seed=args.seed)
    except (ValueError, StateFormatError) as exc:
        raise UsageError(str(exc)) from None
    if not laws:
        raise UsageError("no law names given")
    rc = RunConfig(
        laws=laws,
        states=args.states,
        samples=args.samples,
        seed=args.seed,
        tolerance=args.tol,
        restarts=args.restarts,
        max_iterations=args.max_iterations,
        jobs=args.jobs,
        out=args.out,
        fmt=args.format,
    )
    for law in laws:
        if law.n_parties != len(spec.dims):
            raise UsageError(
                f"law {law.name} relates {law.n_parties} parties, "
                f"states have {len(spec.dims)}"
            )
    if rc.fmt == "csv" and len(laws) != 1:
        raise UsageError("csv output supports exactly one law")

    def run_sample(i: int) -> list:
        psi = realize(spec, i)
        sid = state_id(spec, i)
        cfg = OptimizerConfig(
            restarts=rc.restarts,
            max_iterations=rc.max_iterations,
            seed=int(derive_seed(rc.seed, 9001, i)),
        )
        out = []
        for law in laws:
            tol = rc.tolerance if rc.tolerance is not None else default_tolerance(law)
            out.append(evaluate(law, psi, cfg, tol, sid))
        return out

    t0 = time.perf_counter()
    if rc.jobs > 1:
        with ThreadPoolExecutor(max_workers=rc.jobs) as pool:
            per_sample = list(pool.map(run_sample, range(rc.samples)))
    else:
        per_sample = [run_sample(i) for i in range(rc.samples)]
    wall = time.perf_counter() - t0
    reports = [rep for sample in per_sample for rep in sample]
    agg = _aggregate(reports, wall)

    if rc.fmt == "csv":
        text = _csv_text(reports)
    else:
        payload = {
            "config": rc.to_dict(),
            "samples": [rep.to_dict() for rep in reports],
            "aggregate": agg,
        }
        text = json.dumps(payload, indent=2) + "\n"
    if rc.out:
        with open(rc.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(
            f"{agg['pass']}/{agg['total']} checks passed in {wall:.1f}s; "
            f"report written to {rc.out}"
        )
    else:
        sys.stdout.write(text)
    return 0 if agg["pass"] == agg["total"] else CHECK_FAILED


def cmd_search(args: argparse.Namespace) -> int:
    try:
        laws = resolve_laws(args.law)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if len(laws) != 1:
        raise UsageError("search takes exactly one law")
    law = laws[0]
    if law.relation == "Eq":
        raise UsageError("search needs an inequality law (relation Ge or Le)")
    tol = args.tol if args.tol is not None else default_tolerance(law)
    if args.budget < 1:
        raise UsageError("budget must be >= 1")

    states = args.states
    if states in ("haar", "product"):
        states += ":" + ",".join("2" * law.n_parties)
    try:
        spec = parse_state_spec(states, seed=args.seed)
    except StateFormatError as exc:
        raise UsageError(str(exc)) from None
    if len(spec.dims) != law.n_parties:
        raise UsageError(
            f"law {law.name} relates {law.n_parties} parties, "
            f"start states have {len(spec.dims)}"
        )

    def eval_state(psi: PureState, k: int, sid: str):
        cfg = OptimizerConfig(
            restarts=args.restarts,
            max_iterations=args.max_iterations,
            seed=int(derive_seed(args.seed, 404, k)),
        )
        return evaluate(law, psi, cfg, tol, sid)

    sign = 1.0 if args.direction == "max" else -1.0
    rng = derive_rng(args.seed, 303)
    best_psi = realize(spec, 0)
    best = eval_state(best_psi, 0, state_id(spec, 0))
    evals = 1
    sigma = 0.3
    while evals < args.budget:
        n_amp = best_psi.amplitudes.size
        noise = rng.standard_normal(n_amp) + 1j * rng.standard_normal(n_amp)
        vec = best_psi.amplitudes + sigma * noise
        vec = vec / np.linalg.norm(vec)
        cand = PureState(spec.dims, vec)
        rep = eval_state(cand, evals, f"search:{law.name}#{evals}")
        evals += 1
        if sign * rep.slack > sign * best.slack:
            best_psi, best = cand, rep
            sigma = min(1.0, sigma * 1.3)
        else:
            sigma = max(1e-3, sigma * 0.7)

    prefix = args.out or f"search_{law.name}_{args.direction}"
    state_path = prefix + ".state.json"
    report_path = prefix + ".report.json"
    write_state(best_psi, state_path)
    payload = {
        "law": law.name,
        "direction": args.direction,
        "budget": args.budget,
        "seed": args.seed,
        "tolerance": tol,
        "best": best.to_dict(),
    }
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(
        f"{law.name} {args.direction}: best slack {best.slack:.6f} "
        f"after {evals} evaluations"
    )
    print(f"state:  {state_path}")
    print(f"report: {report_path}")
    violated = (law.relation == "Ge" and best.slack < -tol) or (
        law.relation == "Le" and best.slack > tol
    )
    return CHECK_FAILED if violated else 0


def _add_optimizer_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=1234, help="base RNG seed")
    sub.add_argument("--restarts", type=int, default=8)
    sub.add_argument("--max-iterations", type=int, default=10000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcorr",
        description="Correlation measures and conservation-law checks "
        "for small multipartite states.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("compute", help="evaluate one measure on one state")
    p.add_argument("--measure", required=True, choices=MEASURES)
    p.add_argument("--state", required=True, help="state spec, e.g. ghz:3 or haar:2,2,2")
    p.add_argument(
        "--partition",
        required=True,
        help="index groups split by | or ; e.g. 0|2 or 0,1|3 (entropy takes one group)",
    )
    p.add_argument("--out", help="write a JSON report here")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_compute)

    p = subs.add_parser("certify", help="symbolically certify laws")
    p.add_argument("laws", nargs="+", help="law names, gen:family:N, or 'all'")
    p.set_defaults(func=cmd_certify)

    p = subs.add_parser("verify", help="Monte-Carlo verification campaign")
    p.add_argument("--law", required=True, help="law name(s), comma separated, or 'all'")
    p.add_argument("--states", required=True, help="state spec, e.g. haar:2,2,2")
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--tol", type=float, default=None, help="override the per-law default")
    p.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get("QCORR_JOBS", "1")),
        help="concurrent samples (default: QCORR_JOBS or 1)",
    )
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("search", help="hill-climb the slack of an inequality")
    p.add_argument("--law", required=True)
    p.add_argument("--direction", required=True, choices=("min", "max"))
    p.add_argument(
        "--states",
        default="haar",
        help="start state spec; bare 'haar' or 'product' expands to the law arity",
    )
    p.add_argument("--budget", type=int, default=60, help="number of evaluations")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="output path prefix")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
