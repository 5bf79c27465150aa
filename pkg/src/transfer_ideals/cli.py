"""Command line front end.

    python -m transfer_ideals group-info --group 4,2
    python -m transfer_ideals fibers --group 2,2 --loops 1
    python -m transfer_ideals verify f2
    python -m transfer_ideals verify all --max-order 64 --format md --out report.md

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 budget refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from . import fgl as fgl_mod
from .ering import FIBER, INTEGER, build_ealgebra, euler_set, fiber_truncation, localize, quotient
from .groups import (
    AbelianPGroup,
    BudgetExceeded,
    GroupSpecError,
    Subgroup,
    dual_hom,
    family_of,
    hom_from_tuple,
    level_count,
    maximal_subgroups,
    sub_points,
    torsion_ambient,
)
from .loopspace import DEFAULT_BUDGET, build_loop_ring, loop_transfer_ideal
from .verify import (
    CHECKS,
    CheckReport,
    check_bijection,
    check_cyclic,
    check_fdecomp,
    check_fiber_rank,
    check_honda,
    check_im_map,
    check_localizations,
    check_monotypicity,
    check_oracle,
    check_square_at_points,
    check_f2_example,
    check_vandermonde,
    group_spec,
    hom_label,
    run_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
MODES = {"exact1": INTEGER, "fiber": FIBER}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    p: int | None
    n: int
    h: int
    group: AbelianPGroup | None
    mode: str
    trunc: int | None
    budget: int
    fmt: str
    out: str | None
    threads: int

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        mode = MODES[args.mode]
        if mode == INTEGER and args.n != 1:
            raise UsageError("mode exact1 is height 1; use --mode fiber for --n > 1")
        if args.budget <= 0:
            raise UsageError("--budget must be positive")
        group = None
        if args.group is not None:
            group = AbelianPGroup.parse(args.group, args.p)
        return cls(args.p, args.n, args.loops, group, mode, args.trunc, args.budget, args.format, args.out, args.threads)

    def require_group(self) -> AbelianPGroup:
        if self.group is None:
            raise UsageError("--group is required")
        return self.group

    def algebra(self, A: AbelianPGroup):
        law = None
        if self.mode == FIBER and self.trunc is not None:
            need = fiber_truncation(A, A.p, self.n)
            if self.trunc < need:
                raise UsageError(f"--trunc {self.trunc} is below the degree {need} this group needs")
            law = fgl_mod.honda_law(A.p, self.n, self.trunc)
        return build_ealgebra(A, self.mode, self.n, law)


def parse_hom(text: str, A: AbelianPGroup):
    """"1,0;0,1" -> the hom Z_p^2 -> A sending e_1 to (1,0) and e_2 to (0,1)."""
    elems = []
    for chunk in text.split(";"):
        coords = [int(x) for x in chunk.split(",") if x.strip()]
        if len(coords) != A.rank:
            raise UsageError(f"element {chunk!r} needs {A.rank} coordinates")
        elems.append(A.element(coords))
    return hom_from_tuple(A, elems)


# ---------------------------------------------------------------------------
# output


def render(obj, fmt: str) -> str:
    """Render a dict (or a list of row dicts under "rows") as json, md or csv."""
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    rows = obj.get("rows") if isinstance(obj, dict) else None
    head = {k: v for k, v in obj.items() if k != "rows"} if isinstance(obj, dict) else {}
    if fmt == "csv":
        buf = io.StringIO()
        table = rows if rows else [head]
        w = csv.DictWriter(buf, fieldnames=list(table[0]) if table else [])
        w.writeheader()
        for r in table:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()
    lines = [f"- {k}: {v}" for k, v in head.items()]
    if rows:
        cols = list(rows[0])
        lines += ["", "| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        lines += ["| " + " | ".join(str(r[c]) for c in cols) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_group_info(cfg: RunConfig) -> int:
    A = cfg.require_group()
    maxes = maximal_subgroups(A)
    info = {
        "group": str(A),
        "spec": group_spec(A),
        "p": A.p,
        "order": A.order,
        "pairing": "<c, a> = sum_i c_i a_i / p^k_i mod 1 (A* identified with A)",
        "maximal_subgroups": [m.to_json() for m in maxes],
        "maximal_count": len(maxes),
        "homs_from_lattice": A.order**cfg.h,
        "loops": cfg.h,
    }
    emit(render(info, cfg.fmt), cfg.out)
    return EXIT_OK


def cmd_fibers(cfg: RunConfig) -> int:
    A = cfg.require_group()
    L = build_loop_ring(A, cfg.h, cfg.mode, cfg.n, cfg.budget)
    if cfg.mode == FIBER and cfg.trunc is not None:
        L.algebra = cfg.algebra(A)
    I = loop_transfer_ideal(L)
    rows = []
    for i, f in enumerate(L.homs):
        q = I.quotient(i)
        count = level_count(A, cfg.n, cfg.h, dual_hom(f))
        if cfg.mode == INTEGER:
            match = q.free_rank == count
        else:
            match = q.dimension >= count if not I.families[i].is_empty else q.dimension == count
        rows.append(
            {
                "f": hom_label(f),
                "maximal_members": [M.to_json() for M in I.families[i].maximal_members],
                "generators": [L.algebra.format(g) for g in I.factors[i].generators],
                "rank": q.free_rank,
                "invariant_factors": q.invariant_factors or [],
                "level_count": count,
                "match": match,
            }
        )
    table = {"group": group_spec(A), "p": A.p, "n": cfg.n, "loops": cfg.h, "mode": cfg.mode, "rows": rows}
    emit(render(table, cfg.fmt), cfg.out)
    return EXIT_OK if all(r["match"] for r in rows) else EXIT_FAIL


def cmd_level_count(cfg: RunConfig, f_text: str | None) -> int:
    A = cfg.require_group()
    out = {"group": group_spec(A), "n": cfg.n, "loops": cfg.h}
    if f_text:
        f = parse_hom(f_text, A)
        if f.domain.rank != cfg.h:
            raise UsageError("--f must list --loops elements")
        out["f"] = hom_label(f)
        out["count"] = level_count(A, cfg.n, cfg.h, dual_hom(f))
    else:
        out["count"] = level_count(A, cfg.n, cfg.h)
    emit(render(out, cfg.fmt), cfg.out)
    return EXIT_OK


def cmd_sub_count(cfg: RunConfig, k: int, image_text: str | None) -> int:
    if cfg.p is None:
        raise UsageError("--p is required")
    T = torsion_ambient(cfg.p, cfg.h, k)
    gens = []
    if image_text:
        for chunk in image_text.split(";"):
            coords = [int(x) for x in chunk.split(",")]
            if len(coords) != cfg.h:
                raise UsageError(f"image generator {chunk!r} needs {cfg.h} coordinates")
            gens.append(T.element(coords))
    image = Subgroup.generated(T, gens)
    try:
        pts = sub_points(cfg.n, cfg.h, k, image, budget=cfg.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"p": cfg.p, "n": cfg.n, "loops": cfg.h, "k": k, "image": image.to_json(), "count": len(pts)}
    emit(render(out, cfg.fmt), cfg.out)
    return EXIT_OK


def cmd_localize(cfg: RunConfig, f_text: str | None) -> int:
    A = cfg.require_group()
    f = parse_hom(f_text, A) if f_text else hom_from_tuple(A, [A.zero] * cfg.h)
    R = cfg.algebra(A)
    F = family_of(f)
    from .ering import transfer_ideal

    I = transfer_ideal(R, F)
    q = quotient(R, I, invariants=False)
    field = "Q" if cfg.mode == INTEGER else "Fp"
    loc = localize(R, euler_set(R, F), field, ideal=I)
    out = {
        "group": group_spec(A),
        "f": hom_label(f),
        "field": field,
        "euler_set_size": len(loc.euler.characters),
        "quotient_rank": q.free_rank,
        "localized_dimension": loc.dimension,
        "annihilators": [list(w) for w in loc.witnesses],
    }
    emit(render(out, cfg.fmt), cfg.out)
    return EXIT_OK


def _targeted(name: str, cfg: RunConfig, f_text: str | None) -> list[CheckReport]:
    """A single check on the group given by --group."""
    A = cfg.require_group()
    f = parse_hom(f_text, A) if f_text else None
    if name == "f2":
        return [check_f2_example()]
    if name == "fiber-rank":
        return [check_fiber_rank(A, cfg.n, cfg.h, cfg.mode, cfg.budget)]
    if name == "bijection":
        return [check_bijection(A, cfg.n, cfg.h)]
    if name == "oracle":
        return [check_oracle(A)]
    if name == "monotypicity":
        return [check_monotypicity(A, cfg.h)]
    if name == "im-map":
        return [check_im_map(A, cfg.n, cfg.h)]
    if name == "cyclic":
        if A.rank != 1:
            raise UsageError("cyclic needs a cyclic group")
        return [check_cyclic(A.p, A.exponent)]
    if name == "honda":
        return [check_honda(A.p, cfg.n, [A])]
    if f is None:
        f = hom_from_tuple(A, [A.zero] * cfg.h)
    if name == "fdecomp":
        return [check_fdecomp(A, f, cfg.mode, cfg.n)]
    if name == "localize":
        reps = [check_localizations(A, f)]
        return reps + ([check_vandermonde(A.p)] if A.p else [])
    if name == "square":
        return [check_square_at_points(A, f, cfg.n)]
    raise UsageError(f"unknown check {name!r}")


def cmd_verify(cfg: RunConfig, names: Sequence[str], max_order: int, f_text: str | None) -> int:
    names = list(CHECKS) if not names or list(names) == ["all"] else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    if cfg.group is not None:
        reports = [r for name in names for r in _targeted(name, cfg, f_text)]
    else:
        reports = run_suite(names, max_order, cfg.threads)
    failed = [r for r in reports if not r.passed]
    if cfg.fmt == "json":
        text = json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
    elif cfg.fmt == "md":
        text = "\n".join(r.to_markdown() for r in reports)
        text += f"\n**{len(reports) - len(failed)} / {len(reports)} passed or skipped**\n"
    else:
        rows = [
            {"name": r.name, "params": r.params, "status": r.status, "lhs": r.lhs, "rhs": r.rhs, "rows": len(r.rows)}
            for r in reports
        ]
        text = render({"rows": rows}, "csv")
    emit(text, cfg.out)
    for r in failed:
        print(f"FAIL {r.name} {r.params}: {r.lhs} != {r.rhs}; witness {r.witness}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="the prime (inferred from --group when omitted)")
    common.add_argument("--n", type=int, default=1, help="height (default 1)")
    common.add_argument("--loops", "--h", dest="loops", type=int, default=0, help="number of loops h (default 0)")
    common.add_argument("--group", help='cyclic orders, e.g. "4,2"')
    common.add_argument("--mode", choices=sorted(MODES), default="exact1")
    common.add_argument("--trunc", type=int, help="Honda law truncation degree (fiber mode)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="enumeration budget")
    common.add_argument("--format", choices=("json", "md", "csv"), default="json")
    common.add_argument("--out", help="write output to FILE")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="transfer-ideals", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("group-info", parents=[common], help="order, maximal subgroups, |Hom(Z_p^h, A)|")
    sub.add_parser("fibers", parents=[common], help="one row per f: ideal, rank, level count")
    lc = sub.add_parser("level-count", parents=[common], help="count level structures")
    lc.add_argument("--f", help='constraint f as elements, e.g. "1,0;0,1"')
    sc = sub.add_parser("sub-count", parents=[common], help="count subgroup points")
    sc.add_argument("--k", type=int, required=True, help="log_p of the subgroup order")
    sc.add_argument("--image", help='generators of the required image, e.g. "1;0"')
    lo = sub.add_parser("localize", parents=[common], help="quotient rank against S_f localization")
    lo.add_argument("--f", help="the map f (default zero)")
    ve = sub.add_parser("verify", parents=[common], help="run named checks, or all")
    ve.add_argument("checks", nargs="*", help=f"check names ({', '.join(CHECKS)}) or all")
    ve.add_argument("--max-order", type=int, default=64)
    ve.add_argument("--suite", help="JSON manifest {\"checks\": [...], \"max_order\": N}")
    ve.add_argument("--f", help="the map f for targeted fdecomp/localize/square")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        if args.command == "group-info":
            return cmd_group_info(cfg)
        if args.command == "fibers":
            return cmd_fibers(cfg)
        if args.command == "level-count":
            return cmd_level_count(cfg, args.f)
        if args.command == "sub-count":
            return cmd_sub_count(cfg, args.k, args.image)
        if args.command == "localize":
            return cmd_localize(cfg, args.f)
        names, max_order = args.checks, args.max_order
        if args.suite:
            with open(args.suite) as fh:
                manifest = json.load(fh)
            names = manifest.get("checks", names)
            max_order = manifest.get("max_order", max_order)
        return cmd_verify(cfg, names, max_order, args.f)
    except BudgetExceeded as exc:
        print(f"refused: {exc}; rerun with --budget {exc.required}", file=sys.stderr)
        return EXIT_BUDGET
    except (GroupSpecError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
