"""Checkers that compare the ring side with the point-counting side.

Each check returns a :class:`CheckReport` whose status is ``pass``, ``fail``
or ``skipped(hypothesis)``.  Reports contain only exact data so a check is
reproducible bit for bit from its parameters.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Iterator

from . import fgl as fgl_mod
from .ering import (
    FIBER,
    INTEGER,
    EAlgebra,
    IdealLattice,
    annihilation_witnesses,
    build_ealgebra,
    euler_set,
    ideal_from,
    localize,
    quotient,
    representation_oracle,
    transfer_ideal,
    transfer_unit,
)
from .groups import (
    AbelianPGroup,
    BudgetExceeded,
    Homomorphism,
    Subgroup,
    SubgroupFamily,
    annihilator,
    dual_hom,
    family_of,
    hom_from_tuple,
    hom_set,
    image_subgroup,
    injection_count,
    is_sub_point,
    level_count,
    level_points,
    log_p,
    maximal_subgroups,
    minimal_summand_split,
    monotypicity_check,
    qz_subgroup,
    split_coordinates,
    sub_points,
)
from .loopspace import DEFAULT_BUDGET, build_loop_ring, character_model, loop_transfer_ideal
from . import lattice

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped(hypothesis)"


@dataclass
class CheckReport:
    name: str
    params: dict
    status: str
    lhs: Any = None
    rhs: Any = None
    witness: Any = None
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_markdown(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        lines = [f"### {self.name} ({params}): **{self.status}**", "", f"- left: `{self.lhs}`", f"- right: `{self.rhs}`"]
        if self.witness not in (None, [], {}):
            lines.append(f"- witness: `{self.witness}`")
        if self.rows:
            cols = list(self.rows[0])
            lines += ["", "| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
            for r in self.rows:
                lines.append("| " + " | ".join(str(r[c]) for c in cols) + " |")
        return "\n".join(lines) + "\n"


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def group_spec(A: AbelianPGroup) -> str:
    return ",".join(map(str, A.moduli)) or "1"


def hom_label(f: Homomorphism) -> list[list[int]]:
    return [list(y) for y in f.images]


def groups_up_to(p: int, max_order: int, min_order: int = 1) -> list[AbelianPGroup]:
    """Every abelian p-group of order in [min_order, max_order], by partitions."""

    def partitions(total: int, largest: int) -> Iterator[tuple[int, ...]]:
        if total == 0:
            yield ()
            return
        for k in range(min(total, largest), 0, -1):
            for rest in partitions(total - k, k):
                yield (k,) + rest

    out = []
    t = 0
    while p**t <= max_order:
        if p**t >= min_order:
            out += [AbelianPGroup(p, part) for part in partitions(t, t)]
        t += 1
    return out


# ---------------------------------------------------------------------------
# the worked F_2 example


def check_f2_example() -> CheckReport:
    A = AbelianPGroup(2, (1, 1))
    R = build_ealgebra(A)
    I = transfer_ideal(R, SubgroupFamily.all_proper(A))
    q = quotient(R, I)
    target = ideal_from(R, [R.constant(2), R.gen(0), R.gen(1)])
    injections = injection_count(A, 1)
    ok = q.order == 2 and q.invariant_factors == [2] and q.free_rank == 0 and I == target and injections == 0
    return CheckReport(
        "f2",
        {"p": 2, "n": 1, "A": "2,2", "mode": INTEGER},
        _status(ok),
        lhs={"order": q.order, "invariant_factors": q.invariant_factors, "rank": q.free_rank},
        rhs={"order": 2, "invariant_factors": [2], "rank": injections},
        witness={"generators": [R.format(g) for g in I.generators], "equals (2,x,y)": I == target},
    )


# ---------------------------------------------------------------------------
# fibrewise rank identity


def check_fiber_rank(A: AbelianPGroup, n: int = 1, h: int = 1, mode: str = INTEGER, budget: int = DEFAULT_BUDGET) -> CheckReport:
    """Rank of (E^0(BA)/I_{F_f})^tors against |Level_{f*}| for every f.

    In fibre mode the rank is only known to be a lower bound for the F_p
    dimension unless the ideal vanishes.
    """
    L = build_loop_ring(A, h, mode, n, budget)
    I = loop_transfer_ideal(L)
    rows, ok, total = [], True, 0
    for i, f in enumerate(L.homs):
        q = I.quotient(i, invariants=False)
        count = level_count(A, n, h, dual_hom(f))
        total += count
        if mode == INTEGER:
            match = q.free_rank == count
        elif I.families[i].is_empty:
            match = q.dimension == count == A.order**n
        else:
            match = q.dimension >= count
        ok &= match
        rows.append({"f": hom_label(f), "maximal": len(I.families[i]), "rank": q.free_rank, "count": count, "match": match})
    expected = level_count(A, n, h)
    ok &= mode != INTEGER or total == expected
    ranks = sum(r["rank"] for r in rows)
    return CheckReport(
        "fiber-rank",
        {"p": A.p, "n": n, "h": h, "A": group_spec(A), "mode": mode},
        _status(ok),
        lhs=ranks,
        rhs=expected,
        witness=next((r for r in rows if not r["match"]), None),
        rows=rows,
    )


# ---------------------------------------------------------------------------
# invariant factors over a summand split


@dataclass
class SplitData:
    M: Subgroup
    K: Subgroup
    hypotheses: bool
    reason: str


def fdecomp_split(f: Homomorphism) -> SplitData:
    """A = M + K adapted to f, found through the dual split of ker f*.

    With S' = ker f* = ann(im f) and A* = M' + K' its minimal summand split,
    M = ann(K') and K = ann(M') give A = M + K; the proposition then needs
    K ⊆ im f and the M-component of im f inside pM.
    """
    A = f.codomain
    im = f.image()
    S = annihilator(A, im)
    Mp, Kp = minimal_summand_split(A, S)
    M, K = annihilator(A, Kp), annihilator(A, Mp)
    coords = split_coordinates(A, M, K)
    if not K <= im:
        return SplitData(M, K, False, "K is not contained in im f")
    pM = M.multiple(1)
    if not all(coords[a][0] in pM for a in im.generators()):
        return SplitData(M, K, False, "im f_M is not contained in pM")
    return SplitData(M, K, True, "")


def _quotient_data(R: EAlgebra, F: SubgroupFamily) -> tuple[int, list[int]]:
    q = quotient(R, transfer_ideal(R, F))
    return q.free_rank, q.invariant_factors or []


def check_fdecomp(A: AbelianPGroup, f: Homomorphism, mode: str = INTEGER, n: int = 1) -> CheckReport:
    params = {"p": A.p, "n": n, "A": group_spec(A), "f": hom_label(f), "mode": mode}
    split = fdecomp_split(f)
    info = {"M": str(split.M.isomorphism_type()), "K": str(split.K.isomorphism_type())}
    if not split.hypotheses:
        return CheckReport("fdecomp", params, SKIPPED, witness={**info, "reason": split.reason})
    R = build_ealgebra(A, mode, n)
    rank_a, tors_a = _quotient_data(R, family_of(f))
    Mt = split.M.isomorphism_type()
    RM = build_ealgebra(Mt, mode, n)
    rank_m, tors_m = _quotient_data(RM, SubgroupFamily.all_proper(Mt))
    copies = split.K.order**n
    lhs = {"rank": rank_a, "invariant_factors": sorted(tors_a)}
    rhs = {"rank": rank_m * copies, "invariant_factors": sorted(tors_m * copies)}
    return CheckReport("fdecomp", params, _status(lhs == rhs), lhs, rhs, witness=info)


# ---------------------------------------------------------------------------
# rational quotient against localization, and the Vandermonde vanishing


def localization_gate(f: Homomorphism, n: int = 1) -> tuple[bool, str]:
    """Hypotheses under which Q ⊗ E^0(BA)/I_{F_f} = S_f^{-1} E^0(BA) is asserted."""
    split = fdecomp_split(f)
    if not split.hypotheses:
        return False, split.reason
    Mt = split.M.isomorphism_type()
    if Mt.rank not in (0, n):
        return False, f"M/pM has rank {Mt.rank}, not {n}"
    return True, ""


def check_localizations(A: AbelianPGroup, f: Homomorphism, mode: str = INTEGER) -> CheckReport:
    params = {"p": A.p, "n": 1, "A": group_spec(A), "f": hom_label(f), "mode": mode}
    ok_gate, reason = localization_gate(f)
    if not ok_gate:
        return CheckReport("localize", params, SKIPPED, witness={"reason": reason})
    R = build_ealgebra(A, mode)
    F = family_of(f)
    I = transfer_ideal(R, F)
    q = quotient(R, I, invariants=False)
    S = euler_set(R, F)
    loc = localize(R, S, "Q", ideal=I)
    # Q-span of I against the kernel of R -> S^{-1}(Q ⊗ R)
    K = loc.kernel_basis
    spans_equal = lattice.rank_q(list(K) + list(I.rows), R.size) == len(K) == I.rank
    killed = all(w for _, w in loc.witnesses)
    ok = q.free_rank == loc.dimension and spans_equal and killed
    return CheckReport(
        "localize",
        params,
        _status(ok),
        lhs=q.free_rank,
        rhs=loc.dimension,
        witness={"euler_set": len(S), "spans_equal": spans_equal, "annihilators": loc.witnesses},
    )


def check_vandermonde(p: int) -> CheckReport:
    Z = AbelianPGroup(p, (1, 1))
    R = build_ealgebra(Z)
    loc = localize(R, euler_set(R), "Q")
    return CheckReport(
        "vandermonde", {"p": p, "n": 1, "A": group_spec(Z)}, _status(loc.dimension == 0), loc.dimension, 0
    )


# ---------------------------------------------------------------------------
# restriction square and the subgroup image map, at points


def check_square_at_points(A: AbelianPGroup, f: Homomorphism, n: int = 1, sub_budget: int = 1 << 12) -> CheckReport:
    h = f.domain.rank
    params = {"p": A.p, "n": n, "h": h, "A": group_spec(A), "f": hom_label(f)}
    fs = dual_hom(f)
    ker = fs.kernel()
    k = log_p(A.order, A.p)
    required = qz_subgroup(fs, k)
    pts = level_points(A, n, h, fs)
    restrict_ok = all(any(l(a)[:n]) for l in pts for a in ker.elements() if any(a))
    images = [image_subgroup(l) for l in pts]
    im_ok = all(is_sub_point(S, n, h, k, required) for S in images)
    distinct = len({S.basis for S in images})
    mono = monotypicity_check(f).holds
    try:
        total = len(sub_points(n, h, k, required, budget=sub_budget))
    except BudgetExceeded:
        total = None
    ok = restrict_ok and im_ok and mono and (total is None or distinct <= total)
    return CheckReport(
        "square",
        params,
        _status(ok),
        lhs={"points": len(pts), "distinct_images": distinct},
        rhs={"sub_points": total},
        witness={"restriction_injective": restrict_ok, "im_well_defined": im_ok, "monotypical": mono},
    )


def check_monotypicity(A: AbelianPGroup, h: int = 1) -> CheckReport:
    bad = [hom_label(f) for f in hom_set(A, h) if not monotypicity_check(f).holds]
    return CheckReport(
        "monotypicity", {"p": A.p, "h": h, "A": group_spec(A)}, _status(not bad), A.order**h, A.order**h - len(bad), bad[:1]
    )


def check_im_map(A: AbelianPGroup, n: int = 1, h: int = 1) -> CheckReport:
    """Every constrained level point has image in the constrained subgroup points."""
    k = log_p(A.order, A.p)
    checked, bad = 0, None
    for f in hom_set(A, h):
        fs = dual_hom(f)
        required = qz_subgroup(fs, k)
        for l in level_points(A, n, h, fs):
            checked += 1
            if bad is None and not is_sub_point(image_subgroup(l), n, h, k, required):
                bad = {"f": hom_label(f), "point": l.to_json()}
    return CheckReport(
        "im-map", {"p": A.p, "n": n, "h": h, "A": group_spec(A)}, _status(bad is None), checked, checked, bad
    )


# ---------------------------------------------------------------------------
# cyclic groups, the character bijection, the Honda fibre, the oracle


def check_cyclic(p: int, k: int) -> CheckReport:
    A = AbelianPGroup(p, (k,))
    R = build_ealgebra(A)
    f = hom_from_tuple(A, [A.element([p])])  # im f = pA, not surjective
    I = transfer_ideal(R, family_of(f))
    angle = fgl_mod.angle_series(R.fgl, k).to_list()
    J = ideal_from(R, [R.from_univariate(0, angle)])
    q = quotient(R, I)
    expected = p ** (k - 1) * (p - 1)
    brute = injection_count(A, 1)
    ok = I == J and q.free_rank == expected == brute and not q.invariant_factors
    return CheckReport(
        "cyclic",
        {"p": p, "k": k, "A": group_spec(A)},
        _status(ok),
        lhs={"rank": q.free_rank, "ideal_is_angle": I == J},
        rhs={"rank": expected, "injections": brute},
    )


def check_bijection(A: AbelianPGroup, n: int, h: int) -> CheckReport:
    """Jointly surjective pairs match injective duals one to one."""
    cm = character_model(A, n, h)
    support = cm.quotient_support()
    joint = cm.jointly_surjective()
    matching = cm.bijection()
    images = list(matching.values())
    pts = set(level_points(A, n, h).points)
    injective = all(l.is_injective() for l in images)
    one_to_one = len(set(images)) == len(images)
    onto = set(images) == pts
    others = all(not cm.level_point(pr).is_injective() for pr in cm.pairs if pr not in support)
    fibers = all(
        len(cm.fiber_support(f)) == level_count(A, n, h, dual_hom(f)) for f in hom_set(A, h)
    )
    ok = support == joint and injective and one_to_one and onto and others and fibers
    return CheckReport(
        "bijection",
        {"p": A.p, "n": n, "h": h, "A": group_spec(A)},
        _status(ok),
        lhs=len(support),
        rhs=len(pts),
        witness={"support_is_joint": support == joint, "injective": injective, "one_to_one": one_to_one, "onto": onto, "fibers": fibers},
    )


def check_honda(p: int, n: int, groups: Iterable[AbelianPGroup] = (), D: int | None = None) -> CheckReport:
    """Law axioms, [p^k](x) = x^{p^{kn}} from the law itself, and I = 0 fibres."""
    if D is None:
        D = max(8, p ** (2 * n)) if p ** (2 * n) <= 16 else p**n
    F = fgl_mod.honda_law(p, n, D)
    axioms = fgl_mod.check_law_axioms(F, D)
    pseries = {}
    for k in (1, 2):
        if p ** (k * n) <= D:
            iterated = fgl_mod.multiple_series(F, p**k, D)
            pseries[k] = iterated == fgl_mod.p_series(F, k)
    rows = []
    for A in groups:
        R = build_ealgebra(A, FIBER, n)
        f = hom_from_tuple(A, A.generators())  # surjective, so F_f is empty
        dim = quotient(R, transfer_ideal(R, family_of(f))).dimension
        count = level_count(A, n, A.rank, dual_hom(f))
        rows.append({"A": group_spec(A), "dimension": dim, "order^n": A.order**n, "count": count, "match": dim == A.order**n == count})
    ok = all(axioms.values()) and all(pseries.values()) and all(r["match"] for r in rows)
    return CheckReport(
        "honda", {"p": p, "n": n, "D": D}, _status(ok), lhs={"axioms": axioms, "p_series": pseries}, rhs=None, rows=rows
    )


def check_oracle(A: AbelianPGroup) -> CheckReport:
    R = build_ealgebra(A)
    rows = []
    for H in maximal_subgroups(A):
        ring_side = IdealLattice(R, [transfer_unit(R, H)]).basis
        oracle = representation_oracle(A, H).mapped_basis(R)
        rows.append({"H": str(H), "match": ring_side == oracle})
    ok = all(r["match"] for r in rows)
    return CheckReport("oracle", {"p": A.p, "A": group_spec(A)}, _status(ok), len(rows), sum(r["match"] for r in rows), rows=rows)


# ---------------------------------------------------------------------------
# registry and suites


def _image_representatives(A: AbelianPGroup, h: int) -> list[Homomorphism]:
    """One f per image subgroup; everything checked here depends on im f only."""
    seen, out = set(), []
    for f in hom_set(A, h):
        key = f.image().basis
        if key not in seen:
            seen.add(key)
            out.append(f)
    return out


def suite_jobs(name: str, max_order: int = 64) -> list[tuple[str, Callable[[], CheckReport]]]:
    """Parameter sweeps in canonical order, as (label, thunk) pairs."""
    jobs: list[tuple[str, Callable[[], CheckReport]]] = []

    def add(label, fn, *args, **kw):
        jobs.append((label, lambda: fn(*args, **kw)))

    if name == "f2":
        add("f2", check_f2_example)
    elif name == "cyclic":
        for p in (2, 3):
            for k in (1, 2, 3):
                if p**k <= max(max_order, 27):
                    add(f"cyclic p={p} k={k}", check_cyclic, p, k)
    elif name == "fiber-rank":
        for p in (2, 3):
            for A in groups_up_to(p, max_order):
                for h in (1, 2):
                    if A.order ** (h + 1) <= DEFAULT_BUDGET:
                        add(f"fiber-rank {group_spec(A)} h={h}", check_fiber_rank, A, 1, h)
    elif name == "bijection":
        for p in (2, 3):
            for A in groups_up_to(p, min(max_order, 16)):
                for n, h in ((1, 0), (0, 1), (1, 1), (2, 0), (2, 1), (1, 2), (0, 2), (3, 0), (0, 3)):
                    if A.order ** (n + h) <= 4096:
                        add(f"bijection {group_spec(A)} n={n} h={h}", check_bijection, A, n, h)
    elif name == "fdecomp":
        for p in (2, 3):
            for A in groups_up_to(p, max_order, 2):
                for f in _image_representatives(A, 2 if A.order <= 16 else 1):
                    add(f"fdecomp {group_spec(A)} f={hom_label(f)}", check_fdecomp, A, f)
    elif name == "localize":
        for p in (2, 3):
            add(f"vandermonde p={p}", check_vandermonde, p)
            for A in groups_up_to(p, max_order, 2):
                for f in _image_representatives(A, 2 if A.order <= 16 else 1):
                    add(f"localize {group_spec(A)} f={hom_label(f)}", check_localizations, A, f)
    elif name == "honda":
        add("honda p=2 n=1", check_honda, 2, 1, [AbelianPGroup(2, e) for e in ((1,), (2,), (1, 1), (2, 1))])
        add("honda p=2 n=2", check_honda, 2, 2, [AbelianPGroup(2, e) for e in ((1,), (2,), (1, 1))])
        add("honda p=3 n=2", check_honda, 3, 2, [AbelianPGroup(3, e) for e in ((1,),)])
    elif name == "oracle":
        for p in (2, 3):
            for A in groups_up_to(p, min(max_order, 16), 2):
                add(f"oracle {group_spec(A)}", check_oracle, A)
    elif name == "monotypicity":
        for p in (2, 3):
            for A in groups_up_to(p, min(max_order, 32)):
                for h in (1, 2):
                    if A.order**h <= 1024:
                        add(f"monotypicity {group_spec(A)} h={h}", check_monotypicity, A, h)
    elif name == "im-map":
        for p in (2, 3):
            for A in groups_up_to(p, min(max_order, 16), 2):
                for h in (0, 1, 2):
                    if A.order ** (1 + h) <= 4096:
                        add(f"im-map {group_spec(A)} h={h}", check_im_map, A, 1, h)
    elif name == "square":
        for p in (2, 3):
            for A in groups_up_to(p, min(max_order, 8), 2):
                for f in _image_representatives(A, 1):
                    add(f"square {group_spec(A)} f={hom_label(f)}", check_square_at_points, A, f)
    else:
        raise KeyError(name)
    return jobs


CHECKS = ("f2", "cyclic", "fiber-rank", "bijection", "fdecomp", "localize", "honda", "oracle", "monotypicity", "im-map", "square")


def run_suite(names: Iterable[str] = CHECKS, max_order: int = 64, threads: int = 1) -> list[CheckReport]:
    """Run the named sweeps; reports come back in canonical job order."""
    names = list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")
    jobs = [fn for name in names for _, fn in suite_jobs(name, max_order)]
    if threads <= 1:
        return [fn() for fn in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda fn: fn(), jobs))
