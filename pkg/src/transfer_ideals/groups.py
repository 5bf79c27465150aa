"""Finite abelian p-groups, Pontryagin duality and point enumeration.

A group ``A = Z/p^k1 + ... + Z/p^kj`` is stored by its exponents in
descending order.  Elements are tuples of residues.  The dual group ``A*`` is
identified with ``A`` through the pairing

    <c, a> = sum_i c_i * a_i / p^{k_i}   (mod 1),

so characters are also residue tuples.  Points of ``Q_p/Z_p`` are
:class:`fractions.Fraction` values in ``[0, 1)`` with p-power denominator.

Subgroups are stored in canonical form: the Hermite basis of their preimage
lattice in ``Z^j`` (which always contains ``p^{k_i} e_i``).  Two subgroups are
equal exactly when their bases are equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import prod
from typing import Iterable, Iterator, Optional, Sequence

from . import lattice

Element = tuple[int, ...]
QZVector = tuple[Fraction, ...]


class GroupSpecError(ValueError):
    """Raised for malformed textual group specifications."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def log_p(m: int, p: int) -> int:
    """Exponent e with p**e == m; ValueError otherwise."""
    e = 0
    while m > 1 and m % p == 0:
        m //= p
        e += 1
    if m != 1:
        raise ValueError("not a power of p")
    return e


@dataclass(frozen=True)
class AbelianPGroup:
    """The group Z/p^k1 + ... + Z/p^kj with k1 >= ... >= kj >= 1.

    >>> A = AbelianPGroup(2, (1, 2))
    >>> A.exponents, A.order
    ((2, 1), 8)
    >>> str(A)
    'Z/4 + Z/2'
    """

    p: int
    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        exps = tuple(sorted((int(k) for k in self.exponents), reverse=True))
        if any(k <= 0 for k in exps):
            raise ValueError("exponents must be positive")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def parse(cls, spec: str, p: int | None = None) -> "AbelianPGroup":
        """Parse ``"4,2"`` (cyclic orders) into a group.

        The prime is inferred when not given.  ``"1"`` or an empty string is
        the trivial group.
        """
        text = spec.strip()
        if text in ("", "1", "0", "trivial"):
            if p is None:
                raise GroupSpecError("cannot infer p for the trivial group; pass --p")
            return cls(p, ())
        orders: list[tuple[int, int]] = []
        pos = 0
        for chunk in spec.split(","):
            stripped = chunk.strip()
            start = pos + (len(chunk) - len(chunk.lstrip()))
            if not stripped.isdigit():
                raise GroupSpecError(f"expected a positive integer, got {stripped!r}", start)
            orders.append((int(stripped), start))
            pos += len(chunk) + 1
        if p is None:
            first = orders[0][0]
            p = next((d for d in range(2, first + 1) if first % d == 0), None)
            if p is None:
                raise GroupSpecError("cannot infer p from order 1; pass --p", orders[0][1])
        exps = []
        for m, start in orders:
            if m == 1:
                continue
            try:
                exps.append(log_p(m, p))
            except ValueError:
                raise GroupSpecError(f"{m} is not a power of p={p}", start) from None
        return cls(p, tuple(exps))

    def __str__(self) -> str:
        if not self.exponents:
            return "0"
        return " + ".join(f"Z/{self.p ** k}" for k in self.exponents)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @cached_property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**k for k in self.exponents)

    @cached_property
    def order(self) -> int:
        return prod(self.moduli)

    @property
    def exponent(self) -> int:
        """Largest k with Z/p^k a summand (0 for the trivial group)."""
        return self.exponents[0] if self.exponents else 0

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def element(self, coords: Iterable[int]) -> Element:
        c = tuple(coords)
        if len(c) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(c)}")
        return tuple(x % m for x, m in zip(c, self.moduli))

    def elements(self) -> Iterator[Element]:
        """All elements in lexicographic order."""
        return itertools.product(*(range(m) for m in self.moduli))

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def sub(self, a: Element, b: Element) -> Element:
        return tuple((x - y) % m for x, y, m in zip(a, b, self.moduli))

    def scale(self, c: int, a: Element) -> Element:
        return tuple((c * x) % m for x, m in zip(a, self.moduli))

    def order_of(self, a: Element) -> int:
        o = 1
        for x, m in zip(a, self.moduli):
            if x:
                o = max(o, m // _gcd(x, m))
        return o

    def pairing(self, c: Element, a: Element) -> Fraction:
        """Value of the character c on a, in [0, 1)."""
        return sum((Fraction(ci * ai, m) for ci, ai, m in zip(c, a, self.moduli)), Fraction(0)) % 1

    def gen(self, i: int) -> Element:
        return tuple(int(t == i) for t in range(self.rank))

    def generators(self) -> list[Element]:
        return [self.gen(i) for i in range(self.rank)]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of ``ambient`` in canonical (Hermite) form."""

    ambient: AbelianPGroup
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def generated(cls, A: AbelianPGroup, gens: Iterable[Sequence[int]]) -> "Subgroup":
        rows = [tuple(g) for g in gens]
        diag = [tuple(m if i == t else 0 for t in range(A.rank)) for i, m in enumerate(A.moduli)]
        return cls(A, lattice.hermite_basis(rows + diag, A.rank))

    @classmethod
    def trivial(cls, A: AbelianPGroup) -> "Subgroup":
        return cls.generated(A, [])

    @classmethod
    def whole(cls, A: AbelianPGroup) -> "Subgroup":
        return cls.generated(A, A.generators())

    @cached_property
    def order(self) -> int:
        return self.ambient.order // prod(self.basis[i][i] for i in range(len(self.basis)))

    @property
    def index(self) -> int:
        return self.ambient.order // self.order

    def generators(self) -> list[Element]:
        """Canonical generators: Hermite rows reduced into the ambient group."""
        out = []
        for row in self.basis:
            e = self.ambient.element(row)
            if any(e):
                out.append(e)
        return out

    def elements(self) -> Iterator[Element]:
        A = self.ambient
        ranges = [range(m // self.basis[i][i]) for i, m in enumerate(A.moduli)]
        for cs in itertools.product(*ranges):
            v = [0] * A.rank
            for c, row in zip(cs, self.basis):
                if c:
                    for t, x in enumerate(row):
                        v[t] += c * x
            yield A.element(v)

    @cached_property
    def element_set(self) -> frozenset[Element]:
        return frozenset(self.elements())

    def __contains__(self, a: Element) -> bool:
        v = list(a)
        for i, row in enumerate(self.basis):
            d = row[i]
            if v[i] % d:
                return False
            q = v[i] // d
            v = [x - q * y for x, y in zip(v, row)]
        return True

    def issubset(self, other: "Subgroup") -> bool:
        return all(g in other for g in self.generators())

    def __le__(self, other: "Subgroup") -> bool:
        return self.issubset(other)

    def __lt__(self, other: "Subgroup") -> bool:
        return self != other and self.issubset(other)

    def join(self, other: "Subgroup") -> "Subgroup":
        return Subgroup.generated(self.ambient, self.generators() + other.generators())

    def meet(self, other: "Subgroup") -> "Subgroup":
        small, big = (self, other) if self.order <= other.order else (other, self)
        return Subgroup.generated(self.ambient, [a for a in small.elements() if a in big])

    def multiple(self, r: int) -> "Subgroup":
        """The subgroup p^r * S."""
        c = self.ambient.p**r
        return Subgroup.generated(self.ambient, [self.ambient.scale(c, g) for g in self.generators()])

    def is_pure(self) -> bool:
        """S ∩ p^r A = p^r S for all r; for finite p-groups this means S is a summand."""
        A = self.ambient
        whole = Subgroup.whole(A)
        for r in range(1, A.exponent + 1):
            if self.meet(whole.multiple(r)) != self.multiple(r):
                return False
        return True

    def isomorphism_type(self) -> AbelianPGroup:
        A = self.ambient
        sizes = [self.order]
        r = 1
        while sizes[-1] > 1:
            sizes.append(self.multiple(r).order)
            r += 1
        exps = []
        for r in range(len(sizes) - 1):
            count = log_p(sizes[r] // sizes[r + 1], A.p)
            if r + 1 < len(sizes) - 1:
                count -= log_p(sizes[r + 1] // sizes[r + 2], A.p)
            exps += [r + 1] * count
        return AbelianPGroup(A.p, tuple(exps))

    def to_json(self) -> list[list[int]]:
        return [list(g) for g in self.generators()]

    def __str__(self) -> str:
        gens = self.generators()
        if not gens:
            return "0"
        return "<" + ", ".join("(" + ",".join(map(str, g)) + ")" for g in gens) + ">"


def subgroups_by_layers(
    A: AbelianPGroup,
    start: Subgroup | None = None,
    max_order: int | None = None,
    avoid: Subgroup | None = None,
) -> Iterator[list[Subgroup]]:
    """Yield the subgroups containing ``start`` layer by layer (order |start|*p^t).

    With ``avoid`` only subgroups meeting it trivially are produced; the
    layered search stays complete because such subgroups are closed under
    taking subgroups.
    """
    layer = [start or Subgroup.trivial(A)]
    while layer:
        layer.sort(key=lambda s: s.basis)
        yield layer
        if max_order is not None and layer[0].order * A.p > max_order:
            return
        nxt: dict[tuple, Subgroup] = {}
        for S in layer:
            for a in A.elements():
                if a in S or A.scale(A.p, a) not in S:
                    continue
                T = Subgroup.generated(A, S.generators() + [a])
                if T.basis in nxt:
                    continue
                if avoid is not None and any(b in avoid and any(b) for b in T.elements()):
                    continue
                nxt[T.basis] = T
        layer = list(nxt.values())


def all_subgroups(A: AbelianPGroup, max_order: int | None = None) -> list[Subgroup]:
    out = []
    for layer in subgroups_by_layers(A, max_order=max_order):
        out += [S for S in layer if max_order is None or S.order <= max_order]
    return out


def _hyperplane_characters(A: AbelianPGroup) -> list[tuple[int, ...]]:
    """Normalised nonzero vectors u in F_p^j (first nonzero entry 1)."""
    p, j = A.p, A.rank
    out = []
    for u in itertools.product(range(p), repeat=j):
        nz = next((x for x in u if x), 0)
        if nz == 1:
            out.append(u)
    return out


def _hyperplane_kernel(A: AbelianPGroup, u: Sequence[int]) -> Subgroup:
    p = A.p
    t = next(i for i, x in enumerate(u) if x)
    inv = pow(u[t], -1, p)
    gens = [A.scale(p, g) for g in A.generators()]
    for i in range(A.rank):
        if i == t:
            continue
        v = [0] * A.rank
        v[i] = 1
        v[t] = (-u[i] * inv) % p
        gens.append(A.element(v))
    return Subgroup.generated(A, gens)


def character_of_order_p(A: AbelianPGroup, u: Sequence[int], scalar: int = 1) -> Element:
    """The character a -> scalar * (u . a mod p) / p as a residue tuple."""
    return A.element((scalar * x * (m // A.p)) for x, m in zip(u, A.moduli))


@lru_cache(maxsize=None)
def maximal_subgroups(A: AbelianPGroup, containing: Subgroup | None = None) -> tuple[Subgroup, ...]:
    """Index-p subgroups of A containing the given subgroup, in canonical order.

    They are the kernels of order-p characters vanishing on ``containing``,
    one per hyperplane of A/(pA + containing).
    """
    gens = containing.generators() if containing is not None else []
    out = []
    for u in _hyperplane_characters(A):
        if all(sum(x * g for x, g in zip(u, b)) % A.p == 0 for b in gens):
            out.append(_hyperplane_kernel(A, u))
    return tuple(sorted(out, key=lambda s: s.basis))


def character_with_kernel(H: Subgroup) -> Element:
    """Lexicographically least character of the ambient group with kernel exactly H."""
    A = H.ambient
    if H.index != A.p:
        raise ValueError("H is not a maximal subgroup")
    gens = H.generators()
    for u in _hyperplane_characters(A):
        if all(sum(x * g for x, g in zip(u, b)) % A.p == 0 for b in gens):
            return min(character_of_order_p(A, u, s) for s in range(1, A.p))
    raise AssertionError("no character found for a maximal subgroup")


def character_kernel(A: AbelianPGroup, c: Element) -> Subgroup:
    return Subgroup.generated(A, [a for a in A.elements() if A.pairing(c, a) == 0])


def annihilator(A: AbelianPGroup, S: Subgroup) -> Subgroup:
    """{a in A : <c, a> = 0 for all c in S}, with S viewed inside A* = A."""
    gens = S.generators()
    return Subgroup.generated(A, [a for a in A.elements() if all(A.pairing(c, a) == 0 for c in gens)])


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism given by the images of the domain's standard generators."""

    domain: AbelianPGroup
    codomain: AbelianPGroup
    images: tuple[Element, ...]

    def __post_init__(self):
        imgs = tuple(self.codomain.element(x) for x in self.images)
        if len(imgs) != self.domain.rank:
            raise ValueError("one image per domain generator required")
        for m, y in zip(self.domain.moduli, imgs):
            if any(self.codomain.scale(m, y)):
                raise ValueError(f"image {y} does not have order dividing {m}")
        object.__setattr__(self, "images", imgs)

    def __call__(self, a: Sequence[int]) -> Element:
        C = self.codomain
        out = C.zero
        for c, y in zip(a, self.images):
            if c:
                out = C.add(out, C.scale(c, y))
        return out

    def image(self) -> Subgroup:
        return Subgroup.generated(self.codomain, self.images)

    def kernel(self) -> Subgroup:
        return Subgroup.generated(self.domain, [a for a in self.domain.elements() if not any(self(a))])

    def is_surjective(self) -> bool:
        return self.image().order == self.codomain.order

    def compose(self, first: "Homomorphism") -> "Homomorphism":
        """self ∘ first."""
        if first.codomain != self.domain:
            raise ValueError("codomain/domain mismatch")
        return Homomorphism(first.domain, self.codomain, tuple(self(y) for y in first.images))

    def __str__(self) -> str:
        return "(" + "; ".join(",".join(map(str, y)) for y in self.images) + ")"


def lattice_domain(A: AbelianPGroup, h: int) -> AbelianPGroup:
    """Finite stand-in for Z_p^h: homs Z_p^h -> A factor through (Z/p^e)^h, e = exp(A)."""
    return AbelianPGroup(A.p, (max(A.exponent, 1),) * h)


def hom_set(A: AbelianPGroup, h: int) -> list[Homomorphism]:
    """All continuous homs Z_p^h -> A as h-tuples of elements, lexicographic order."""
    if h < 0:
        raise ValueError("h must be non-negative")
    D = lattice_domain(A, h)
    elems = list(A.elements())
    return [Homomorphism(D, A, imgs) for imgs in itertools.product(elems, repeat=h)]


def image_of_tuple(A: AbelianPGroup, elems: Sequence[Element]) -> Subgroup:
    return Subgroup.generated(A, elems)


@lru_cache(maxsize=None)
def quotient_group(A: AbelianPGroup, B: Subgroup) -> tuple[AbelianPGroup, Homomorphism]:
    """A/B with an explicit surjection q: A -> A/B."""
    if B.ambient != A:
        raise ValueError("B is not a subgroup of A")
    if A.rank == 0:
        return A, Homomorphism(A, A, ())
    diag, V = lattice.smith_with_transform(B.basis)
    keep = sorted((i for i, d in enumerate(diag) if d > 1), key=lambda i: -diag[i])
    Q = AbelianPGroup(A.p, tuple(log_p(diag[i], A.p) for i in keep))
    images = tuple(tuple(V[row][i] for i in keep) for row in range(A.rank))
    return Q, Homomorphism(A, Q, images)


def preimage(q: Homomorphism, H: Subgroup) -> Subgroup:
    return Subgroup.generated(q.domain, [a for a in q.domain.elements() if q(a) in H])


# ---------------------------------------------------------------------------
# families of subgroups


@dataclass(frozen=True)
class SubgroupFamily:
    """A family of proper subgroups, stored by its maximal members."""

    ambient: AbelianPGroup
    maximal_members: tuple[Subgroup, ...]

    @classmethod
    def from_subgroups(cls, A: AbelianPGroup, subs: Iterable[Subgroup]) -> "SubgroupFamily":
        subs = {s.basis: s for s in subs}.values()
        for s in subs:
            if s.order == A.order:
                raise ValueError("families consist of proper subgroups")
        maximal = [s for s in subs if not any(s < t for t in subs)]
        return cls(A, tuple(sorted(maximal, key=lambda s: s.basis)))

    @classmethod
    def all_proper(cls, A: AbelianPGroup) -> "SubgroupFamily":
        return cls(A, maximal_subgroups(A))

    def __contains__(self, H: Subgroup) -> bool:
        return any(H <= M for M in self.maximal_members)

    def __len__(self) -> int:
        return len(self.maximal_members)

    @property
    def is_empty(self) -> bool:
        return not self.maximal_members


def family_of(f: Homomorphism) -> SubgroupFamily:
    """The minimal family containing the proper subgroups through which f factors."""
    A = f.codomain
    return SubgroupFamily(A, maximal_subgroups(A, f.image()))


def family_pullback(q: Homomorphism, F: SubgroupFamily) -> SubgroupFamily:
    if not q.is_surjective():
        raise ValueError("family pullback needs a surjective map")
    if F.ambient != q.codomain:
        raise ValueError("family lives on a different group")
    return SubgroupFamily.from_subgroups(q.domain, (preimage(q, H) for H in F.maximal_members))


# ---------------------------------------------------------------------------
# direct sum decompositions


@lru_cache(maxsize=None)
def minimal_summand_split(A: AbelianPGroup, S: Subgroup) -> tuple[Subgroup, Subgroup]:
    """A = M + K with S ⊆ M and |M| minimal among summands containing S.

    Ties are broken by the lexicographically least Hermite basis, first for M
    and then for the complement K.
    """
    if S.ambient != A:
        raise ValueError("S is not a subgroup of A")
    M = None
    for layer in subgroups_by_layers(A, start=S):
        pure = [T for T in layer if T.is_pure()]
        if pure:
            M = min(pure, key=lambda s: s.basis)
            break
    assert M is not None  # A itself is pure
    if M.order == A.order:
        return M, Subgroup.trivial(A)
    if M.order == 1:
        return M, Subgroup.whole(A)
    target = A.order // M.order
    K = None
    for layer in subgroups_by_layers(A, max_order=target, avoid=M):
        if layer[0].order == target:
            K = min(layer, key=lambda s: s.basis)
    if K is None:
        raise AssertionError("pure subgroup without complement")
    return M, K


def split_coordinates(A: AbelianPGroup, M: Subgroup, K: Subgroup) -> dict[Element, tuple[Element, Element]]:
    """a -> (m, k) with a = m + k for a decomposition A = M + K."""
    table = {}
    for m in M.elements():
        for k in K.elements():
            table[A.add(m, k)] = (m, k)
    if len(table) != A.order:
        raise ValueError("M and K do not form a direct sum decomposition")
    return table


# ---------------------------------------------------------------------------
# maps into (Q_p/Z_p)^m


def qz_pair(x: Fraction, p: int) -> tuple[int, int]:
    """(a, e) with x = a / p^e, a reduced."""
    return x.numerator, log_p(x.denominator, p)


def _unit_interval(x) -> Fraction:
    """x mod 1 as a Fraction, skipping the work when x is already reduced."""
    if type(x) is Fraction and 0 <= x < 1:
        return x
    return Fraction(x) % 1


@dataclass(frozen=True)
class QZHom:
    """A homomorphism ``source -> (Q_p/Z_p)^target_rank`` by generator images."""

    source: AbelianPGroup
    target_rank: int
    images: tuple[QZVector, ...]

    def __post_init__(self):
        imgs = tuple(tuple(_unit_interval(x) for x in v) for v in self.images)
        if len(imgs) != self.source.rank or any(len(v) != self.target_rank for v in imgs):
            raise ValueError("image shape mismatch")
        for m, v in zip(self.source.moduli, imgs):
            if any(m % x.denominator for x in v):
                raise ValueError("image order does not divide generator order")
        object.__setattr__(self, "images", imgs)

    def __call__(self, a: Sequence[int]) -> QZVector:
        out = [Fraction(0)] * self.target_rank
        for c, v in zip(a, self.images):
            if c:
                out = [(x + c * y) % 1 for x, y in zip(out, v)]
        return tuple(out)

    def socle_vectors(self) -> list[tuple[int, ...]]:
        """Images of the order-p generators p^{k_i-1} e_i, as vectors in F_p^m."""
        p = self.source.p
        return [tuple(int(x * m) % p for x in v) for m, v in zip(self.source.moduli, self.images)]

    def is_injective(self) -> bool:
        vecs = self.socle_vectors()
        return lattice.rank_fp(vecs, self.target_rank, self.source.p) == len(vecs)

    def kernel(self) -> Subgroup:
        A = self.source
        return Subgroup.generated(A, [a for a in A.elements() if not any(self(a))])

    def project(self, start: int, stop: int | None = None) -> "QZHom":
        stop = self.target_rank if stop is None else stop
        return QZHom(self.source, stop - start, tuple(v[start:stop] for v in self.images))

    def scaled(self, level: int) -> list[tuple[int, ...]]:
        """Images as vectors in (Z/p^level)^m via x -> x * p^level."""
        N = self.source.p**level
        out = []
        for v in self.images:
            row = []
            for x in v:
                y = x * N
                if y.denominator != 1:
                    raise ValueError("level too small for these images")
                row.append(int(y) % N)
            out.append(tuple(row))
        return out

    def to_json(self) -> list[list[list[int]]]:
        p = self.source.p
        return [[list(qz_pair(x, p)) for x in v] for v in self.images]


def dual_hom(f):
    """Pontryagin dual under the standard self-duality of A.

    For ``f: Z_p^h -> A`` (a :class:`Homomorphism`) returns ``f*: A* -> (Q_p/Z_p)^h``
    with ``f*(c) = (<c, f(e_1)>, ..., <c, f(e_h)>)``.  Given a :class:`QZHom`
    ``A* -> (Q_p/Z_p)^h`` it returns the corresponding ``Z_p^h -> A``, so that
    ``dual_hom(dual_hom(f)) == f``.
    """
    if isinstance(f, Homomorphism):
        A = f.codomain
        imgs = tuple(tuple(Fraction(y[i], m) for y in f.images) for i, m in enumerate(A.moduli))
        return QZHom(A, f.domain.rank, imgs)
    if isinstance(f, QZHom):
        A = f.source
        h = f.target_rank
        cols = []
        for j in range(h):
            cols.append(A.element(int(f.images[i][j] * m) for i, m in enumerate(A.moduli)))
        return Homomorphism(lattice_domain(A, h), A, tuple(cols))
    raise TypeError(f"cannot dualise {type(f).__name__}")


def hom_from_tuple(A: AbelianPGroup, elems: Sequence[Element]) -> Homomorphism:
    return Homomorphism(lattice_domain(A, len(elems)), A, tuple(elems))


# ---------------------------------------------------------------------------
# level structures on Q_p/Z_p^n + Q_p/Z_p^h (points only)


@dataclass
class LevelPointSet:
    group: AbelianPGroup
    n: int
    h: int
    constraint: Optional[QZHom]
    points: list[QZHom] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _candidate_images(A: AbelianPGroup, m: int) -> list[list[QZVector]]:
    """Per generator, every vector of (Q_p/Z_p)^m killed by the generator's order."""
    out = []
    for mod in A.moduli:
        out.append([tuple(Fraction(a, mod) for a in t) for t in itertools.product(range(mod), repeat=m)])
    return out


def level_points(A: AbelianPGroup, n: int, h: int, constraint: QZHom | None = None) -> LevelPointSet:
    """All injective homs A -> (Q_p/Z_p)^{n+h}, optionally with fixed last-h part.

    This is a straightforward enumeration of every hom followed by an
    injectivity test; :func:`level_count` is the fast counter.
    """
    if n < 0 or h < 0:
        raise ValueError("n and h must be non-negative")
    if constraint is not None and (constraint.source != A or constraint.target_rank != h):
        raise ValueError("constraint must be a hom A -> (Q_p/Z_p)^h")
    out = LevelPointSet(A, n, h, constraint)
    if constraint is None:
        per_gen = _candidate_images(A, n + h)
    else:
        per_gen = [[g + tail for g in cands] for cands, tail in zip(_candidate_images(A, n), constraint.images)]
    for imgs in itertools.product(*per_gen):
        l = QZHom(A, n + h, tuple(imgs))
        if l.is_injective():
            out.points.append(l)
    return out


def _independent_mod_p(vecs: Sequence[Sequence[int]], p: int) -> bool:
    rows = [list(v) for v in vecs]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c] * inv
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
    return r == len(rows)


def level_count(A: AbelianPGroup, n: int, h: int, constraint: QZHom | None = None) -> int:
    """Number of points of :func:`level_points` without materialising them.

    Injectivity only depends on each generator image modulo its p-multiples, so
    the count is ``prod_i p^{(k_i - 1) n}`` times the number of residue patterns
    giving independent socle vectors.
    """
    m = n + h
    p = A.p
    if A.rank > m:
        return 0
    if constraint is None:
        weight = prod(p ** ((k - 1) * m) for k in A.exponents)
        pats = itertools.product(itertools.product(range(p), repeat=m), repeat=A.rank)
        return weight * sum(_independent_mod_p(pat, p) for pat in pats)
    tails = constraint.socle_vectors()
    weight = prod(p ** ((k - 1) * n) for k in A.exponents)
    total = 0
    for heads in itertools.product(itertools.product(range(p), repeat=n), repeat=A.rank):
        total += _independent_mod_p([hd + tl for hd, tl in zip(heads, tails)], p)
    return weight * total


def injection_count(A: AbelianPGroup, m: int) -> int:
    """|injective homs A -> (Q_p/Z_p)^m| by brute-force enumeration."""
    return len(level_points(A, m, 0))


# ---------------------------------------------------------------------------
# subgroup points and the image map


def torsion_ambient(p: int, m: int, k: int) -> AbelianPGroup:
    """((Q_p/Z_p)^m)[p^k] as (Z/p^k)^m."""
    return AbelianPGroup(p, (k,) * m if k > 0 else ())


def project_subgroup(S: Subgroup, start: int, stop: int) -> Subgroup:
    A = S.ambient
    target = AbelianPGroup(A.p, A.exponents[start:stop])
    return Subgroup.generated(target, [g[start:stop] for g in S.generators()])


@dataclass
class SubPointSet:
    n: int
    h: int
    k: int
    required_image: Subgroup
    points: list[Subgroup] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, S: Subgroup) -> bool:
        return is_sub_point(S, self.n, self.h, self.k, self.required_image)


def is_sub_point(S: Subgroup, n: int, h: int, k: int, required_image: Subgroup) -> bool:
    p = required_image.ambient.p
    if S.ambient != torsion_ambient(p, n + h, k) or S.order != p**k:
        return False
    return project_subgroup(S, n, n + h) == required_image


def sub_points(n: int, h: int, k: int, required_image: Subgroup, budget: int = 1 << 16) -> SubPointSet:
    """Order-p^k subgroups of ((Q_p/Z_p)^{n+h})[p^k] projecting onto required_image."""
    p = required_image.ambient.p
    if required_image.ambient != torsion_ambient(p, h, k):
        raise ValueError("required image must live in ((Q_p/Z_p)^h)[p^k]")
    if required_image.order > p**k:
        raise ValueError("required image is larger than p^k")
    T = torsion_ambient(p, n + h, k)
    if T.order > budget:
        raise BudgetExceeded(T.order, budget)
    out = SubPointSet(n, h, k, required_image)
    for layer in subgroups_by_layers(T, max_order=p**k):
        for S in layer:
            if S.order == p**k and project_subgroup(S, n, n + h) == required_image:
                out.points.append(S)
    return out


def image_subgroup(l: QZHom) -> Subgroup:
    """im(l) inside ((Q_p/Z_p)^m)[p^k] with p^k = |source|."""
    if not l.is_injective():
        raise ValueError("image_subgroup needs an injective map")
    A = l.source
    k = log_p(A.order, A.p)
    T = torsion_ambient(A.p, l.target_rank, k)
    return Subgroup.generated(T, l.scaled(k))


def qz_subgroup(g: QZHom, k: int) -> Subgroup:
    """im(g) inside ((Q_p/Z_p)^m)[p^k]."""
    T = torsion_ambient(g.source.p, g.target_rank, k)
    return Subgroup.generated(T, g.scaled(k))


# ---------------------------------------------------------------------------
# monotypicity


@dataclass
class MonotypicityWitness:
    holds: bool
    cosets: list[list[Element]]
    isomorphisms: list[Element]  # translation b - a taking the first coset to each coset


def monotypicity_check(f: Homomorphism) -> MonotypicityWitness:
    """Decompose A, acted on by Z_p^h through f by translation, into orbits.

    The orbits are the cosets of im f; translation by b - a is an isomorphism
    of Z_p^h-sets between the cosets of a and b.  Every claim is verified on
    the generators of Z_p^h.
    """
    A = f.codomain
    B = f.image()
    seen: set[Element] = set()
    cosets = []
    for a in A.elements():
        if a in seen:
            continue
        coset = sorted(A.add(a, b) for b in B.elements())
        seen.update(coset)
        cosets.append(coset)
    holds = True
    for coset in cosets:
        cset = set(coset)
        for t in f.images:  # orbit = coset: closed and transitive under the action
            holds &= all(A.add(x, t) in cset for x in coset)
        holds &= len(coset) == B.order
    base = cosets[0]
    shifts = []
    for coset in cosets:
        d = A.sub(coset[0], base[0])
        shifts.append(d)
        moved = {A.add(x, d) for x in base}
        holds &= moved == set(coset)
        for t in f.images:
            holds &= all(A.add(A.add(x, t), d) == A.add(A.add(x, d), t) for x in base)
    return MonotypicityWitness(holds, cosets, shifts)


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} items, budget is {budget}")
