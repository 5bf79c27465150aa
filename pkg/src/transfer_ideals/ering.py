"""Finite free models of E^0(BA) and their transfer ideals.

For ``A = Z/p^k1 + ... + Z/p^kj`` the ring is

    coeff[x_1, ..., x_j] / ([p^k1](x_1), ..., [p^kj](x_j))

with basis the monomials x^a, 0 <= a_i < p^{k_i n}, listed lexicographically
(x_1 most significant).  Two coefficient modes exist:

* ``integer`` -- height 1, the multiplicative law over Z (p-saturation is the
  only thing that distinguishes Z from Z_p for the lattices we build);
* ``fiber``   -- height n special fibre, the Honda law over F_p, where
  [p^k](x) = x^{p^{kn}}.

Elements are row vectors; ``mult_rows(g)`` is the matrix whose m-th row is
x^m * g, so ideals are row lattices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb, prod
from typing import Iterable, Optional, Sequence

from . import fgl as fgl_mod
from . import lattice
from .groups import (
    AbelianPGroup,
    Element,
    Homomorphism,
    Subgroup,
    SubgroupFamily,
    character_with_kernel,
    maximal_subgroups,
)

INTEGER = "integer"
FIBER = "fiber"


class ModeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RingElement:
    algebra: "EAlgebra"
    coeffs: tuple[int, ...]

    def __add__(self, other: "RingElement") -> "RingElement":
        return self.algebra.add(self, other)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self.algebra.add(self, other.scale(-1))

    def __mul__(self, other) -> "RingElement":
        if isinstance(other, int):
            return self.scale(other)
        return self.algebra.mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "RingElement":
        return self.algebra.power(self, e)

    def scale(self, c: int) -> "RingElement":
        return self.algebra.element([c * x for x in self.coeffs])

    def __eq__(self, other) -> bool:
        return isinstance(other, RingElement) and self.algebra is other.algebra and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self) -> str:
        return self.algebra.format(self)


class EAlgebra:
    """The monomial-basis model of E^0(BA) in one coefficient mode."""

    def __init__(self, group: AbelianPGroup, law: fgl_mod.FglSpec, mode: str | None = None):
        expected = INTEGER if law.variant == fgl_mod.MULTIPLICATIVE else FIBER
        if mode is None:
            mode = expected
        if mode != expected:
            raise ModeError(f"mode {mode!r} is incompatible with the {law.variant} law")
        if law.p != group.p:
            raise ModeError("law and group have different primes")
        self.group = group
        self.fgl = law
        self.mode = mode
        self.p = group.p
        self.n = law.n
        self.modulus = None if mode == INTEGER else self.p
        self.dims = tuple(self.p ** (k * self.n) for k in group.exponents)
        self.size = prod(self.dims)
        self.strides = tuple(prod(self.dims[i + 1 :]) for i in range(len(self.dims)))
        # monic relation for each variable: coefficients of [p^k](x), low degree first
        self.relations = [fgl_mod.p_series(law, k).to_list() for k in group.exponents]
        self._mult_cache: dict[tuple[int, ...], list[tuple[int, ...]]] = {}

    def __repr__(self) -> str:
        return f"EAlgebra({self.group}, {self.mode}, n={self.n})"

    # -- basis ---------------------------------------------------------------

    def exponent_of(self, index: int) -> tuple[int, ...]:
        return tuple((index // s) % d for s, d in zip(self.strides, self.dims))

    def index_of(self, exps: Sequence[int]) -> int:
        return sum(a * s for a, s in zip(exps, self.strides))

    def element(self, coeffs: Iterable[int]) -> RingElement:
        c = tuple(coeffs)
        if len(c) != self.size:
            raise ValueError("wrong number of coefficients")
        if self.modulus is not None:
            c = tuple(x % self.modulus for x in c)
        return RingElement(self, c)

    def zero(self) -> RingElement:
        return RingElement(self, (0,) * self.size)

    def one(self) -> RingElement:
        return self.monomial([0] * self.group.rank)

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> RingElement:
        v = [0] * self.size
        v[self.index_of(exps)] = coeff
        return self.element(v)

    def gen(self, i: int) -> RingElement:
        """The coordinate x_i, Euler class of the i-th standard character."""
        e = [0] * self.group.rank
        e[i] = 1
        if self.dims[i] == 1:  # cannot happen for a nontrivial factor
            return self.zero()
        return self.monomial(e)

    def constant(self, c: int) -> RingElement:
        return self.one().scale(c)

    def format(self, u: RingElement) -> str:
        names = [f"x{i}" for i in range(self.group.rank)] if self.group.rank > 1 else ["x"]
        if self.group.rank == 2:
            names = ["x", "y"]
        s = fgl_mod.Series(
            self.group.rank, {self.exponent_of(i): c for i, c in enumerate(u.coeffs) if c}, self.modulus
        )
        return s.format(names) if self.group.rank else str(u.coeffs[0])

    # -- arithmetic ----------------------------------------------------------

    def add(self, u: RingElement, v: RingElement) -> RingElement:
        return self.element(a + b for a, b in zip(u.coeffs, v.coeffs))

    def times_gen(self, v: Sequence[int], i: int) -> list[int]:
        """x_i * v as a coefficient vector."""
        d, s = self.dims[i], self.strides[i]
        rel = self.relations[i]
        out = [0] * self.size
        for t, c in enumerate(v):
            if not c:
                continue
            a = (t // s) % d
            if a + 1 < d:
                out[t + s] += c
            else:
                base = t - a * s
                for deg, w in enumerate(rel[:-1]):
                    if w:
                        out[base + deg * s] -= w * c
        if self.modulus is not None:
            out = [x % self.modulus for x in out]
        return out

    def mult_rows(self, g: RingElement) -> list[tuple[int, ...]]:
        """Rows x^m * g for every basis monomial m, in basis order."""
        cached = self._mult_cache.get(g.coeffs)
        if cached is not None:
            return cached
        rows: list[list[int]] = [list(g.coeffs)]
        for t in range(1, self.size):
            exps = self.exponent_of(t)
            i = max(k for k, a in enumerate(exps) if a)
            rows.append(self.times_gen(rows[t - self.strides[i]], i))
        out = [tuple(r) for r in rows]
        if len(self._mult_cache) < 4096:
            self._mult_cache[g.coeffs] = out
        return out

    def mul(self, u: RingElement, v: RingElement) -> RingElement:
        acc = [0] * self.size
        rows = self.mult_rows(v)
        for c, row in zip(u.coeffs, rows):
            if c:
                for k, x in enumerate(row):
                    if x:
                        acc[k] += c * x
        return self.element(acc)

    def power(self, u: RingElement, e: int) -> RingElement:
        result, base = self.one(), u
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def evaluate(self, poly: Sequence[int], u: RingElement) -> RingElement:
        """poly(u) for a univariate polynomial given low degree first."""
        acc = self.zero()
        for c in reversed(list(poly)):
            acc = self.mul(acc, u) + self.constant(c)
        return acc

    def from_univariate(self, i: int, poly: Sequence[int]) -> RingElement:
        """Embed a polynomial in x_i, reducing it modulo [p^k](x_i)."""
        d, rel = self.dims[i], self.relations[i]
        coeffs = list(poly)
        if len(coeffs) > d:
            _, coeffs = fgl_mod.poly_divmod(coeffs, rel, self.modulus)
        v = [0] * self.size
        for deg, c in enumerate(coeffs):
            if c:
                e = [0] * self.group.rank
                e[i] = deg
                v[self.index_of(e)] += c
        return self.element(v)

    def to_series(self, u: RingElement) -> fgl_mod.Series:
        return fgl_mod.Series(
            self.group.rank, {self.exponent_of(i): c for i, c in enumerate(u.coeffs) if c}, self.modulus
        )

    def from_series(self, s: fgl_mod.Series) -> RingElement:
        v = [0] * self.size
        for e, c in s.coeffs.items():
            if any(a >= d for a, d in zip(e, self.dims)):
                raise ValueError("series not reduced against the nilpotency bounds")
            v[self.index_of(e)] += c
        return self.element(v)

    def formal_add(self, u: RingElement, v: RingElement) -> RingElement:
        if u.coeffs[0] or v.coeffs[0]:
            raise ValueError("formal sum needs zero constant terms")
        if self.mode == INTEGER:
            return u + v + self.mul(u, v)
        s = fgl_mod.formal_sum(self.fgl, self.to_series(u), self.to_series(v), bounds=self.dims)
        return self.from_series(s)


def fiber_truncation(group: AbelianPGroup, p: int, n: int) -> int:
    """Law degree needed so that formal sums in the fibre model are exact."""
    return max(2, sum(p ** (k * n) - 1 for k in group.exponents))


def build_ealgebra(A: AbelianPGroup, mode: str = INTEGER, n: int = 1, law: fgl_mod.FglSpec | None = None) -> EAlgebra:
    """E^0(BA) model: mode ``integer`` (height 1, exact) or ``fiber`` (height n mod p)."""
    if mode == INTEGER:
        if n != 1:
            raise ModeError("integer mode is height 1 only")
        law = law or fgl_mod.multiplicative(A.p)
    elif mode == FIBER:
        law = law or fgl_mod.honda_law(A.p, n, fiber_truncation(A, A.p, n))
    else:
        raise ModeError(f"unknown mode {mode!r}")
    return EAlgebra(A, law, mode)


# ---------------------------------------------------------------------------
# Euler classes and transfers


def _multiple_univariate(R: EAlgebra, i: int, m: int) -> list[int]:
    """[m](x_i) as a reduced polynomial in x_i."""
    d = R.dims[i]
    m %= R.p ** R.group.exponents[i]
    if m == 0:
        return [0]
    if R.mode == INTEGER:
        # (1+x)^m - 1, then reduce modulo (1+x)^{p^k} - 1
        poly = [comb(m, t) for t in range(m + 1)]
        poly[0] -= 1
        if len(poly) > d:
            _, poly = fgl_mod.poly_divmod(poly, R.relations[i])
        return poly
    x = fgl_mod.Series.var(0, 1, R.p)
    acc = x
    for _ in range(m - 1):
        acc = fgl_mod.formal_sum(R.fgl, acc, x, bounds=(d,))
    return acc.to_list()


def euler_class(R: EAlgebra, chi: Sequence[int]) -> RingElement:
    """e(chi) = [c_1](x_1) +_F ... +_F [c_j](x_j) for chi = (c_1, ..., c_j)."""
    A = R.group
    chi = A.element(chi)
    if R.mode == INTEGER:
        # 1 + e(chi) = prod_i (1 + x_i)^{c_i}, a tensor product of univariate factors
        vec = [1]
        for i, c in enumerate(chi):
            poly = _multiple_univariate(R, i, c)
            poly = list(poly) + [0] * (R.dims[i] - len(poly))
            poly[0] += 1
            vec = [a * b for a in vec for b in poly]
        vec[0] -= 1
        return R.element(vec)
    acc = R.zero()
    for i, c in enumerate(chi):
        if c:
            acc = R.formal_add(acc, R.from_univariate(i, _multiple_univariate(R, i, c)))
    return acc


def angle_p(R: EAlgebra) -> list[int]:
    """Coefficients of <p>(x) = [p](x)/x."""
    return fgl_mod.angle_series(R.fgl, 1).to_list()


def transfer_unit(R: EAlgebra, H: Subgroup, chi: Element | None = None) -> RingElement:
    """Tr_{H,A}(1) = <p>(e(chi_H)) for a maximal subgroup H.

    chi_H defaults to the lexicographically least character with kernel H;
    another choice changes the result by a unit.
    """
    if H.ambient != R.group:
        raise ValueError("H is not a subgroup of the algebra's group")
    if H.index != R.p:
        raise ValueError("transfer_unit needs a maximal (index p) subgroup")
    chi = character_with_kernel(H) if chi is None else chi
    e = euler_class(R, chi)
    if R.mode == FIBER:
        return R.power(e, R.p**R.n - 1)
    return R.evaluate(angle_p(R), e)


class IdealLattice:
    """An ideal of R given by generators, as the row lattice of all x^m * g."""

    def __init__(self, algebra: EAlgebra, generators: Sequence[RingElement]):
        self.algebra = algebra
        self.generators = tuple(generators)

    @classmethod
    def zero(cls, R: EAlgebra) -> "IdealLattice":
        return cls(R, ())

    @cached_property
    def rows(self) -> list[tuple[int, ...]]:
        out = []
        for g in self.generators:
            out += [r for r in self.algebra.mult_rows(g) if any(r)]
        return out

    @cached_property
    def rank(self) -> int:
        R = self.algebra
        if R.mode == INTEGER:
            return lattice.rank_q(self.rows, R.size)
        return lattice.rank_fp(self.rows, R.size, R.p)

    @cached_property
    def basis(self) -> tuple[tuple[int, ...], ...]:
        """Canonical basis: Hermite form over Z, reduced echelon form over F_p."""
        R = self.algebra
        if R.mode == INTEGER:
            basis: tuple = ()
            for g in self.generators:  # incremental keeps the stacked matrices small
                rows = [r for r in R.mult_rows(g) if any(r)]
                basis = lattice.hermite_basis(list(basis) + rows, R.size)
            return basis
        return lattice.rref_basis(self.rows, R.size, R.p)

    def contains(self, u: RingElement) -> bool:
        R = self.algebra
        if u.is_zero():
            return True
        if R.mode == INTEGER:
            return lattice.contains_row(self.basis, u.coeffs, R.size)
        return lattice.rank_fp(list(self.basis) + [u.coeffs], R.size, R.p) == len(self.basis)

    def __le__(self, other: "IdealLattice") -> bool:
        return all(other.contains(self.algebra.element(r)) for r in self.basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IdealLattice):
            return NotImplemented
        return self.algebra is other.algebra and self.basis == other.basis

    def __hash__(self) -> int:
        return hash(self.basis)

    def __add__(self, other: "IdealLattice") -> "IdealLattice":
        return IdealLattice(self.algebra, self.generators + other.generators)

    def to_json(self) -> dict:
        R = self.algebra
        return {
            "generators": [R.format(g) for g in self.generators],
            "basis": [list(r) for r in self.basis],
        }


@dataclass
class QuotientModule:
    """R/I as a module over the coefficient ring."""

    algebra: EAlgebra
    ideal: IdealLattice
    size: int
    relation_rank: int
    invariant_factors: Optional[list[int]] = None  # p-primary torsion, ascending
    prime_to_p: Optional[list[int]] = None  # SNF entries with their p-part removed, when > 1

    @property
    def free_rank(self) -> int:
        """Rank of the torsion-free part (dimension over F_p in fibre mode)."""
        return self.size - self.relation_rank

    @property
    def dimension(self) -> int:
        return self.free_rank

    @property
    def torsion_order(self) -> int:
        return prod(self.invariant_factors or [])

    @property
    def order(self) -> int | None:
        """Cardinality when finite (integer mode, free rank 0)."""
        if self.algebra.mode != INTEGER or self.free_rank:
            return None
        return self.torsion_order

    @cached_property
    def saturation(self) -> tuple[tuple[int, ...], ...]:
        """p-saturation of the relations: R^tors = basis / saturation."""
        R = self.algebra
        if R.mode != INTEGER:
            return self.ideal.basis
        return lattice.p_saturate(self.ideal.basis, R.size, R.p)

    def to_json(self) -> dict:
        return {
            "basis_size": self.size,
            "relations": [list(r) for r in self.ideal.basis],
            "invariant_factors": self.invariant_factors,
            "rank": self.free_rank,
        }


def quotient(R: EAlgebra, I: IdealLattice, invariants: bool = True) -> QuotientModule:
    """Presentation of R/I.  ``invariants=False`` computes only the rank."""
    if I.algebra is not R:
        raise ValueError("ideal belongs to another algebra")
    q = QuotientModule(R, I, R.size, I.rank)
    if invariants and R.mode == INTEGER:
        diag = lattice.smith_diagonal(I.basis, R.size)
        q.invariant_factors = sorted(d for d in (lattice.p_part(x, R.p) for x in diag) if d > 1)
        q.prime_to_p = [r for r in (x // lattice.p_part(x, R.p) for x in diag) if r > 1]
    return q


def transfer_ideal(R: EAlgebra, F: SubgroupFamily) -> IdealLattice:
    """Ideal generated by Tr_{H,A}(1) over the maximal members H of the family."""
    if F.ambient != R.group:
        raise ValueError("family lives on another group")
    return IdealLattice(R, [transfer_unit(R, H) for H in F.maximal_members])


def ideal_from(R: EAlgebra, gens: Iterable[RingElement]) -> IdealLattice:
    return IdealLattice(R, list(gens))


# ---------------------------------------------------------------------------
# Euler sets and localisation


def order_p_multiple(A: AbelianPGroup, c: Element) -> Element:
    o = A.order_of(c)
    return A.scale(o // A.p, c)


def kernel_in_family(A: AbelianPGroup, c: Element, F: SubgroupFamily | None) -> bool:
    """Whether ker(chi_c) lies in the family (None means all proper subgroups).

    ker(chi) sits inside the index-p subgroup ker(psi) exactly when psi is a
    multiple of chi, i.e. psi spans the order-p subgroup of <chi>.
    """
    if not any(c):
        return False
    if F is None:
        return True
    psi = order_p_multiple(A, c)
    H = _kernel_of_order_p(A, psi)
    return any(H == M for M in F.maximal_members)


def _kernel_of_order_p(A: AbelianPGroup, psi: Element) -> Subgroup:
    u = [x // (m // A.p) % A.p for x, m in zip(psi, A.moduli)]
    for M in maximal_subgroups(A):
        if all(sum(a * g for a, g in zip(u, b)) % A.p == 0 for b in M.generators()):
            return M
    raise AssertionError("order-p character without kernel")


@dataclass
class EulerSet:
    algebra: EAlgebra
    characters: list[Element]
    elements: list[RingElement]

    def __len__(self) -> int:
        return len(self.characters)


def euler_set(R: EAlgebra, family: SubgroupFamily | None = None) -> EulerSet:
    """S_A (family None) or S_f: Euler classes of nontrivial characters with kernel in the family."""
    A = R.group
    chars = [c for c in A.elements() if kernel_in_family(A, c, family)]
    return EulerSet(R, chars, [euler_class(R, c) for c in chars])


@dataclass
class LocalizationImage:
    algebra: EAlgebra
    euler: EulerSet
    field: str
    dimension: int
    stable_power: int
    witnesses: list[tuple[str, str]] = field(default_factory=list)
    _power_rows: list = field(default_factory=list, repr=False)

    @cached_property
    def kernel_basis(self) -> tuple[tuple[int, ...], ...]:
        """K ∩ R: elements killed by a power of the product of the Euler set."""
        R = self.algebra
        if self.field == "Q":
            return lattice.left_kernel(self._power_rows, R.size)
        import flint

        m = flint.nmod_mat([list(r) for r in self._power_rows], R.p).transpose()
        null, nullity = m.nullspace()
        vecs = [[int(null[i, c]) for i in range(R.size)] for c in range(nullity)]
        return lattice.rref_basis(vecs, R.size, R.p)

    @property
    def image_rank(self) -> int:
        """Rank of T = image of R in the localisation."""
        return self.algebra.size - len(self.kernel_basis)


def localize(R: EAlgebra, S: EulerSet, field: str = "Q", ideal: IdealLattice | None = None) -> LocalizationImage:
    """S^{-1}(field ⊗ R) computed as (field ⊗ R)/ker(sigma^m), sigma = prod(S)."""
    if field not in ("Q", "Fp"):
        raise ValueError("field must be 'Q' or 'Fp'")
    if field == "Q" and R.mode != INTEGER:
        raise ModeError("rational localisation needs the integer model")
    sigma = R.one()
    for s in S.elements:
        sigma = R.mul(sigma, s)
    base = R.mult_rows(sigma)
    p = R.p if field == "Fp" else None

    def rank(rows):
        return lattice.rank_q(rows, R.size) if p is None else lattice.rank_fp(rows, R.size, p)

    power, r, m = base, rank(base), 1
    while True:
        nxt = lattice.matmul_rows(power, base)
        if p is not None:
            nxt = [tuple(x % p for x in row) for row in nxt]
        r2 = rank(nxt)
        if r2 == r:
            break
        power, r, m = nxt, r2, m + 1
    loc = LocalizationImage(R, S, field, r, m, _power_rows=power)
    if ideal is not None:
        loc.witnesses = annihilation_witnesses(R, ideal, S)
    return loc


def annihilation_witnesses(R: EAlgebra, ideal: IdealLattice, S: EulerSet) -> list[tuple[str, str]]:
    """For each ideal generator g, an Euler class s in S with s * g = 0 (or '' if none)."""
    out = []
    for g in ideal.generators:
        hit = next((s for s in S.elements if R.mul(s, g).is_zero()), None)
        out.append((R.format(g), R.format(hit) if hit is not None else ""))
    return out


# ---------------------------------------------------------------------------
# induced maps


@dataclass
class RingMap:
    """A coefficient-linear ring map, rows = images of the source basis."""

    source: EAlgebra
    target: EAlgebra
    rows: list[tuple[int, ...]]

    def __call__(self, u: RingElement) -> RingElement:
        acc = [0] * self.target.size
        for c, row in zip(u.coeffs, self.rows):
            if c:
                for k, x in enumerate(row):
                    acc[k] += c * x
        return self.target.element(acc)

    def then(self, other: "RingMap") -> "RingMap":
        """other ∘ self."""
        if other.source is not self.target:
            raise ValueError("maps do not compose")
        return RingMap(self.source, other.target, [other(self.target.element(r)).coeffs for r in self.rows])

    def maps_into(self, I: IdealLattice, J: IdealLattice) -> bool:
        return all(J.contains(self(g)) for g in I.generators)


def pulled_back_character(phi: Homomorphism, i: int) -> Element:
    """Coordinates of eps_i ∘ phi, eps_i the i-th standard character of the codomain."""
    A, B = phi.domain, phi.codomain
    out = []
    for l, m in enumerate(A.moduli):
        num = phi.images[l][i] * m
        if num % B.moduli[i]:
            raise AssertionError("ill-defined character pullback")
        out.append(num // B.moduli[i])
    return A.element(out)


def induced_map(target: EAlgebra, phi: Homomorphism, source: EAlgebra) -> RingMap:
    """phi^*: E^0(BA') -> E^0(BA) for phi: A -> A', x'_i -> e(eps_i ∘ phi)."""
    if phi.domain != target.group or phi.codomain != source.group:
        raise ValueError("phi does not match the algebras")
    gens = [euler_class(target, pulled_back_character(phi, i)) for i in range(source.group.rank)]
    rows: list[tuple[int, ...]] = [target.one().coeffs]
    for t in range(1, source.size):
        exps = source.exponent_of(t)
        i = max(k for k, a in enumerate(exps) if a)
        prev = target.element(rows[t - source.strides[i]])
        rows.append(target.mul(prev, gens[i]).coeffs)
    return RingMap(source, target, rows)


# ---------------------------------------------------------------------------
# height-one oracle: transfer = induction in the representation ring


@dataclass
class OracleIdeal:
    group: AbelianPGroup
    induced: dict[Element, int]  # Ind_H^A(1) as a combination of characters
    rows: list[tuple[int, ...]]  # the ideal in Z[A*], basis indexed by characters

    def mapped_basis(self, R: EAlgebra) -> tuple[tuple[int, ...], ...]:
        """Hermite basis of the image in R under chi -> 1 + e(chi)."""
        chars = list(self.group.elements())
        images = [euler_class(R, c) + R.one() for c in chars]
        conv = [img.coeffs for img in images]
        mapped = lattice.matmul_rows(self.rows, conv) if self.rows else []
        return lattice.hermite_basis(mapped, R.size)


def representation_oracle(A: AbelianPGroup, H: Subgroup, mode: str = INTEGER) -> OracleIdeal:
    """Ind_H^A(trivial) = sum of characters trivial on H, and the ideal it generates in Z[A*]."""
    if mode != INTEGER:
        raise ModeError("the representation oracle is a height-one construction")
    if H.ambient != A:
        raise ValueError("H is not a subgroup of A")
    chars = list(A.elements())
    index = {c: t for t, c in enumerate(chars)}
    hgens = H.generators()
    induced = {c: 1 for c in chars if all(A.pairing(c, h) == 0 for h in hgens)}
    rows = []
    for shift in chars:  # Ind * chi' for every character chi'
        v = [0] * len(chars)
        for c, k in induced.items():
            v[index[A.add(c, shift)]] += k
        rows.append(tuple(v))
    return OracleIdeal(A, induced, rows)
