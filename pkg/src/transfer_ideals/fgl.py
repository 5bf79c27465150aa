"""Formal group laws: the multiplicative law over Z and the Honda law mod p.

Series are sparse maps from exponent vectors to coefficients, either exact
(ints / Fractions, ``modulus=None``) or residues mod p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping, Sequence

Exponent = tuple[int, ...]

MULTIPLICATIVE = "multiplicative"
HONDA = "honda"


class IntegralityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Series:
    """A truncated multivariate power series (a polynomial in practice)."""

    nvars: int
    coeffs: Mapping[Exponent, object]
    modulus: int | None = None

    def __post_init__(self):
        clean = {}
        for e, c in self.coeffs.items():
            if self.modulus is not None:
                c = _mod(c, self.modulus)
            if c:
                clean[tuple(e)] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def var(cls, i: int, nvars: int, modulus: int | None = None) -> "Series":
        return cls(nvars, {tuple(int(t == i) for t in range(nvars)): 1}, modulus)

    @classmethod
    def const(cls, c, nvars: int, modulus: int | None = None) -> "Series":
        return cls(nvars, {(0,) * nvars: c}, modulus)

    @classmethod
    def univariate(cls, coeffs: Sequence, modulus: int | None = None) -> "Series":
        return cls(1, {(i,): c for i, c in enumerate(coeffs)}, modulus)

    def _same(self, other: "Series") -> None:
        if self.nvars != other.nvars or self.modulus != other.modulus:
            raise ValueError("incompatible series")

    def __add__(self, other: "Series") -> "Series":
        self._same(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return Series(self.nvars, out, self.modulus)

    def __neg__(self) -> "Series":
        return Series(self.nvars, {e: -c for e, c in self.coeffs.items()}, self.modulus)

    def __sub__(self, other: "Series") -> "Series":
        return self + (-other)

    def scale(self, c) -> "Series":
        return Series(self.nvars, {e: c * v for e, v in self.coeffs.items()}, self.modulus)

    def mul(self, other: "Series", degree: int | None = None, bounds: Sequence[int] | None = None) -> "Series":
        """Product truncated at total ``degree`` and/or killing x_i^{bounds[i]}."""
        self._same(other)
        out: dict[Exponent, object] = {}
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in other.coeffs.items():
                if degree is not None and d1 + sum(e2) > degree:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                if bounds is not None and any(x >= b for x, b in zip(e, bounds)):
                    continue
                out[e] = out.get(e, 0) + c1 * c2
        return Series(self.nvars, out, self.modulus)

    def __mul__(self, other: "Series") -> "Series":
        return self.mul(other)

    def truncate(self, degree: int) -> "Series":
        return Series(self.nvars, {e: c for e, c in self.coeffs.items() if sum(e) <= degree}, self.modulus)

    def reduce(self, p: int) -> "Series":
        """Reduction mod p of a p-integral series."""
        out = {}
        for e, c in self.coeffs.items():
            c = Fraction(c)
            if c.denominator % p == 0:
                raise IntegralityError(f"coefficient {c} of {e} is not {p}-integral")
            out[e] = c.numerator * pow(c.denominator, -1, p)
        return Series(self.nvars, out, p)

    def coefficient(self, e: Sequence[int]):
        return self.coeffs.get(tuple(e), 0)

    def constant_term(self):
        return self.coeffs.get((0,) * self.nvars, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=-1)

    def low_degree(self) -> int:
        return min((sum(e) for e in self.coeffs), default=-1)

    def to_list(self) -> list:
        """Dense coefficient list of a univariate series."""
        if self.nvars != 1:
            raise ValueError("univariate only")
        d = self.degree()
        return [self.coeffs.get((i,), 0) for i in range(d + 1)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.nvars == other.nvars and self.modulus == other.modulus and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.nvars, self.modulus, frozenset(self.coeffs.items())))

    def terms(self) -> list[tuple[Exponent, object]]:
        """Terms in graded lexicographic order, highest first."""
        return sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or (["x"] if self.nvars == 1 else [f"x{i}" for i in range(self.nvars)])
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in self.terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self) -> str:
        return self.format()


def _mod(c, p: int) -> int:
    if isinstance(c, Fraction):
        if c.denominator % p == 0:
            raise IntegralityError(f"{c} is not {p}-integral")
        return c.numerator * pow(c.denominator, -1, p) % p
    return c % p


# ---------------------------------------------------------------------------
# formal group laws


@dataclass(frozen=True)
class FglSpec:
    """A formal group law at one of the two computable specialisations.

    ``coefficients`` maps (i, j) to the coefficient of x^i y^j; for the
    multiplicative law it is {(1,0): 1, (0,1): 1, (1,1): 1} over Z, for the
    Honda law it is the reduction mod p to total degree ``truncation``.
    """

    variant: str
    p: int
    n: int = 1
    truncation: int | None = None
    coefficients: Mapping[tuple[int, int], int] = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def modulus(self) -> int | None:
        return self.p if self.variant == HONDA else None

    @property
    def height(self) -> int:
        return self.n

    def describe(self) -> str:
        if self.variant == MULTIPLICATIVE:
            return f"multiplicative x+y+xy over Z_{self.p} (coordinate x = L - 1)"
        return f"Honda height {self.n} over F_{self.p}, log = sum x^(p^(n i))/p^i, truncated at degree {self.truncation}"


def multiplicative(p: int) -> FglSpec:
    return FglSpec(MULTIPLICATIVE, p, 1, None, {(1, 0): 1, (0, 1): 1, (1, 1): 1})


def honda_logarithm(p: int, n: int, degree: int) -> list[Fraction]:
    """Coefficients of log(x) = sum_i x^{p^{n i}} / p^i up to ``degree``."""
    out = [Fraction(0)] * (degree + 1)
    i = 0
    while p ** (n * i) <= degree:
        out[p ** (n * i)] = Fraction(1, p**i)
        i += 1
    return out


def _univ_mul(a: list, b: list, degree: int) -> list:
    out = [Fraction(0)] * (degree + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b[: degree + 1 - i]):
            if y:
                out[i + j] += x * y
    return out


def _univ_pow(a: list, e: int, degree: int) -> list:
    result = [Fraction(1)] + [Fraction(0)] * degree
    while e:
        if e & 1:
            result = _univ_mul(result, a, degree)
        e >>= 1
        if e:
            a = _univ_mul(a, a, degree)
    return result


def compositional_inverse(f: list, degree: int) -> list:
    """g with f(g(y)) = y to ``degree``, for f = y + O(y^2).

    Fixed point iteration g <- y - (f(g) - g); each pass fixes at least one
    more coefficient, and sparse f (a logarithm) keeps each pass cheap.
    """
    if len(f) < 2 or f[0] != 0 or f[1] != 1:
        raise ValueError("series must start y + ...")
    support = [k for k in range(2, min(len(f), degree + 1)) if f[k]]
    g = [Fraction(0), Fraction(1)] + [Fraction(0)] * (degree - 1)
    for _ in range(degree):
        new = [Fraction(0)] * (degree + 1)
        new[1] = Fraction(1)
        for k in support:
            for t, c in enumerate(_univ_pow(g, k, degree)):
                new[t] -= f[k] * c
        if new == g:
            break
        g = new
    return g


@lru_cache(maxsize=None)
def honda_law(p: int, n: int, degree: int) -> FglSpec:
    """Honda formal group law of height n over F_p, to total degree ``degree``.

    F(x, y) = exp(log x + log y) with exact rational arithmetic, checked for
    p-integrality and reduced mod p.
    """
    if degree < 2:
        raise ValueError("truncation degree must be at least 2")
    log = honda_logarithm(p, n, degree)
    exp = compositional_inverse(log, degree)
    # u = log x + log y is very sparse, so build exp(u) = sum_m e_m u^m directly
    u = {}
    for d, c in enumerate(log):
        if c:
            u[(d, 0)] = u.get((d, 0), 0) + c
            u[(0, d)] = u.get((0, d), 0) + c
    total: dict[tuple[int, int], Fraction] = {}
    power: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}
    for m in range(1, degree + 1):
        nxt: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in power.items():
            for (s, t), v in u.items():
                if a + b + s + t <= degree:
                    key = (a + s, b + t)
                    nxt[key] = nxt.get(key, 0) + c * v
        power = {k: v for k, v in nxt.items() if v}
        if exp[m]:
            for k, v in power.items():
                total[k] = total.get(k, 0) + exp[m] * v
    coeffs = {}
    for k, c in total.items():
        if not c:
            continue
        if c.denominator % p == 0:
            raise IntegralityError(f"Honda coefficient {c} at {k} is not {p}-integral")
        r = c.numerator * pow(c.denominator, -1, p) % p
        if r:
            coeffs[k] = r
    return FglSpec(HONDA, p, n, degree, coeffs)


def law_series(F: FglSpec) -> Series:
    """F(x, y) as a bivariate series."""
    return Series(2, dict(F.coefficients), F.modulus)


def apply_law(F: FglSpec, a: Series, b: Series, degree: int | None = None, bounds: Sequence[int] | None = None) -> Series:
    """F(a, b) for series a, b with zero constant term."""
    if a.constant_term() or b.constant_term():
        raise ValueError("formal sum needs zero constant terms")
    if F.variant == HONDA and degree is None and bounds is None:
        degree = F.truncation
    maxi = max((i for i, _ in F.coefficients), default=0)
    maxj = max((j for _, j in F.coefficients), default=0)
    one = Series.const(1, a.nvars, a.modulus)
    pa, pb = [one], [one]
    for _ in range(maxi):
        pa.append(pa[-1].mul(a, degree, bounds))
    for _ in range(maxj):
        pb.append(pb[-1].mul(b, degree, bounds))
    out = Series(a.nvars, {}, a.modulus)
    for (i, j), c in F.coefficients.items():
        out = out + pa[i].mul(pb[j], degree, bounds).scale(c)
    return out


def formal_sum(F: FglSpec, a: Series, b: Series, bounds: Sequence[int] | None = None) -> Series:
    """a +_F b, reduced under nilpotency bounds x_i^{bounds[i]} = 0 when given."""
    if F.variant == HONDA and bounds is not None:
        need = sum(x - 1 for x in bounds)
        if F.truncation is not None and F.truncation < need:
            raise ValueError(f"law truncated at {F.truncation}, need degree {need} for these bounds")
        return apply_law(F, a, b, degree=None if F.truncation is None else F.truncation, bounds=bounds)
    return apply_law(F, a, b, bounds=bounds)


def p_series(F: FglSpec, k: int) -> Series:
    """[p^k](x): (1+x)^{p^k} - 1 exactly, or x^{p^{kn}} on the Honda fibre."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if F.variant == MULTIPLICATIVE:
        m = F.p**k
        return Series(1, {(i,): comb(m, i) for i in range(1, m + 1)})
    return Series(1, {(F.p ** (k * F.n),): 1}, F.p)


def multiple_series(F: FglSpec, m: int, degree: int | None = None) -> Series:
    """[m](x) by iterated formal addition (to ``degree`` for the Honda law)."""
    x = Series.var(0, 1, F.modulus)
    if m == 0:
        return Series(1, {}, F.modulus)
    acc = x
    for _ in range(m - 1):
        acc = apply_law(F, acc, x, degree=degree)
    return acc


def poly_divmod(num: list[int], den: list[int], modulus: int | None = None) -> tuple[list[int], list[int]]:
    """Long division of integer polynomials by a polynomial with unit leading coefficient."""
    num = list(num)
    lead = den[-1]
    if modulus is None:
        if abs(lead) != 1:
            raise ValueError("divisor must be monic up to sign")
        inv = lead
    else:
        inv = pow(lead, -1, modulus)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] * inv
        if modulus is not None:
            c %= modulus
        q[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
            if modulus is not None:
                num[i + j] %= modulus
    rem = num[: len(den) - 1]
    while rem and not rem[-1]:
        rem.pop()
    return q, rem


class DivisionError(ArithmeticError):
    pass


def _strip(poly: list[int]) -> tuple[list[int], int]:
    """Remove the x^v factor of a polynomial, returning (rest, v)."""
    v = next(i for i, c in enumerate(poly) if c)
    return poly[v:], v


def angle_series(F: FglSpec, k: int) -> Series:
    """<p^k>(x) = [p^k](x) / [p^{k-1}](x), by exact division."""
    if k < 1:
        raise ValueError("k must be at least 1")
    num = p_series(F, k).to_list()
    den = p_series(F, k - 1).to_list()
    # both vanish at 0; strip the common x factor so the divisor has unit constant term
    num, vn = _strip(num)
    den, vd = _strip(den)
    if vn < vd:
        raise DivisionError("numerator has lower order")
    num = [0] * (vn - vd) + num
    # divide from the top: the divisor is monic
    q, rem = poly_divmod(num, den, F.modulus)
    if any(rem):
        raise DivisionError(f"[p^{k}] is not divisible by [p^{k - 1}]")
    return Series.univariate(q, F.modulus)


def weierstrass_degree(s: Series, p: int) -> int:
    """Least degree whose coefficient is a p-adic unit."""
    for e, c in sorted(s.coeffs.items()):
        if Fraction(c).numerator % p:
            return e[0]
    raise ValueError("series vanishes mod p")


def check_law_axioms(F: FglSpec, degree: int | None = None) -> dict[str, bool]:
    """Unit, commutativity and associativity of F, compared to total ``degree``."""
    degree = degree or F.truncation or 6
    coeffs = F.coefficients
    unit = all(j == 0 and i == 1 or i == 0 and j == 1 for (i, j) in coeffs if i == 0 or j == 0)
    unit &= coeffs.get((1, 0)) == 1 and coeffs.get((0, 1)) == 1
    comm = all(coeffs.get((j, i), 0) == c for (i, j), c in coeffs.items() if i + j <= degree)
    x, y, z = (Series.var(i, 3, F.modulus) for i in range(3))
    left = apply_law(F, apply_law(F, x, y, degree=degree), z, degree=degree)
    right = apply_law(F, x, apply_law(F, y, z, degree=degree), degree=degree)
    return {"unit": unit, "commutative": comm, "associative": left == right}


def coefficient_table(F: FglSpec) -> list[list[int]]:
    """[[i, j, c], ...] sorted, for JSON export."""
    return [[i, j, c] for (i, j), c in sorted(F.coefficients.items())]
