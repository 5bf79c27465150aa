"""Iterated free loop spaces: E^0(L^h BA) as a product over Hom(Z_p^h, A).

Since A is abelian, L^h BA is Hom(Z_p^h, A) x BA, so the ring is one copy of
E^0(BA) per h-tuple f.  The transfer ideal splits accordingly: its factor at
f is the ideal of transfers from the maximal subgroups containing im f.

The rational class-function model replaces E^0(BA) by Q-valued functions on
Hom(Z_p^n, A), one copy per f again, so points are pairs (alpha, alpha').
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional

from .ering import INTEGER, EAlgebra, IdealLattice, QuotientModule, build_ealgebra, quotient, transfer_ideal
from .groups import (
    AbelianPGroup,
    BudgetExceeded,
    Element,
    Homomorphism,
    QZHom,
    Subgroup,
    SubgroupFamily,
    dual_hom,
    family_of,
    hom_from_tuple,
    hom_set,
    maximal_subgroups,
)

DEFAULT_BUDGET = 1 << 20


@dataclass
class LoopRing:
    group: AbelianPGroup
    h: int
    algebra: EAlgebra
    homs: list[Homomorphism]

    @property
    def n(self) -> int:
        return self.algebra.n

    def __len__(self) -> int:
        return len(self.homs)

    def components(self) -> list[QZHom]:
        """Component labels in Hom(A*, (Q_p/Z_p)^h), in factor order."""
        return [dual_hom(f) for f in self.homs]

    def factor_index(self, f: Homomorphism) -> int:
        return self.homs.index(f)


def build_loop_ring(A: AbelianPGroup, h: int, mode: str = INTEGER, n: int = 1, budget: int = DEFAULT_BUDGET) -> LoopRing:
    """One E^0(BA) model per f in Hom(Z_p^h, A); refuses when |A|^h * |A|^n > budget."""
    required = A.order**h * A.order**n
    if required > budget:
        raise BudgetExceeded(required, budget)
    return LoopRing(A, h, build_ealgebra(A, mode, n), hom_set(A, h))


def _family_key(F: SubgroupFamily) -> tuple:
    return tuple(M.basis for M in F.maximal_members)


@dataclass
class LoopIdeal:
    ring: LoopRing
    families: list[SubgroupFamily]
    factors: list[IdealLattice]
    _quotients: dict = field(default_factory=dict, repr=False)

    def factor(self, f: Homomorphism) -> IdealLattice:
        return self.factors[self.ring.factor_index(f)]

    def quotient(self, i: int, invariants: bool = True) -> QuotientModule:
        """Quotient at factor i, shared between factors with the same family."""
        key = (_family_key(self.families[i]), invariants)
        if key not in self._quotients:
            self._quotients[key] = quotient(self.ring.algebra, self.factors[i], invariants)
        return self._quotients[key]

    def torsion_free_ranks(self) -> list[int]:
        return [self.quotient(i, invariants=False).free_rank for i in range(len(self.factors))]


def loop_transfer_ideal(L: LoopRing) -> LoopIdeal:
    """Factor at f = transfer ideal of the family F_f; equal families share one lattice."""
    cache: dict[tuple, IdealLattice] = {}
    families, factors = [], []
    for f in L.homs:
        F = family_of(f)
        key = _family_key(F)
        if key not in cache:
            cache[key] = transfer_ideal(L.algebra, F)
        families.append(F)
        factors.append(cache[key])
    return LoopIdeal(L, families, factors)


# ---------------------------------------------------------------------------
# rational class functions


Pair = tuple[tuple[Element, ...], tuple[Element, ...]]


@dataclass
class ClassFunctionTable:
    """Q-valued function on pairs (alpha in A^n, alpha' in A^h); missing pairs are 0."""

    model: "CharacterModel"
    values: dict[Pair, Fraction]

    def __call__(self, pair: Pair) -> Fraction:
        return self.values.get(pair, Fraction(0))

    def __mul__(self, other: "ClassFunctionTable") -> "ClassFunctionTable":
        return ClassFunctionTable(
            self.model, {k: v * other(k) for k, v in self.values.items() if v * other(k)}
        )

    def __add__(self, other: "ClassFunctionTable") -> "ClassFunctionTable":
        keys = set(self.values) | set(other.values)
        return ClassFunctionTable(self.model, {k: self(k) + other(k) for k in keys if self(k) + other(k)})

    def support(self) -> set[Pair]:
        return {k for k, v in self.values.items() if v}


class CharacterModel:
    """Class functions on Hom(Z_p^n, A) x Hom(Z_p^h, A) with Q coefficients."""

    def __init__(self, A: AbelianPGroup, n: int, h: int):
        self.group = A
        self.n = n
        self.h = h

    @cached_property
    def pairs(self) -> list[Pair]:
        elems = list(self.group.elements())
        return [
            (alpha, beta)
            for alpha in itertools.product(elems, repeat=self.n)
            for beta in itertools.product(elems, repeat=self.h)
        ]

    def pairs_through(self, B: Subgroup) -> list[Pair]:
        return [pr for pr in self.pairs if self.factors_through(pr, B)]

    @staticmethod
    def factors_through(pair: Pair, B: Subgroup) -> bool:
        alpha, beta = pair
        members = B.element_set
        return all(a in members for a in alpha) and all(b in members for b in beta)

    def one(self, B: Subgroup | None = None) -> ClassFunctionTable:
        pts = self.pairs if B is None else self.pairs_through(B)
        return ClassFunctionTable(self, {pr: Fraction(1) for pr in pts})

    def transfer(self, small: Subgroup, big: Subgroup | None, gamma: ClassFunctionTable | None = None) -> ClassFunctionTable:
        """Tr from ``small`` to ``big`` (None = A): extend by zero and multiply by the index.

        Functions for a subgroup B are tables supported on pairs through B.
        """
        big = big or Subgroup.whole(self.group)
        if not small <= big:
            raise ValueError("transfer needs small ⊆ big")
        gamma = gamma if gamma is not None else self.one(small)
        index = big.order // small.order
        return ClassFunctionTable(
            self,
            {pr: index * v for pr, v in gamma.values.items() if v and self.factors_through(pr, small)},
        )

    def transfer_generators(self) -> list[ClassFunctionTable]:
        return [self.transfer(H, None) for H in maximal_subgroups(self.group)]

    @cached_property
    def _support(self) -> frozenset[Pair]:
        killed: set[Pair] = set()
        for g in self.transfer_generators():
            killed |= g.support()
        if self.group.order == 1:  # no proper subgroups: nothing is killed
            return frozenset(self.pairs)
        return frozenset(pr for pr in self.pairs if pr not in killed)

    def quotient_support(self) -> set[Pair]:
        """Pairs surviving in the quotient by the transfer ideal.

        The ring is a product of copies of Q, so the ideal generated by a set
        of functions is everything supported on the union of their supports.
        """
        return set(self._support)

    def fiber_support(self, f: Homomorphism) -> set[Pair]:
        beta = tuple(f.images)
        return {pr for pr in self._support if pr[1] == beta}

    def jointly_surjective(self) -> set[Pair]:
        A = self.group
        return {pr for pr in self.pairs if Subgroup.generated(A, pr[0] + pr[1]).order == A.order}

    def level_point(self, pair: Pair) -> QZHom:
        """The dual of (alpha, alpha'): A* -> (Q_p/Z_p)^{n+h}."""
        alpha, beta = pair
        return dual_hom(hom_from_tuple(self.group, alpha + beta))

    def bijection(self) -> dict[Pair, QZHom]:
        return {pr: self.level_point(pr) for pr in sorted(self.quotient_support())}


def character_model(A: AbelianPGroup, n: int, h: int) -> CharacterModel:
    return CharacterModel(A, n, h)
