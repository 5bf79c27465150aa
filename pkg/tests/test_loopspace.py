from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from transfer_ideals.ering import FIBER, IdealLattice, build_ealgebra, ideal_from, transfer_ideal
from transfer_ideals.groups import (
    AbelianPGroup,
    BudgetExceeded,
    Subgroup,
    SubgroupFamily,
    all_subgroups,
    dual_hom,
    family_pullback,
    hom_set,
    level_count,
    level_points,
    quotient_group,
)
from transfer_ideals.loopspace import (
    ClassFunctionTable,
    build_loop_ring,
    character_model,
    loop_transfer_ideal,
)

from conftest import groups, small_groups

Z2 = AbelianPGroup(2, (1,))
V4 = AbelianPGroup(2, (1, 1))


class TestLoopRing:
    def test_h0(self):
        L = build_loop_ring(V4, 0)
        assert len(L) == 1 and L.algebra.size == 4

    def test_z2_h2(self):
        assert len(build_loop_ring(Z2, 2)) == 4

    @pytest.mark.parametrize("A", small_groups(16))
    @pytest.mark.parametrize("h", [0, 1, 2])
    def test_components(self, A, h):
        L = build_loop_ring(A, h)
        comps = L.components()
        assert len(comps) == A.order**h == len(set(comps))
        for f, c in zip(L.homs, comps):
            assert c.source == A and c.target_rank == h
            assert L.factor_index(f) == L.homs.index(f)

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as err:
            build_loop_ring(V4, 2, budget=10)
        assert err.value.required == 64

    def test_fiber_mode(self):
        L = build_loop_ring(V4, 1, FIBER, n=2)
        assert L.n == 2 and L.algebra.size == 16


class TestLoopIdeal:
    def test_surjective_factor_vanishes(self):
        L = build_loop_ring(V4, 2)
        I = loop_transfer_ideal(L)
        for f, J in zip(L.homs, I.factors):
            assert (J == IdealLattice.zero(L.algebra)) == f.is_surjective()

    def test_klein_zero_factor(self):
        L = build_loop_ring(V4, 1)
        I = loop_transfer_ideal(L)
        R = L.algebra
        zero = L.homs[0]
        assert not any(zero.images[0])
        assert I.factor(zero) == ideal_from(R, [R.constant(2), R.gen(0), R.gen(1)])

    @pytest.mark.parametrize("A", small_groups(32))
    def test_two_descriptions(self, A):
        """F_f directly agrees with the pullback of all proper subgroups of A/im f."""
        L = build_loop_ring(A, 1)
        I = loop_transfer_ideal(L)
        for f, J in zip(L.homs, I.factors):
            Q, q = quotient_group(A, f.image())
            F = SubgroupFamily(A, ()) if Q.order == 1 else family_pullback(q, SubgroupFamily.all_proper(Q))
            assert transfer_ideal(L.algebra, F) == J

    @pytest.mark.parametrize("A", small_groups(16))
    @pytest.mark.parametrize("h", [1, 2])
    def test_total_rank(self, A, h):
        """Torsion-free ranks add up to the unconstrained level count."""
        if A.order ** (h + 1) > 4096:
            pytest.skip("budget")
        I = loop_transfer_ideal(build_loop_ring(A, h))
        ranks = I.torsion_free_ranks()
        assert sum(ranks) == level_count(A, 1, h)
        for f, r in zip(I.ring.homs, ranks):
            assert r == level_count(A, 1, h, dual_hom(f))

    def test_quotient_shared(self):
        I = loop_transfer_ideal(build_loop_ring(V4, 1))
        nonzero = [i for i, f in enumerate(I.ring.homs) if any(f.images[0])]
        assert I.quotient(0).invariant_factors == [2]
        assert all(I.quotient(i).free_rank == 2 for i in nonzero)


class TestCharacterModel:
    def test_transfer_formula(self):
        A = AbelianPGroup(2, (2,))
        cm = character_model(A, 1, 1)
        small = Subgroup.generated(A, [(2,)])
        t = cm.transfer(small, None)
        for pr in cm.pairs:
            through = cm.factors_through(pr, small)
            assert t(pr) == (Fraction(2) if through else 0)

    def test_transfer_of_function(self):
        cm = character_model(V4, 1, 0)
        H = Subgroup.generated(V4, [(1, 0)])
        gamma = ClassFunctionTable(cm, {pr: Fraction(i + 1) for i, pr in enumerate(cm.pairs_through(H))})
        t = cm.transfer(H, None, gamma)
        for pr in cm.pairs:
            assert t(pr) == (2 * gamma(pr) if cm.factors_through(pr, H) else 0)

    def test_transfer_rejects(self):
        cm = character_model(V4, 1, 0)
        with pytest.raises(ValueError):
            cm.transfer(Subgroup.whole(V4), Subgroup.generated(V4, [(1, 0)]))

    @pytest.mark.parametrize("A", small_groups(16))
    def test_transfer_composition(self, A):
        cm = character_model(A, 1, 1)
        subs = all_subgroups(A)
        for small in subs:
            for mid in subs:
                if small <= mid:
                    direct = cm.transfer(small, None)
                    staged = cm.transfer(mid, None, cm.transfer(small, mid))
                    assert direct.values == staged.values

    def test_pointwise_ring(self):
        cm = character_model(Z2, 1, 1)
        one = cm.one()
        H = Subgroup.trivial(Z2)
        t = cm.transfer(H, None)
        assert (t * one).values == t.values
        assert (t + t).values == {k: 2 * v for k, v in t.values.items()}
        assert t.support() == set(cm.pairs_through(H))

    @pytest.mark.parametrize("A", small_groups(16))
    @pytest.mark.parametrize("n,h", [(1, 0), (1, 1), (2, 0), (1, 2), (2, 1), (3, 0)])
    def test_support_is_level(self, A, n, h):
        cm = character_model(A, n, h)
        if len(cm.pairs) > 5000:
            pytest.skip("large")
        support = cm.quotient_support()
        assert support == cm.jointly_surjective()
        assert len(support) == len(level_points(A, n, h)) == level_count(A, n, h)
        for f in hom_set(A, h):
            assert len(cm.fiber_support(f)) == level_count(A, n, h, dual_hom(f))

    @pytest.mark.parametrize("A", small_groups(16))
    def test_explicit_bijection(self, A):
        cm = character_model(A, 1, 1)
        matching = cm.bijection()
        images = list(matching.values())
        assert len(set(images)) == len(images)
        assert set(images) == set(level_points(A, 1, 1).points)

    def test_trivial_group(self):
        cm = character_model(AbelianPGroup(2, ()), 1, 1)
        assert len(cm.quotient_support()) == 1

    @given(groups(8), st.integers(0, 2), st.integers(0, 1))
    def test_killed_pairs_are_not_injective(self, A, n, h):
        cm = character_model(A, n, h)
        support = cm.quotient_support()
        for pr in cm.pairs:
            assert cm.level_point(pr).is_injective() == (pr in support)
