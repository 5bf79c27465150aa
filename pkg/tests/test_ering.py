from math import gcd, prod

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from transfer_ideals import fgl, lattice
from transfer_ideals.ering import (
    FIBER,
    INTEGER,
    EAlgebra,
    EulerSet,
    IdealLattice,
    ModeError,
    build_ealgebra,
    euler_class,
    euler_set,
    ideal_from,
    induced_map,
    kernel_in_family,
    localize,
    quotient,
    representation_oracle,
    transfer_ideal,
    transfer_unit,
)
from transfer_ideals.groups import (
    AbelianPGroup,
    Homomorphism,
    Subgroup,
    SubgroupFamily,
    all_subgroups,
    character_kernel,
    family_of,
    family_pullback,
    hom_set,
    maximal_subgroups,
    quotient_group,
)

from conftest import groups, small_groups

Z2 = AbelianPGroup(2, (1,))
Z4 = AbelianPGroup(2, (2,))
V4 = AbelianPGroup(2, (1, 1))


def elem(R, text_coeffs):
    """Element from a {exponent tuple: coefficient} map."""
    u = R.zero()
    for e, c in text_coeffs.items():
        u = u + R.monomial(e, c)
    return u


def log_pk(m, p):
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


def sympy_p_factors(rows, ncols, p):
    """p-parts of the nonzero Smith invariants, computed independently."""
    if not rows:
        return [], 0
    M = sympy.Matrix(rows)
    D = smith_normal_form(M, domain=sympy.ZZ)
    diag = [abs(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]
    parts = sorted(p ** log_pk(d, p) for d in diag)
    return [d for d in parts if d > 1], len(diag)


class TestBuild:
    def test_z2_integer(self):
        R = build_ealgebra(Z2)
        assert R.size == 2
        x = R.gen(0)
        assert x * x == x.scale(-2)  # x^2 + 2x = 0
        assert str(x * x) == "-2*x"

    def test_trivial(self):
        R = build_ealgebra(AbelianPGroup(2, ()))
        assert R.size == 1
        assert str(R.one()) == "1"

    def test_klein_fiber_height_two(self):
        R = build_ealgebra(V4, FIBER, n=2)
        assert R.size == 16 == V4.order**2
        x, y = R.gen(0), R.gen(1)
        assert (x**4).is_zero() and (y**4).is_zero()
        assert not (x**3 * y**3).is_zero()

    @pytest.mark.parametrize("A", small_groups(16))
    @pytest.mark.parametrize("n", [1, 2])
    def test_rank(self, A, n):
        if A.order**n > 64:
            pytest.skip("large")
        assert build_ealgebra(A, FIBER, n=n).size == A.order**n
        if n == 1:
            assert build_ealgebra(A).size == A.order

    def test_incompatible_mode(self):
        with pytest.raises(ModeError):
            EAlgebra(Z2, fgl.multiplicative(2), FIBER)
        with pytest.raises(ModeError):
            build_ealgebra(Z2, INTEGER, n=2)
        with pytest.raises(ModeError):
            build_ealgebra(Z2, "padic")
        with pytest.raises(ModeError):
            EAlgebra(Z2, fgl.multiplicative(3))

    def test_integer_reduction_lowers_degree(self):
        R = build_ealgebra(Z4)
        x = R.gen(0)
        # x^4 = -(4x + 6x^2 + 4x^3) from (1+x)^4 = 1
        assert x**4 == elem(R, {(1,): -4, (2,): -6, (3,): -4})

    @given(st.data())
    def test_ring_axioms(self, data):
        A = data.draw(groups(16))
        mode = data.draw(st.sampled_from([INTEGER, FIBER]))
        R = build_ealgebra(A, mode)
        vec = st.lists(st.integers(-4, 4), min_size=R.size, max_size=R.size)
        u, v, w = (R.element(data.draw(vec)) for _ in range(3))
        assert u * v == v * u
        assert (u * v) * w == u * (v * w)
        assert u * (v + w) == u * v + u * w
        assert u * R.one() == u


class TestEulerClass:
    def test_coordinate(self):
        R = build_ealgebra(V4)
        assert euler_class(R, (1, 0)) == R.gen(0)
        assert euler_class(R, (0, 1)) == R.gen(1)

    def test_trivial_character(self):
        R = build_ealgebra(V4)
        assert euler_class(R, (0, 0)).is_zero()

    def test_klein_product(self):
        R = build_ealgebra(V4)
        assert str(euler_class(R, (1, 1))) == "x*y + x + y"

    @pytest.mark.parametrize("A", small_groups(16))
    @pytest.mark.parametrize("mode", [INTEGER, FIBER])
    def test_additive(self, A, mode):
        """e(chi + chi') = e(chi) +_F e(chi')."""
        R = build_ealgebra(A, mode)
        els = list(A.elements())
        for c in els[:6]:
            for d in els[-6:]:
                assert euler_class(R, A.add(c, d)) == R.formal_add(euler_class(R, c), euler_class(R, d))

    @pytest.mark.parametrize("A", small_groups(16))
    def test_divides_p_multiples(self, A):
        """e(chi) divides [p^j](e(chi)) = e(p^j chi)."""
        R = build_ealgebra(A)
        for c in A.elements():
            I = ideal_from(R, [euler_class(R, c)])
            for j in range(1, 3):
                assert I.contains(euler_class(R, A.scale(A.p**j, c)))

    def test_fiber_multiples_are_frobenius(self):
        """In the special fibre [p](x) = x^{p^n}."""
        A = AbelianPGroup(2, (2,))
        R = build_ealgebra(A, FIBER, n=2)
        assert euler_class(R, (2,)) == R.gen(0) ** 4


class TestTransferUnit:
    def test_klein(self):
        R = build_ealgebra(V4)
        units = sorted(str(transfer_unit(R, H)) for H in maximal_subgroups(V4))
        assert units == sorted(["x + 2", "y + 2", "x*y + x + y + 2"])

    @pytest.mark.parametrize("p", [2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_cyclic(self, p, k):
        A = AbelianPGroup(p, (k,))
        R = build_ealgebra(A)
        (H,) = maximal_subgroups(A)
        angle = fgl.angle_series(fgl.multiplicative(p), k).to_list()
        assert transfer_unit(R, H) == R.from_univariate(0, angle)

    def test_rejects_non_maximal(self):
        R = build_ealgebra(Z4)
        with pytest.raises(ValueError):
            transfer_unit(R, Subgroup.trivial(Z4))
        with pytest.raises(ValueError):
            transfer_unit(build_ealgebra(Z2), Subgroup.trivial(Z4))

    @pytest.mark.parametrize("A", small_groups(32))
    @pytest.mark.parametrize("mode", [INTEGER, FIBER])
    def test_character_choice(self, A, mode):
        """Every character with kernel H yields the same principal ideal."""
        R = build_ealgebra(A, mode)
        for H in maximal_subgroups(A):
            ref = ideal_from(R, [transfer_unit(R, H)])
            for c in A.elements():
                if A.order_of(c) == A.p and character_kernel(A, c) == H:
                    assert ideal_from(R, [transfer_unit(R, H, c)]) == ref

    def test_fiber_is_power(self):
        R = build_ealgebra(V4, FIBER, n=2)
        H = maximal_subgroups(V4)[0]
        assert transfer_unit(R, H) == euler_class(R, (0, 1)) ** 3 or transfer_unit(R, H) == euler_class(R, (1, 0)) ** 3


class TestTransferIdeal:
    def test_empty_family(self):
        R = build_ealgebra(V4)
        I = transfer_ideal(R, SubgroupFamily(V4, ()))
        assert I == IdealLattice.zero(R)
        q = quotient(R, I)
        assert q.free_rank == 4 and q.invariant_factors == []

    def test_klein_all_proper(self):
        R = build_ealgebra(V4)
        I = transfer_ideal(R, SubgroupFamily.all_proper(V4))
        J = ideal_from(R, [R.constant(2), R.gen(0), R.gen(1)])
        assert I == J
        assert I.to_json()["basis"] == [list(r) for r in J.basis]

    @pytest.mark.parametrize("A", small_groups(32))
    def test_monotone(self, A):
        R = build_ealgebra(A)
        fams = [family_of(f) for f in hom_set(A, 1)]
        ideals = [transfer_ideal(R, F) for F in fams]
        for F, I in zip(fams, ideals):
            for G, J in zip(fams, ideals):
                if all(H in G for H in F.maximal_members):
                    assert I <= J

    def test_foreign_family(self):
        with pytest.raises(ValueError):
            transfer_ideal(build_ealgebra(Z2), SubgroupFamily.all_proper(V4))


class TestQuotient:
    def test_klein(self):
        R = build_ealgebra(V4)
        q = quotient(R, transfer_ideal(R, SubgroupFamily.all_proper(V4)))
        assert q.order == 2 and q.invariant_factors == [2] and q.free_rank == 0
        assert q.to_json()["rank"] == 0

    def test_z4_angle(self):
        R = build_ealgebra(Z4)
        I = ideal_from(R, [R.from_univariate(0, [2, 2, 1])])
        q = quotient(R, I)
        assert q.free_rank == 2 and q.invariant_factors == [] and q.order is None

    def test_zero_ideal(self):
        R = build_ealgebra(AbelianPGroup(3, (1, 1)))
        q = quotient(R, IdealLattice.zero(R))
        assert q.free_rank == 9 and q.torsion_order == 1

    def test_rank_only(self):
        R = build_ealgebra(V4)
        q = quotient(R, transfer_ideal(R, SubgroupFamily.all_proper(V4)), invariants=False)
        assert q.invariant_factors is None and q.free_rank == 0

    def test_fiber_dimension(self):
        R = build_ealgebra(V4, FIBER)
        q = quotient(R, transfer_ideal(R, SubgroupFamily.all_proper(V4)))
        assert q.dimension == 1 and q.invariant_factors is None

    def test_foreign_ideal(self):
        R, S = build_ealgebra(V4), build_ealgebra(V4)
        with pytest.raises(ValueError):
            quotient(R, IdealLattice.zero(S))

    @pytest.mark.parametrize("A", small_groups(16))
    def test_snf_against_sympy(self, A):
        R = build_ealgebra(A)
        for f in hom_set(A, 1):
            I = transfer_ideal(R, family_of(f))
            q = quotient(R, I)
            factors, rank = sympy_p_factors([list(r) for r in I.rows], R.size, A.p)
            assert q.invariant_factors == factors
            assert q.relation_rank == rank
            assert q.free_rank + len(q.invariant_factors) + len(q.prime_to_p or []) <= R.size

    @pytest.mark.parametrize("A", small_groups(32))
    def test_saturation_is_torsion_free(self, A):
        R = build_ealgebra(A)
        for f in hom_set(A, 1)[:4]:
            q = quotient(R, transfer_ideal(R, family_of(f)))
            sat = q.saturation
            assert lattice.rank_q(sat, R.size) == q.relation_rank
            diag = lattice.smith_diagonal(sat, R.size)
            assert all(lattice.p_part(d, A.p) == 1 for d in diag)
            # the saturation contains the relations with p-power index
            index = prod(lattice.smith_diagonal(list(q.ideal.basis), R.size)) // prod(diag)
            assert index == q.torsion_order * prod(q.prime_to_p or [])


class TestInducedMap:
    def test_identity(self):
        R = build_ealgebra(V4)
        ident = Homomorphism(V4, V4, ((1, 0), (0, 1)))
        phi = induced_map(R, ident, R)
        for t in range(R.size):
            assert phi.rows[t] == R.one().coeffs if t == 0 else phi.rows[t] == R.element(
                [int(i == t) for i in range(R.size)]
            ).coeffs

    def test_quotient_z4_z2(self):
        R4, R2 = build_ealgebra(Z4), build_ealgebra(Z2)
        q = Homomorphism(Z4, Z2, ((1,),))
        phi = induced_map(R4, q, R2)
        assert str(phi(R2.gen(0))) == "x^2 + 2*x"

    def test_half_image_instance(self):
        """<2>([2](x)) = <4>(x) lies in the ideal for f with image 2Z/4."""
        R4, R2 = build_ealgebra(Z4), build_ealgebra(Z2)
        phi = induced_map(R4, Homomorphism(Z4, Z2, ((1,),)), R2)
        g = transfer_unit(R2, Subgroup.trivial(Z2))
        f = Homomorphism(AbelianPGroup(2, (2,)), Z4, ((2,),))
        I = transfer_ideal(R4, family_of(f))
        assert phi(g) == R4.from_univariate(0, [2, 2, 1])
        assert I.contains(phi(g))

    @pytest.mark.parametrize("A", small_groups(16))
    def test_functorial(self, A):
        """(psi ∘ phi)^* = phi^* ∘ psi^* for quotient maps A -> A/B -> A/C."""
        RA = build_ealgebra(A)
        for B in all_subgroups(A)[:6]:
            Q, q = quotient_group(A, B)
            RQ = build_ealgebra(Q)
            for C in all_subgroups(Q)[:4]:
                Q2, q2 = quotient_group(Q, C)
                RQ2 = build_ealgebra(Q2)
                lhs = induced_map(RA, q2.compose(q), RQ2)
                rhs = induced_map(RQ, q2, RQ2).then(induced_map(RA, q, RQ))
                assert lhs.rows == rhs.rows

    @pytest.mark.parametrize("A", small_groups(16))
    def test_maps_pulled_back_families(self, A):
        """q^* sends I_F on A/B into I_{q^{-1} F} on A."""
        RA = build_ealgebra(A)
        for B in all_subgroups(A):
            Q, q = quotient_group(A, B)
            if Q.order == 1:
                continue
            RQ = build_ealgebra(Q)
            phi = induced_map(RA, q, RQ)
            F = SubgroupFamily.all_proper(Q)
            IF = transfer_ideal(RQ, F)
            IP = transfer_ideal(RA, family_pullback(q, F))
            assert phi.maps_into(IF, IP)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            induced_map(build_ealgebra(Z2), Homomorphism(Z4, Z2, ((1,),)), build_ealgebra(Z2))


class TestLocalize:
    def test_empty(self):
        R = build_ealgebra(V4)
        loc = localize(R, EulerSet(R, [], []))
        assert loc.dimension == 4 and loc.image_rank == 4 and loc.kernel_basis == ()

    @pytest.mark.parametrize("p", [2, 3])
    def test_elementary_rank_two_vanishes(self, p):
        A = AbelianPGroup(p, (1, 1))
        R = build_ealgebra(A)
        assert localize(R, euler_set(R)).dimension == 0

    def test_z4_non_surjective(self):
        R = build_ealgebra(Z4)
        f = Homomorphism(AbelianPGroup(2, (2,)), Z4, ((2,),))
        S = euler_set(R, family_of(f))
        assert sorted(S.characters) == [(1,), (2,), (3,)]
        assert [str(s) for s in S.elements] == ["x", "x^2 + 2*x", "x^3 + 3*x^2 + 3*x"]
        loc = localize(R, S, ideal=transfer_ideal(R, family_of(f)))
        assert loc.dimension == 2 == loc.image_rank
        assert all(w for _, w in loc.witnesses)

    def test_fiber_field(self):
        R = build_ealgebra(Z2, FIBER)
        assert localize(R, euler_set(R), field="Fp").dimension == 0
        with pytest.raises(ModeError):
            localize(R, euler_set(R), field="Q")
        with pytest.raises(ValueError):
            localize(R, euler_set(R), field="R")

    def test_kernel_in_family(self):
        assert not kernel_in_family(V4, (0, 0), None)
        F = SubgroupFamily(V4, (maximal_subgroups(V4)[0],))
        hits = [c for c in V4.elements() if kernel_in_family(V4, c, F)]
        assert len(hits) == 1 and character_kernel(V4, hits[0]) == F.maximal_members[0]

    @pytest.mark.parametrize("A", small_groups(32))
    def test_frobenius_witnesses(self, A):
        """Each transfer generator is killed by an Euler class from S_f."""
        R = build_ealgebra(A)
        for f in hom_set(A, 1):
            F = family_of(f)
            if F.is_empty:
                continue
            S = euler_set(R, F)
            for g in transfer_ideal(R, F).generators:
                assert any(R.mul(s, g).is_zero() for s in S.elements)

    @pytest.mark.parametrize("A", small_groups(16))
    def test_kernel_is_annihilated(self, A):
        """sigma^m kills the kernel and is injective on the image."""
        R = build_ealgebra(A)
        loc = localize(R, euler_set(R))
        sigma = prod(euler_set(R).elements, start=R.one())
        for row in loc.kernel_basis:
            assert (sigma**loc.stable_power * R.element(row)).is_zero()

    @pytest.mark.parametrize("A", small_groups(16))
    def test_order_p_classes_suffice(self, A):
        """Inverting S_A is the same as inverting the order-p Euler classes."""
        R = build_ealgebra(A)
        full = euler_set(R)
        chars = [c for c in A.elements() if A.order_of(c) == A.p]
        small = EulerSet(R, chars, [euler_class(R, c) for c in chars])
        a, b = localize(R, full), localize(R, small)
        assert a.dimension == b.dimension
        assert lattice.hermite_basis(list(a.kernel_basis), R.size) == lattice.hermite_basis(
            list(b.kernel_basis), R.size
        )

    @pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)])
    def test_p_is_product_of_classes_cyclic(self, p, k):
        """In T_A the product of order-p Euler classes and p agree up to a p-adic unit."""
        A = AbelianPGroup(p, (k,))
        R = build_ealgebra(A)
        K = list(localize(R, euler_set(R)).kernel_basis)
        chars = [c for c in A.elements() if A.order_of(c) == p]
        s = prod((euler_class(R, c) for c in chars), start=R.one())
        L1 = lattice.hermite_basis(R.mult_rows(s) + K, R.size)
        L2 = lattice.hermite_basis(R.mult_rows(R.constant(p)) + K, R.size)
        both = lattice.hermite_basis(list(L1) + list(L2), R.size)
        d1, d2, d = (prod(lattice.smith_diagonal(list(L), R.size)) for L in (L1, L2, both))
        assert len(L1) == len(L2) == len(both) == R.size
        assert gcd(d1 // d, p) == 1 and gcd(d2 // d, p) == 1


class TestOracle:
    def test_whole_group(self):
        R = build_ealgebra(V4)
        orc = representation_oracle(V4, Subgroup.whole(V4))
        assert orc.induced == {(0, 0): 1}
        assert len(orc.mapped_basis(R)) == R.size
        assert ideal_from(R, [R.one()]).basis == orc.mapped_basis(R)

    def test_z2(self):
        R = build_ealgebra(Z2)
        orc = representation_oracle(Z2, Subgroup.trivial(Z2))
        assert orc.induced == {(0,): 1, (1,): 1}
        assert orc.mapped_basis(R) == ideal_from(R, [elem(R, {(0,): 2, (1,): 1})]).basis

    @pytest.mark.parametrize("A", small_groups(16, primes=(2, 3)))
    def test_equality(self, A):
        R = build_ealgebra(A)
        for H in maximal_subgroups(A):
            assert representation_oracle(A, H).mapped_basis(R) == ideal_from(R, [transfer_unit(R, H)]).basis

    def test_rejects_fiber(self):
        with pytest.raises(ModeError):
            representation_oracle(Z2, Subgroup.trivial(Z2), FIBER)
        with pytest.raises(ValueError):
            representation_oracle(Z2, Subgroup.trivial(Z4))
