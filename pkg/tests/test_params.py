from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from apacket.params import (ArthurParameter, BlockOrder, GroupKind, HalfInt, JordanBlock, Kind, OrderError, RhoLabel,
                            SelfDuality, ValidationError, block_from_ab, block_sign, block_to_ab, canonical_order,
                            dominate_shift, has_good_parity, is_admissible_order, is_far_away)
from apacket.verify import ORTH, parameter_of

from .strategies import fixed_b

SYMP = RhoLabel("s", 2, SelfDuality.SYMPLECTIC)


def blk(A, B, zeta=1, rho=ORTH):
    return JordanBlock(rho, HalfInt.of(A), HalfInt.of(B), zeta)


class TestHalfInt:
    def test_parsing_and_rendering(self):
        assert HalfInt.of("3/2").twice == 3
        assert HalfInt.of(2).twice == 4
        assert HalfInt.of(Fraction(-1, 2)).twice == -1
        assert str(HalfInt(-1)) == "-1/2"
        assert str(HalfInt(6)) == "3"

    def test_rejects_thirds(self):
        with pytest.raises(ValueError):
            HalfInt.of("1/3")

    def test_arithmetic_stays_exact(self):
        x = HalfInt.of("5/2")
        assert x + 1 == HalfInt.of("7/2")
        assert x - HalfInt.of("1/2") == 2
        assert -x == HalfInt.of("-5/2")
        assert (x * 2).is_integral()
        assert HalfInt(4).half() == 1
        with pytest.raises(ValueError):
            HalfInt(3).half()

    def test_immutable(self):
        with pytest.raises(AttributeError):
            HalfInt(1).twice = 3

    @given(st.integers(-50, 50), st.integers(-50, 50))
    def test_order_matches_fractions(self, x, y):
        assert (HalfInt(x) < HalfInt(y)) == (Fraction(x, 2) < Fraction(y, 2))
        assert (HalfInt(x) == HalfInt(y)) == (x == y)
        assert hash(HalfInt(x)) == hash(Fraction(x, 2))

    @given(st.integers(-50, 50))
    def test_integral_iff_twice_even(self, x):
        assert HalfInt(x).is_integral() == (x % 2 == 0)


class TestBlocks:
    @pytest.mark.parametrize("a, b, A, B, zeta", [(3, 1, 1, 1, 1), (2, 2, 1, 0, 1), (1, 5, 2, 2, -1)])
    def test_from_ab(self, a, b, A, B, zeta):
        block = block_from_ab(ORTH, a, b)
        assert (block.A, block.B, block.zeta) == (A, B, zeta)

    def test_tie_override(self):
        assert block_from_ab(ORTH, 2, 2, tie=-1).zeta == -1

    @pytest.mark.parametrize("A, B, zeta, ab", [(1, 1, 1, (3, 1)), (2, 2, -1, (1, 5)), (5, 1, 1, (7, 5))])
    def test_to_ab(self, A, B, zeta, ab):
        assert block_to_ab(blk(A, B, zeta)) == ab

    @given(st.integers(1, 30), st.integers(1, 30))
    def test_round_trip_and_dimension(self, a, b):
        block = block_from_ab(ORTH, a, b)
        assert block_to_ab(block) == (a, b)
        assert int((block.A - block.B + 1) * 1) * int(block.A + block.B + 1) == a * b
        assert block.dimension() == a * b

    @pytest.mark.parametrize("A, B", [(1, 2), ("3/2", 1), (-1, -1)])
    def test_invalid_blocks(self, A, B):
        with pytest.raises(ValidationError):
            blk(A, B)


class TestGroupAndParity:
    @pytest.mark.parametrize("kind, N", [(Kind.SP, 4), (Kind.SO_ODD, 5), (Kind.SO_EVEN, 3)])
    def test_wrong_N_parity(self, kind, N):
        with pytest.raises(ValidationError) as info:
            GroupKind(kind, N)
        assert info.value.invariant == "N parity"

    def test_sigma0_only_for_even_orthogonal(self):
        assert GroupKind(Kind.SO_EVEN, 4).sigma0
        assert not GroupKind(Kind.SP, 5).sigma0

    def test_block_types(self):
        # orthogonal rho with a + b even gives an orthogonal block; symplectic rho flips it
        assert block_sign(block_from_ab(ORTH, 3, 3)) == 1
        assert block_sign(block_from_ab(ORTH, 2, 3)) == -1
        assert block_sign(block_from_ab(SYMP, 2, 3)) == 1

    def test_parity_against_dual_group(self):
        group = GroupKind(Kind.SP, 9)
        assert has_good_parity(block_from_ab(ORTH, 3, 3), group)
        assert not has_good_parity(block_from_ab(ORTH, 2, 3), group)

    def test_wrong_parity_blocks_pair_up(self):
        nsd = RhoLabel("u", 1, SelfDuality.NONE)
        group = GroupKind(Kind.SP, 9 + 2 * 6)
        param = ArthurParameter.from_blocks(group, [block_from_ab(ORTH, 3, 3), block_from_ab(nsd, 2, 3)])
        assert len(param.blocks) == 1 and len(param.np_blocks) == 1
        assert param.dimension() == 21

    def test_dimension_must_match(self):
        with pytest.raises(ValidationError) as info:
            ArthurParameter(GroupKind(Kind.SP, 11), (block_from_ab(ORTH, 3, 3),))
        assert info.value.invariant == "dimension"

    def test_mixed_integrality_rejected(self):
        with pytest.raises(ValidationError):
            ArthurParameter(GroupKind(Kind.SO_EVEN, 10), (blk(1, 0), blk("3/2", "1/2")))

    def test_rho_name_clash(self):
        other = RhoLabel("r", 2, SelfDuality.ORTHOGONAL)
        with pytest.raises(ValidationError):
            ArthurParameter(GroupKind(Kind.SO_EVEN, 8), (blk(0, 0), blk(0, 0, rho=other), blk(1, 1), blk(0, 0)))


class TestOrders:
    def test_admissibility(self):
        param = parameter_of([blk(3, 2), blk(1, 0)])
        assert is_admissible_order(param, BlockOrder.from_mapping({"r": [1, 0]}))
        assert not is_admissible_order(param, BlockOrder.from_mapping({"r": [0, 1]}))

    def test_nested_blocks_have_no_constraint(self):
        param = parameter_of([blk(4, 0), blk(2, 1)])
        assert is_admissible_order(param, BlockOrder.from_mapping({"r": [0, 1]}))
        assert is_admissible_order(param, BlockOrder.from_mapping({"r": [1, 0]}))

    def test_canonical_examples(self):
        param = parameter_of([blk(5, 1), blk(3, 1, -1)])
        assert canonical_order(param).of("r") == (1, 0)
        assert canonical_order(parameter_of([blk(3, 1)])).of("r") == (0,)
        assert canonical_order(parameter_of([blk(3, 1), blk(3, 1)])).of("r") == (0, 1)

    def test_order_must_list_every_block(self):
        param = parameter_of([blk(3, 2), blk(1, 0)])
        with pytest.raises(OrderError):
            is_admissible_order(param, BlockOrder.from_mapping({"r": [0]}))

    @given(fixed_b(n_max=5, a_max=17))
    def test_canonical_order_admissible_on_fixed_b(self, param):
        assert is_admissible_order(param, canonical_order(param))


class TestFarAway:
    def test_empty_J(self):
        assert is_far_away(blk(1, 1), [], [blk(1, 1)])

    def test_bound_examples(self):
        J = [blk(3, 1)]
        assert is_far_away(blk(100, 90), J, [blk(3, 1), blk(100, 90)])
        assert not is_far_away(blk(5, 1), J, [blk(3, 1), blk(5, 1)])

    def test_bound_is_strict(self):
        # bound for J = {(3,1)} with context {(3,1), (100,90)} is 34
        assert is_far_away(blk(45, 35), [blk(3, 1)], [blk(3, 1), blk(100, 90)])
        assert not is_far_away(blk(44, 34), [blk(3, 1)], [blk(3, 1), blk(100, 90)])


class TestDominate:
    def test_zero_shift(self):
        param = parameter_of([blk(3, 1)])
        assert dominate_shift(param, canonical_order(param), {0: 0}) == param

    def test_single_shift(self):
        param = parameter_of([blk(3, 1)])
        shifted = dominate_shift(param, canonical_order(param), {0: 10})
        assert (shifted.blocks[0].A, shifted.blocks[0].B) == (13, 11)

    def test_nested_become_disjoint(self):
        param = parameter_of([blk(4, 0), blk(2, 1)])
        order = BlockOrder.from_mapping({"r": [0, 1]})
        shifted = dominate_shift(param, order, {1: 10})
        assert shifted.blocks[1].B > shifted.blocks[0].A
        assert is_admissible_order(shifted, order)

    def test_inadmissible_after_shift(self):
        param = parameter_of([blk(4, 0), blk(2, 1)])
        with pytest.raises(OrderError):
            dominate_shift(param, BlockOrder.from_mapping({"r": [1, 0]}), {1: 10})

    def test_rejects_fractional_shift(self):
        param = parameter_of([blk(3, 1)])
        with pytest.raises(ValidationError):
            dominate_shift(param, canonical_order(param), {0: "1/2"})

    @given(fixed_b(n_max=3), st.integers(0, 6))
    def test_shift_preserves_length_and_zeta(self, param, t):
        order = canonical_order(param)
        top = order.of("r")[-1]
        shifted = dominate_shift(param, order, {top: t})
        for old, new in zip(param.blocks, shifted.blocks):
            assert new.A - new.B == old.A - old.B and new.zeta == old.zeta
