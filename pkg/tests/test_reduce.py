from collections import Counter

import pytest
from hypothesis import given, settings

from apacket.langlands import Segment
from apacket.packet import PacketIndex, canonical_index, enumerate_indices, enumerate_packet
from apacket.params import (ArthurParameter, BlockOrder, Finding, GroupKind, HalfInt, JordanBlock, Kind, RhoLabel,
                            SelfDuality, ValidationError, block_from_ab, canonical_order)
from apacket.reduce import (PushError, Resolution, SpehMatrix, TemperedBlock, breakpoints, change_sign,
                            np_speh, push_half_integral, push_integral, reduction_variants, resolve, resolve_special)
from apacket.reorder import reorder_path
from apacket.verify import ORTH, parameter_of, single_block

from .strategies import fixed_b, special

h = HalfInt.of


def blk(A, B, zeta=1, rho=ORTH):
    return JordanBlock(rho, h(A), h(B), zeta)


def ix(*pairs):
    return PacketIndex(tuple(l for l, _ in pairs), tuple(e for _, e in pairs))


def rows(matrix):
    return [(str(r.x), str(r.y)) for r in matrix.rows]


class TestShapes:
    def test_speh_rows_shift(self):
        matrix = SpehMatrix.from_top(ORTH, 1, 3, 2)
        assert rows(matrix) == [("1", "3"), ("2", "2")]
        assert matrix.dimension() == 10

    def test_speh_rejects_bad_rows(self):
        with pytest.raises(ValidationError):
            SpehMatrix(ORTH, (Segment(ORTH, h(0), h(2)), Segment(ORTH, h(0), h(1))))

    def test_empty_speh_is_none(self):
        assert SpehMatrix.from_top(ORTH, 0, 0, 0) is None

    def test_tempered_dimension(self):
        assert TemperedBlock(ORTH, 3, 2, 1).dimension() == 12
        assert TemperedBlock(ORTH, h("1/2"), h("1/2"), 1).dimension() == 2

    def test_malformed_tempered_is_a_finding(self):
        with pytest.raises(Finding):
            TemperedBlock(ORTH, 1, 2, 1)


class TestPushIntegral:
    def test_nothing_to_push(self):
        param = parameter_of([blk(3, 1)])
        new, speh, _ = push_integral(param, canonical_order(param))
        assert new == param and speh == []

    def test_example(self):
        param = parameter_of([blk(3, 1, -1), blk(5, 1)])
        new, speh, index_map = push_integral(param, canonical_order(param))
        assert new.blocks == (blk(2, 0), blk(5, 1))
        assert len(speh) == 1 and rows(speh[0]) == [("-1", "3")]
        assert len(enumerate_packet(new, canonical_order(new))) == 10
        packet = enumerate_packet(new, canonical_order(new))
        assert {index_map.inverse(i) for i in packet} == {canonical_index(param, i) for i in packet}

    def test_counterexample_configuration_rejected(self):
        param = parameter_of([blk(5, 3, -1), blk(3, 1)])
        with pytest.raises(PushError) as info:
            push_integral(param, canonical_order(param))
        assert "counterexample" in str(info.value)

    def test_half_integral_rejected(self):
        param = parameter_of([blk("5/2", "3/2", -1), blk("7/2", "3/2")])
        with pytest.raises(PushError):
            push_integral(param, canonical_order(param))

    @settings(max_examples=60)
    @given(fixed_b(integral=True, n_max=4, a_max=11, mixed=True))
    def test_dimension_moves_into_speh(self, param):
        new, speh, _ = push_integral(param, canonical_order(param))
        assert all(b.zeta > 0 for b in new.blocks)
        assert new.group.N + 2 * sum(m.dimension() for m in speh) == param.group.N


class TestPushHalfIntegral:
    def test_breakpoints(self):
        assert breakpoints([]) == (0,)
        assert breakpoints([1, 1]) == (0, 2)
        assert breakpoints([1, 2, 2]) == (0, 1, 3)

    def test_no_minus_blocks(self):
        param = parameter_of([blk("3/2", "1/2")])
        (only,) = push_half_integral(param, canonical_order(param))
        assert only.k == 0 and only.param == param and not only.constraints

    def test_example(self):
        param = parameter_of([blk("5/2", "3/2", -1), blk("7/2", "3/2")])
        classes = push_half_integral(param, canonical_order(param))
        assert [c.s_sequence for c in classes] == [(0, 1), (0, 1)]
        assert classes[0].param.blocks == (blk("1/2", "1/2"), blk("7/2", "3/2"))
        assert dict(classes[0].constraints) == {}
        assert classes[1].param.blocks == (blk("3/2", "1/2"), blk("7/2", "3/2"))
        assert dict(classes[1].constraints) == {0: (0, -1)}
        sizes = [len(enumerate_indices(c.param, c.order, c.constraints)) for c in classes]
        assert sizes == [4, 2]

    def test_equal_lengths_share_one_breakpoint(self):
        param = parameter_of([blk("5/2", "3/2", -1), blk("5/2", "3/2", -1), blk("7/2", "3/2")])
        classes = push_half_integral(param, canonical_order(param))
        assert [c.k for c in classes] == [0, 1]
        assert classes[0].s_sequence == (0, 2)

    def test_zero_length_block_is_dropped(self):
        param = parameter_of([blk("1/2", "1/2", -1), blk("3/2", "1/2")])
        first = push_half_integral(param, canonical_order(param))[0]
        assert first.position_map[canonical_order(param).of("r")[0]] is None


class TestChangeSign:
    @pytest.mark.parametrize("eta, l_star, eta_star", [(1, 1, -1), (-1, 0, 1)])
    def test_single_block(self, eta, l_star, eta_star):
        param = parameter_of([blk("3/2", "1/2", -1)])
        new, index = change_sign(param, canonical_order(param), ix((0, eta)))
        assert new.blocks == (blk("5/2", "1/2"),)
        assert index == ix((l_star, eta_star))

    def test_smallest_block(self):
        param = parameter_of([blk("1/2", "1/2", -1)])
        new, index = change_sign(param, canonical_order(param), ix((0, 1)))
        assert new.blocks == (blk("3/2", "1/2"),)
        assert index == ix((1, -1))

    def test_run_must_be_chained(self):
        param = parameter_of([blk("3/2", "1/2", -1), blk("3/2", "1/2", -1)])
        with pytest.raises(ValidationError):
            change_sign(param, canonical_order(param), ix((0, 1), (1, 1)))

    def test_needs_B_one_half(self):
        param = parameter_of([blk("5/2", "3/2", -1)])
        with pytest.raises(ValidationError):
            change_sign(param, canonical_order(param), ix((0, 1)))


class TestResolveSpecial:
    def test_single_block(self):
        param = single_block(5, 3)
        res = resolve_special(param, canonical_order(param), ix((1, 1)))
        assert [rows(m) for m in res.speh] == [[("1", "3")]]
        assert res.tempered == (TemperedBlock(ORTH, 2, 2, 1),)

    def test_disjoint_blocks_stay_tempered(self):
        param = parameter_of([blk(1, 0), blk(5, 3)])
        res = resolve_special(param, canonical_order(param), ix((0, 1), (0, 1)))
        assert res.speh == ()
        assert res.tempered == (TemperedBlock(ORTH, 1, 0, 1), TemperedBlock(ORTH, 5, 3, 1))

    def test_worked_example(self):
        param = parameter_of([blk(2, 0), blk(3, 1)])
        res = resolve_special(param, canonical_order(param), ix((0, 1), (0, 1)))
        assert [(m.tag, rows(m)) for m in res.speh] == [("Itilde", [("1", "2")])]
        assert set(res.tempered) == {TemperedBlock(ORTH, 3, 2, -1), TemperedBlock(ORTH, 1, 0, 1)}
        assert res.dimension() == 24

    def test_rejects_vanishing_index(self):
        param = parameter_of([blk(2, 0), blk(3, 1)])
        with pytest.raises(ValidationError):
            resolve_special(param, canonical_order(param), ix((0, 1), (0, -1)))

    @given(special(n_max=4, A_max=6))
    def test_tempered_ranges_disjoint(self, param):
        order = canonical_order(param)
        for index in enumerate_packet(param, order):
            res = resolve_special(param, order, index)
            assert res.dimension() == param.group.N
            # neighbouring pieces of one chain may meet in a single point, never overlap further
            spans = sorted((t.B, t.A) for t in res.tempered)
            assert all(hi[0] >= lo[1] for lo, hi in zip(spans, spans[1:]))


class TestResolve:
    def test_tempered_input(self):
        param = parameter_of([blk(1, 1), blk(3, 3)])
        for el in resolve(param):
            assert el.resolution.speh == ()

    def test_push_example_provenance(self):
        param = parameter_of([blk(3, 1, -1), blk(5, 1)])
        elements = resolve(param)
        assert len(elements) == 10
        assert all(el.resolution.provenance[0] == "push-integral" for el in elements)
        assert {"push-integral", "I"} <= set().union(*(el.resolution.provenance for el in elements))

    def test_np_pair(self):
        nsd = RhoLabel("u", 1, SelfDuality.NONE)
        param = ArthurParameter.from_blocks(GroupKind(Kind.SP, 9 + 12),
                                            [block_from_ab(ORTH, 3, 3), block_from_ab(nsd, 2, 3)])
        matrix = np_speh(param.np_blocks[0])
        assert len(matrix.rows) == 3 and {r.length for r in matrix.rows} == {2}
        assert sorted(int(r.x - r.y) for r in matrix.rows) == [-2, 0, 2]
        for el in resolve(param):
            assert el.resolution.provenance[0] == "psi_np"

    def test_half_integral_classes(self):
        param = parameter_of([blk("5/2", "3/2", -1), blk("7/2", "3/2")])
        elements = resolve(param)
        assert Counter(el.classes for el in elements) == {(("r", 0),): 4, (("r", 1),): 2}
        assert len({el.phi for el in elements}) == 6

    def test_half_integral_needs_canonical_order(self):
        param = parameter_of([blk("5/2", "3/2", -1), blk("7/2", "3/2")])
        with pytest.raises(ValidationError):
            resolve(param, BlockOrder.from_mapping({"r": [1, 0]}))

    def test_preferred_order_transports_indices(self):
        param = parameter_of([blk(3, 1, -1), blk(5, 1)])
        plain = resolve(param)
        moved = resolve(param, BlockOrder.from_mapping({"r": [1, 0]}))
        assert [el.phi for el in plain] == [el.phi for el in moved]
        target = BlockOrder.from_mapping({"r": [1, 0]})
        for a, b in zip(plain, moved):
            assert b.source_index == reorder_path(param, canonical_order(param), target, a.source_index)
        assert any(a.source_index != b.source_index for a, b in zip(plain, moved))

    def test_idempotent_on_special_parameters(self):
        param = parameter_of([blk(2, 0), blk(3, 1)])
        order = canonical_order(param)
        direct = [resolve_special(param, order, i) for i in enumerate_packet(param, order)]
        assert [el.resolution for el in resolve(param)] == direct

    @settings(max_examples=40)
    @given(fixed_b(n_max=3, a_max=9, mixed=True))
    def test_dimension_and_sign(self, param):
        for el in resolve(param):
            assert isinstance(el.resolution, Resolution)
            assert el.phi.dimension() == param.group.N
            assert el.phi.epsilon_product() == 1

    def test_variants_are_all_positive(self):
        param = parameter_of([blk(3, 1, -1), blk(5, 1)])
        for var in reduction_variants(param):
            assert all(b.zeta > 0 for b in var.param.blocks)
