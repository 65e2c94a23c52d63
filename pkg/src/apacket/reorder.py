"""Moving a packet index between admissible orders by adjacent swaps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .packet import PacketIndex, canonical_index, check_index_shape, max_l
from .params import (ArthurParameter, BlockOrder, Finding, JordanBlock, OrderError, ValidationError,
                     is_admissible_order, minus_one_power)


@dataclass(frozen=True)
class SwapResult:
    order: BlockOrder
    index: PacketIndex
    case: str


def _contains(outer: JordanBlock, inner: JordanBlock) -> bool:
    return outer.B <= inner.B and inner.A <= outer.A


def _outer_on_top(inner: JordanBlock, l1: int, e1: int, outer: JordanBlock, l2: int, e2: int):
    """Swap with the larger interval starting above; yields new values and the case label."""
    d1 = int(inner.A - inner.B)
    d2 = int(outer.A - outer.B)
    new_e1 = minus_one_power(d2) * e1
    if e2 != minus_one_power(d1) * e1:
        yield l1, new_e1, l2 - (d1 - 2 * l1 + 1), e1, "1a"
        return
    l2_b = l2 + d1 - 2 * l1 + 1
    if l2_b <= max_l(outer):
        yield l1, new_e1, l2_b, -e1, "1b"
    else:
        yield l1, new_e1, d2 - d1 - l2 + 2 * l1, e1, "1c"


def _outer_below(inner: JordanBlock, l1: int, e1: int, outer: JordanBlock, l2: int, e2: int):
    """Inverse of :func:`_outer_on_top`: the smaller interval starts above."""
    d1 = int(inner.A - inner.B)
    d2 = int(outer.A - outer.B)
    old_e1 = minus_one_power(d2) * e1
    if e1 != minus_one_power(d2) * e2:
        yield l1, old_e1, l2 - (d1 - 2 * l1 + 1), minus_one_power(d1) * old_e1, "1b"
        return
    yield l1, old_e1, l2 + d1 - 2 * l1 + 1, -minus_one_power(d1) * old_e1, "1a"
    l2_c = d2 - d1 - l2 + 2 * l1
    # case 1c is only ever produced when case 1b would have left the range
    if l2_c + d1 - 2 * l1 + 1 > max_l(outer):
        yield l1, old_e1, l2_c, minus_one_power(d1) * old_e1, "1c"


def _eta_choices(block: JordanBlock, l: int, eta: int) -> tuple[int, ...]:
    return (1, -1) if 2 * l == block.length else (eta,)


def swap_adjacent(param: ArthurParameter, order: BlockOrder, index: PacketIndex,
                  rho: str, position: int) -> SwapResult:
    """Exchange the blocks at ``position`` and ``position + 1`` of ``rho``'s sequence.

    At a collapse point both values of eta name the same element, so every
    choice is pushed through the formulas; the in-range results must agree
    after canonicalization.
    """
    check_index_shape(param, index)
    index = canonical_index(param, index)
    seq = list(order.of(rho))
    if not 0 <= position < len(seq) - 1:
        raise ValidationError(f"no adjacent pair at position {position} for {rho}", "swap position")
    p, q = seq[position], seq[position + 1]
    lo, hi = param.blocks[p], param.blocks[q]
    seq[position], seq[position + 1] = q, p
    new_order = order.replace(rho, seq)
    if not is_admissible_order(param, new_order):
        raise OrderError(f"swapping {lo} and {hi} gives an inadmissible order", "admissible")
    lp, lq = index.l[p], index.l[q]
    results: dict[PacketIndex, str] = {}
    for ep in _eta_choices(lo, lp, index.eta[p]):
        for eq in _eta_choices(hi, lq, index.eta[q]):
            if lo.zeta != hi.zeta:
                d_lo = int(lo.A - lo.B)
                d_hi = int(hi.A - hi.B)
                outcomes = [((lp, -minus_one_power(d_hi) * ep), (lq, -minus_one_power(d_lo) * eq), "2")]
            elif _contains(hi, lo):
                outcomes = [((l1, e1), (l2, e2), case)
                            for l1, e1, l2, e2, case in _outer_on_top(lo, lp, ep, hi, lq, eq)]
            else:
                outcomes = [((l2, e2), (l1, e1), case)
                            for l1, e1, l2, e2, case in _outer_below(hi, lq, eq, lo, lp, ep)]
            for new_p, new_q, case in outcomes:
                if 0 <= new_p[0] <= max_l(lo) and 0 <= new_q[0] <= max_l(hi):
                    results.setdefault(canonical_index(param, index.replace({p: new_p, q: new_q})), case)
    if not results:
        raise Finding(f"change of order leaves the range of l for {lo} and {hi}; the source index is probably zero")
    if len(results) > 1:
        raise Finding(f"change of order for {lo} and {hi} has {len(results)} distinct outcomes")
    (new_index, case), = results.items()
    return SwapResult(new_order, new_index, case)


def bubble_path(start: Sequence[int], target: Sequence[int]) -> list[int]:
    """Positions of adjacent swaps turning ``start`` into ``target`` (leftmost inversion first)."""
    rank = {pos: i for i, pos in enumerate(target)}
    if sorted(start) != sorted(target):
        raise OrderError("orders do not list the same blocks", "order shape")
    seq = list(start)
    path = []
    changed = True
    while changed:
        changed = False
        for i in range(len(seq) - 1):
            if rank[seq[i]] > rank[seq[i + 1]]:
                seq[i], seq[i + 1] = seq[i + 1], seq[i]
                path.append(i)
                changed = True
                break
    return path


def shortest_paths(start: Sequence[int], target: Sequence[int]) -> Iterator[list[int]]:
    """Every minimal swap sequence from ``start`` to ``target``."""
    rank = {pos: i for i, pos in enumerate(target)}

    def walk(seq: list[int]) -> Iterator[list[int]]:
        moves = [i for i in range(len(seq) - 1) if rank[seq[i]] > rank[seq[i + 1]]]
        if not moves:
            yield []
            return
        for i in moves:
            nxt = list(seq)
            nxt[i], nxt[i + 1] = nxt[i + 1], nxt[i]
            for rest in walk(nxt):
                yield [i] + rest

    yield from walk(list(start))


def reorder_path(param: ArthurParameter, order_from: BlockOrder, order_to: BlockOrder,
                 index: PacketIndex, path: Sequence[tuple[str, int]] | None = None) -> PacketIndex:
    """Transport ``index`` from ``order_from`` to ``order_to``.

    Without ``path`` a bubble-sort path is used per rho; with one, the given
    (rho, position) swaps are applied and must end at ``order_to``.
    """
    for o in (order_from, order_to):
        if not is_admissible_order(param, o):
            raise OrderError("both orders must be admissible", "admissible")
    if path is None:
        path = [(name, i) for name, seq in order_from
                for i in bubble_path(seq, order_to.of(name))]
    order, current = order_from, canonical_index(param, index)
    for name, position in path:
        step = swap_adjacent(param, order, current, name, position)
        order, current = step.order, step.index
    if any(order.of(name) != order_to.of(name) for name in order_to.names()):
        raise OrderError("swap path does not end at the target order", "swap path")
    return current
