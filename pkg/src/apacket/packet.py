"""The (l, eta) coordinates of a packet element and the packet they cut out.

An index stores one (l, eta) pair per good-parity block, aligned with
``ArthurParameter.blocks``.  Its meaning depends on a block order, which is
always passed alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

from .params import ArthurParameter, BlockOrder, HalfInt, JordanBlock, ValidationError


class SpecialFormError(ValidationError):
    pass


@dataclass(frozen=True)
class PacketIndex:
    l: tuple[int, ...]
    eta: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "l", tuple(self.l))
        object.__setattr__(self, "eta", tuple(self.eta))
        if len(self.l) != len(self.eta):
            raise ValidationError("l and eta must have the same length", "index shape")
        if any(e not in (1, -1) for e in self.eta):
            raise ValidationError(f"eta entries must be +1 or -1, got {self.eta}", "sign")

    def __len__(self) -> int:
        return len(self.l)

    def at(self, pos: int) -> tuple[int, int]:
        return self.l[pos], self.eta[pos]

    def replace(self, updates: Mapping[int, tuple[int, int]]) -> "PacketIndex":
        ls, etas = list(self.l), list(self.eta)
        for pos, (l, e) in updates.items():
            ls[pos], etas[pos] = l, e
        return PacketIndex(tuple(ls), tuple(etas))

    def __str__(self) -> str:
        pairs = ", ".join(f"({l},{'+' if e > 0 else '-'})" for l, e in zip(self.l, self.eta))
        return f"[{pairs}]"


def max_l(block: JordanBlock) -> int:
    return block.length // 2


def is_collapsed(block: JordanBlock, l: int) -> bool:
    """True when l = (A - B + 1)/2, where eta carries no information."""
    return 2 * l == block.length


def epsilon_sign(A, B, l: int, eta: int) -> int:
    length = int(HalfInt.of(A) - HalfInt.of(B)) + 1
    if not 0 <= l <= length // 2:
        raise ValidationError(f"l={l} outside [0, {length // 2}]", "l range")
    if eta not in (1, -1):
        raise ValidationError(f"eta must be +1 or -1, got {eta!r}", "sign")
    return _eps(length, l, eta)


def _eps(length: int, l: int, eta: int) -> int:
    value = eta if length % 2 else 1
    return -value if (length // 2 + l) % 2 else value


def check_index_shape(param: ArthurParameter, index: PacketIndex) -> None:
    if len(index) != len(param.blocks):
        raise ValidationError(
            f"index has {len(index)} entries but the parameter has {len(param.blocks)} blocks", "index shape")
    for blk, l in zip(param.blocks, index.l):
        if not 0 <= l <= max_l(blk):
            raise ValidationError(f"l={l} outside [0, {max_l(blk)}] for block {blk}", "l range")


def sign_condition(param: ArthurParameter, index: PacketIndex) -> bool:
    check_index_shape(param, index)
    total = 1
    for blk, l, e in zip(param.blocks, index.l, index.eta):
        total *= _eps(blk.length, l, e)
    return total == 1


def canonical_index(param: ArthurParameter, index: PacketIndex) -> PacketIndex:
    check_index_shape(param, index)
    etas = tuple(1 if is_collapsed(blk, l) else e for blk, l, e in zip(param.blocks, index.l, index.eta))
    return PacketIndex(index.l, etas)


def check_special_form(param: ArthurParameter, order: BlockOrder) -> None:
    """Each rho must have one common zeta and A, B nondecreasing along ``order``.

    The pipeline only feeds zeta = + here; a common zeta = - is accepted
    because the neighbour criterion never looks at the sign itself.
    """
    for name, seq in order:
        blocks = [param.blocks[p] for p in seq]
        if len({b.zeta for b in blocks}) > 1:
            raise SpecialFormError(f"blocks of {name} do not share one zeta", "special form")
        for lo, hi in zip(blocks, blocks[1:]):
            if hi.A < lo.A or hi.B < lo.B:
                raise SpecialFormError(
                    f"blocks of {name} are not nondecreasing in A and B: {lo} then {hi}", "special form")


def _pair_ok(lo: JordanBlock, l_lo: int, e_lo: int, hi: JordanBlock, l_hi: int, e_hi: int) -> bool:
    # twice-values keep the comparison in integers
    top_lo = lo.A.twice - 2 * l_lo
    bot_lo = lo.B.twice + 2 * l_lo
    top_hi = hi.A.twice - 2 * l_hi
    bot_hi = hi.B.twice + 2 * l_hi
    flip = -1 if (lo.length - 1) % 2 else 1
    etas_lo = (1, -1) if is_collapsed(lo, l_lo) else (e_lo,)
    etas_hi = (1, -1) if is_collapsed(hi, l_hi) else (e_hi,)
    for x, y in product(etas_lo, etas_hi):
        if y == flip * x:
            if top_hi >= top_lo and bot_hi >= bot_lo:
                return True
        elif bot_hi > top_lo:
            return True
    return False


def nonvanishing_special(param: ArthurParameter, order: BlockOrder, index: PacketIndex) -> bool:
    check_index_shape(param, index)
    check_special_form(param, order)
    for _, seq in order:
        for p, q in zip(seq, seq[1:]):
            if not _pair_ok(param.blocks[p], index.l[p], index.eta[p],
                            param.blocks[q], index.l[q], index.eta[q]):
                return False
    return True


def _chain_candidates(blocks: Sequence[JordanBlock],
                      forced: Sequence[tuple[int, int] | None]) -> list[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Canonical (l, eta) along one rho's ordered blocks passing every neighbour test.

    Returns (ls, etas, sign product) triples; pruning happens as soon as a
    neighbour pair fails.
    """
    out: list[tuple[tuple[int, ...], tuple[int, ...], int]] = []
    n = len(blocks)
    ls = [0] * n
    etas = [1] * n

    def options(i: int):
        blk = blocks[i]
        if forced[i] is not None:
            l, e = forced[i]
            if 0 <= l <= max_l(blk):
                yield l, (1 if is_collapsed(blk, l) else e)
            return
        for l in range(max_l(blk) + 1):
            if is_collapsed(blk, l):
                yield l, 1
            else:
                yield l, 1
                yield l, -1

    def walk(i: int, sign: int) -> None:
        if i == n:
            out.append((tuple(ls), tuple(etas), sign))
            return
        for l, e in options(i):
            if i and not _pair_ok(blocks[i - 1], ls[i - 1], etas[i - 1], blocks[i], l, e):
                continue
            ls[i], etas[i] = l, e
            walk(i + 1, sign * _eps(blocks[i].length, l, e))

    walk(0, 1)
    return out


def enumerate_indices(param: ArthurParameter, order: BlockOrder,
                      constraints: Mapping[int, tuple[int, int]] | None = None) -> list[PacketIndex]:
    """Packet indices, optionally with some block positions pinned to a given (l, eta)."""
    check_special_form(param, order)
    constraints = constraints or {}
    per_rho = []
    for _, seq in order:
        blocks = [param.blocks[p] for p in seq]
        forced = [constraints.get(p) for p in seq]
        # group by partial sign so the cross-rho product stays cheap
        by_sign: dict[int, list] = {1: [], -1: []}
        for ls, etas, sign in _chain_candidates(blocks, forced):
            by_sign[sign].append((ls, etas))
        per_rho.append((seq, by_sign))

    n = len(param.blocks)
    results: list[PacketIndex] = []

    def combine(k: int, sign: int, ls: list[int], etas: list[int]) -> None:
        if k == len(per_rho):
            if sign == 1:
                results.append(PacketIndex(tuple(ls), tuple(etas)))
            return
        seq, by_sign = per_rho[k]
        for s, items in by_sign.items():
            for cl, ce in items:
                for pos, l, e in zip(seq, cl, ce):
                    ls[pos], etas[pos] = l, e
                combine(k + 1, sign * s, ls, etas)

    combine(0, 1, [0] * n, [1] * n)
    results.sort(key=lambda ix: (ix.l, tuple(-e for e in ix.eta)))
    return results


def enumerate_packet(param: ArthurParameter, order: BlockOrder) -> list[PacketIndex]:
    """All canonical indices in range that satisfy the sign and neighbour conditions."""
    return enumerate_indices(param, order)
