"""Reduction of a fixed-b parameter to the all-positive case, and its resolution.

The pipeline per rho is: push the zeta = - blocks (integral or half-integral
recipe), enumerate the packet of the resulting all-positive parameter, then
peel off Speh matrices until only a tempered parameter is left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .langlands import LanglandsParameter, Segment, assemble
from .packet import (PacketIndex, canonical_index, check_index_shape, check_special_form, enumerate_indices,
                     nonvanishing_special, sign_condition)
from .params import (ArthurParameter, BlockOrder, Finding, HalfInt, JordanBlock, RhoLabel, ValidationError,
                     canonical_order, is_far_away, minus_one_power)
from .reorder import reorder_path

HALF = HalfInt(1)


class PushError(ValidationError):
    pass


@dataclass(frozen=True)
class SpehMatrix:
    """Rows <x, ..., -y>, <x+1, ..., -(y-1)>, ...; ``tag`` records which step produced it."""

    rho: RhoLabel
    rows: tuple[Segment, ...]
    tag: str = ""

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValidationError("a Speh matrix needs at least one row", "speh shape")
        for up, down in zip(self.rows, self.rows[1:]):
            if down.x != up.x + 1 or down.y != up.y - 1:
                raise ValidationError("consecutive Speh rows must shift both ends by +1", "speh shape")

    @classmethod
    def from_top(cls, rho: RhoLabel, x, y, count: int, tag: str = "") -> "SpehMatrix | None":
        if count <= 0:
            return None
        x, y = HalfInt.of(x), HalfInt.of(y)
        return cls(rho, tuple(Segment(rho, x + j, y - j) for j in range(count)), tag)

    def dimension(self) -> int:
        return self.rho.dim * sum(r.length for r in self.rows)

    def __str__(self) -> str:
        return f"[{self.tag}] " + " ".join(str(r) for r in self.rows)


@dataclass(frozen=True)
class TemperedBlock:
    rho: RhoLabel
    A: HalfInt
    B: HalfInt
    eta: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", HalfInt.of(self.A))
        object.__setattr__(self, "B", HalfInt.of(self.B))
        if not (self.A >= self.B >= 0) or not (self.A - self.B).is_integral():
            raise Finding(f"malformed tempered block A={self.A}, B={self.B}")
        if self.eta not in (1, -1):
            raise ValidationError("eta must be +1 or -1", "sign")

    def dimension(self) -> int:
        # sum of 2C + 1 over C = B, B+1, ..., A
        return self.rho.dim * sum(t + 1 for t in range(self.B.twice, self.A.twice + 1, 2))

    def __str__(self) -> str:
        return f"({self.rho.name}, {self.A}, {self.B}, {'+' if self.eta > 0 else '-'})"


@dataclass(frozen=True)
class Resolution:
    speh: tuple[SpehMatrix, ...]
    tempered: tuple[TemperedBlock, ...]

    @property
    def provenance(self) -> tuple[str, ...]:
        return tuple(m.tag for m in self.speh)

    def dimension(self) -> int:
        return 2 * sum(m.dimension() for m in self.speh) + sum(t.dimension() for t in self.tempered)


@dataclass(frozen=True)
class IndexMap:
    """The coordinate map of the integral push: (l, eta) carried over unchanged."""

    source: ArthurParameter
    target: ArthurParameter

    def __call__(self, index: PacketIndex) -> PacketIndex:
        check_index_shape(self.source, index)
        return canonical_index(self.target, index)

    def inverse(self, index: PacketIndex) -> PacketIndex:
        check_index_shape(self.target, index)
        return canonical_index(self.source, index)


@dataclass(frozen=True)
class HalfIntegralClassification:
    rho: str
    k: int
    s_sequence: tuple[int, ...]
    param: ArthurParameter
    order: BlockOrder
    position_map: tuple[int | None, ...]
    constraints: Mapping[int, tuple[int, int]]
    speh: tuple[SpehMatrix, ...]


def np_speh(block: JordanBlock) -> SpehMatrix:
    """The ψ_np pair (rho, a, b): rows rho|.|^{j-(b-1)/2} x nu_a for j = 0..b-1."""
    a, b = block.a, block.b
    return SpehMatrix.from_top(block.rho, HalfInt(a - b), HalfInt(a + b - 2), b, "psi_np")


def _rebuild(param: ArthurParameter, order: BlockOrder,
             replacements: Mapping[int, JordanBlock | None]) -> tuple[ArthurParameter, BlockOrder, tuple]:
    """Replace or drop blocks; returns the new parameter, order and old-to-new position map."""
    new_blocks: list[JordanBlock] = []
    position_map: list[int | None] = []
    for pos, blk in enumerate(param.blocks):
        blk = replacements.get(pos, blk)
        if blk is None:
            position_map.append(None)
        else:
            position_map.append(len(new_blocks))
            new_blocks.append(blk)
    new_param = param.with_blocks(new_blocks)
    mapping = {}
    for name, seq in order:
        mapped = [position_map[p] for p in seq if position_map[p] is not None]
        if mapped:
            mapping[name] = mapped
    return new_param, BlockOrder.from_mapping(mapping), tuple(position_map)


def _signed_family(param: ArthurParameter, order: BlockOrder, name: str) -> tuple[list[int], int]:
    """Check the shape the pushes need for one rho; returns its ordered positions and m = #(zeta = -).

    Fixed-b parameters always have this shape: A ascending, the zeta = - blocks
    first with B nonincreasing, then the zeta = + blocks with B nondecreasing.
    """
    seq = list(order.of(name))
    blocks = [param.blocks[p] for p in seq]
    minus = [b for b in blocks if b.zeta < 0]
    plus = [b for b in blocks if b.zeta > 0]
    if minus and plus and min(b.A for b in plus) < max(b.A for b in minus):
        raise PushError(
            f"rho {name}: a zeta=+ block has smaller A than a zeta=- block; this is the configuration "
            "of the known counterexample, where the push changes the packet size", "push order")
    m = len(minus)
    if any(b.zeta < 0 for b in blocks[m:]):
        raise PushError(f"rho {name}: zeta=- blocks must sit below every zeta=+ block", "push order")
    if any(hi.A < lo.A for lo, hi in zip(blocks, blocks[1:])):
        raise PushError(f"rho {name}: A must be nondecreasing along the order", "push order")
    if any(hi.B > lo.B for lo, hi in zip(minus, minus[1:])):
        raise PushError(f"rho {name}: B must be nonincreasing along the zeta=- blocks", "push shape")
    if any(hi.B < lo.B for lo, hi in zip(plus, plus[1:])):
        raise PushError(f"rho {name}: B must be nondecreasing along the zeta=+ blocks", "push shape")
    return seq, m


def push_integral(param: ArthurParameter, order: BlockOrder,
                  rhos: Sequence[str] | None = None) -> tuple[ArthurParameter, list[SpehMatrix], IndexMap]:
    names = list(param.rho_names() if rhos is None else rhos)
    replacements: dict[int, JordanBlock] = {}
    speh: list[SpehMatrix] = []
    for name in names:
        seq, m = _signed_family(param, order, name)
        for pos in seq[:m]:
            blk = param.blocks[pos]
            if not blk.is_integral():
                raise PushError(f"rho {name}: integral push needs integral A, B; got {blk}", "integrality")
            replacements[pos] = JordanBlock(blk.rho, blk.A - blk.B, HalfInt(0), 1)
            matrix = SpehMatrix.from_top(blk.rho, -blk.B, blk.A, int(blk.B), "push-integral")
            if matrix is not None:
                speh.append(matrix)
    new_param, _, _ = _rebuild(param, order, replacements)
    return new_param, speh, IndexMap(param, new_param)


def breakpoints(differences: Sequence[int]) -> tuple[int, ...]:
    """s_0 = 0 < s_1 < ... < s_l = m: the positions i with A_i - B_i != A_{i+1} - B_{i+1}."""
    m = len(differences)
    if m == 0:
        return (0,)
    inner = [i for i in range(1, m) if differences[i - 1] != differences[i]]
    return tuple([0] + inner + [m])


def push_half_integral(param: ArthurParameter, order: BlockOrder,
                       rho: str | None = None) -> list[HalfIntegralClassification]:
    if rho is None:
        candidates = [n for n in param.rho_names() if not param.blocks_of(n)[0].is_integral()]
        if len(candidates) != 1:
            raise ValidationError("name the rho to push when there is not exactly one half-integral rho", "rho")
        rho = candidates[0]
    seq, m = _signed_family(param, order, rho)
    for pos in seq:
        if param.blocks[pos].is_integral():
            raise PushError(f"rho {rho}: half-integral push needs half-integral A, B", "integrality")
    if m == 0:
        return [HalfIntegralClassification(rho, 0, (0,), param, order, tuple(range(len(param.blocks))), {}, ())]
    minus = [param.blocks[p] for p in seq[:m]]
    diffs = [int(b.A - b.B) for b in minus]
    s_seq = breakpoints(diffs)
    out = []
    for k, s_k in enumerate(s_seq):
        replacements: dict[int, JordanBlock | None] = {}
        speh: list[SpehMatrix] = []
        tag = f"push-half-integral class {k}"
        for i, (pos, blk) in enumerate(zip(seq[:m], minus), start=1):
            d = blk.A - blk.B
            if i == s_k:
                replacements[pos] = JordanBlock(blk.rho, d + HALF, HALF, 1)
                rows = (blk.B.twice - 1) // 2
            else:
                # d = 0 gives b' = 0: the block disappears into its Speh matrix
                replacements[pos] = JordanBlock(blk.rho, d - HALF, HALF, 1) if d > 0 else None
                rows = (blk.B.twice + 1) // 2
            matrix = SpehMatrix.from_top(blk.rho, -blk.B, blk.A, rows, tag)
            if matrix is not None:
                speh.append(matrix)
        new_param, new_order, position_map = _rebuild(param, order, replacements)
        constraints: dict[int, tuple[int, int]] = {}
        running = 1
        for i, (pos, blk) in enumerate(zip(seq[:m], minus), start=1):
            if i > s_k:
                break
            if position_map[pos] is not None:
                constraints[position_map[pos]] = (0, -running)
            running *= minus_one_power(int(blk.A - blk.B) + 1)
        out.append(HalfIntegralClassification(rho, k, s_seq, new_param, new_order, position_map,
                                              constraints, tuple(speh)))
    return out


def change_sign(param: ArthurParameter, order: BlockOrder, index: PacketIndex,
                rho: str | None = None) -> tuple[ArthurParameter, PacketIndex]:
    """Turn the bottom run of (A, 1/2, zeta) blocks into (A + 1, 1/2, -zeta) and move the index.

    The returned index is given by the seed and chain rules as stated; it
    is not canonicalized.
    """
    check_index_shape(param, index)
    if rho is None:
        if len(param.rho_names()) != 1:
            raise ValidationError("name the rho when the parameter has several", "rho")
        rho = param.rho_names()[0]
    seq = list(order.of(rho))
    first = param.blocks[seq[0]]
    if first.B != HALF:
        raise ValidationError("the lowest block must have B = 1/2", "change sign setup")
    m = 1
    while m < len(seq) and param.blocks[seq[m]] == first:
        m += 1
    # above the run: opposite-zeta blocks with A <= A_1, then blocks far away from all of those
    n = m
    while n < len(seq) and param.blocks[seq[n]].zeta != first.zeta and param.blocks[seq[n]].A <= first.A:
        n += 1
    near = [param.blocks[p] for p in seq[:n]]
    context = [param.blocks[p] for p in seq]
    for pos in seq[n:]:
        if not is_far_away(param.blocks[pos], near, context):
            raise ValidationError(
                f"block {param.blocks[pos]} is neither an opposite-zeta block inside the run nor far away",
                "change sign setup")
    flip = minus_one_power(int(first.A - HALF))
    for p, q in zip(seq[:m], seq[1:m]):
        if index.l[q] != index.l[p] or index.eta[q] != flip * index.eta[p]:
            raise ValidationError("index does not satisfy l_{i+1} = l_i, eta_{i+1} = (-1)^{A-1/2} eta_i",
                                  "change sign index")
    l1, e1 = index.at(seq[0])
    if 2 * l1 == first.length:
        e1 = -1
    new_l = l1 + 1 if e1 == 1 else l1
    new_e = -e1
    step = minus_one_power(int(first.A + HALF))
    updates = {}
    for pos in seq[:m]:
        updates[pos] = (new_l, new_e)
        new_e *= step
    replacements = {pos: JordanBlock(first.rho, first.A + 1, HALF, -first.zeta) for pos in seq[:m]}
    new_param, _, _ = _rebuild(param, order, replacements)
    return new_param, index.replace(updates)


def resolve_special(param: ArthurParameter, order: BlockOrder, index: PacketIndex) -> Resolution:
    check_special_form(param, order)
    if any(b.zeta < 0 for b in param.blocks):
        raise ValidationError("resolution needs every block to have zeta = +", "special form")
    if not sign_condition(param, index):
        raise ValidationError(f"index {index} fails the sign condition", "sign condition")
    if not nonvanishing_special(param, order, index):
        raise ValidationError(f"index {index} fails the nonvanishing condition", "nonvanishing")
    speh: list[SpehMatrix] = []
    tempered: list[TemperedBlock] = []
    for name, seq in order:
        blocks = [param.blocks[p] for p in seq]
        ls = [index.l[p] for p in seq]
        etas = [index.eta[p] for p in seq]
        for blk, l in zip(blocks, ls):
            matrix = SpehMatrix.from_top(blk.rho, blk.B, blk.A, l, "I")
            if matrix is not None:
                speh.append(matrix)
        tops = [blk.A - l for blk, l in zip(blocks, ls)]
        bottoms = [blk.B + l for blk, l in zip(blocks, ls)]
        n = len(blocks)
        t: dict[int, HalfInt] = {}
        delta: dict[int, HalfInt] = {}
        for j in range(n - 1):
            if tops[j] >= bottoms[j + 1]:
                t[j] = _mid(tops[j], bottoms[j + 1])
                delta[j] = HalfInt(2) if (t[j] - blocks[j].A).is_integral() else HALF
                count = int(t[j] - delta[j] - bottoms[j + 1]) + 1
                matrix = SpehMatrix.from_top(blocks[j].rho, bottoms[j + 1], tops[j], count, "Itilde")
                if matrix is not None:
                    speh.append(matrix)
        chains: list[list[int]] = [[0]] if n else []
        for j in range(n - 1):
            if j in t:
                chains[-1].append(j + 1)
            else:
                chains.append([j + 1])
        for chain in chains:
            first, last = chain[0], chain[-1]
            rho = blocks[first].rho
            if first == last:
                if tops[first] >= bottoms[first]:
                    tempered.append(TemperedBlock(rho, tops[first], bottoms[first], etas[first]))
                continue
            for j in chain:
                if j == first:
                    top, bot, sign = t[j] + delta[j] - 1, bottoms[j], etas[j]
                else:
                    bot = t[j - 1] - delta[j - 1] + 1
                    top = tops[j] if j == last else t[j] + delta[j] - 1
                    sign = minus_one_power(bot - bottoms[j]) * etas[j]
                # equal neighbours with delta = 1/2 squeeze a middle block to nothing
                if top == bot - 1:
                    continue
                tempered.append(TemperedBlock(rho, top, bot, sign))
    return Resolution(tuple(speh), tuple(tempered))


def _mid(x: HalfInt, y: HalfInt) -> HalfInt:
    total = x + y
    if total.twice % 2:
        raise Finding(f"midpoint of {x} and {y} is not in (1/2)Z")
    return HalfInt(total.twice // 2)


@dataclass(frozen=True)
class ResolvedElement:
    """One packet element with the parameter its index refers to."""

    index: PacketIndex
    classes: tuple[tuple[str, int], ...]
    target: ArthurParameter
    target_order: BlockOrder
    resolution: Resolution
    phi: LanglandsParameter
    source_index: PacketIndex | None = None


@dataclass
class _Variant:
    classes: tuple[tuple[str, int], ...]
    param: ArthurParameter
    order: BlockOrder
    speh: list[SpehMatrix] = field(default_factory=list)
    constraints: dict[int, tuple[int, int]] = field(default_factory=dict)


def reduction_variants(param: ArthurParameter) -> list[_Variant]:
    """The all-positive parameters the pipeline hands to the special case, one per class choice."""
    order = canonical_order(param)
    start = _Variant((), param, order, [np_speh(b) for b in param.np_blocks])
    variants = [start]
    for name in param.rho_names():
        blocks = param.blocks_of(name)
        if all(b.zeta > 0 for b in blocks):
            continue
        nxt = []
        for var in variants:
            if blocks[0].is_integral():
                new_param, speh, _ = push_integral(var.param, var.order, [name])
                nxt.append(_Variant(var.classes, new_param, var.order, var.speh + speh, dict(var.constraints)))
                continue
            for cls in push_half_integral(var.param, var.order, name):
                moved = {cls.position_map[p]: v for p, v in var.constraints.items()}
                moved.update(cls.constraints)
                nxt.append(_Variant(var.classes + ((name, cls.k),), cls.param, cls.order,
                                    var.speh + list(cls.speh), moved))
        variants = nxt
    return variants


def resolve(param: ArthurParameter, preferred_order: BlockOrder | None = None) -> list[ResolvedElement]:
    canonical = canonical_order(param)
    out: list[ResolvedElement] = []
    for var in reduction_variants(param):
        check_special_form(var.param, var.order)
        half_integral = bool(var.classes)
        if preferred_order is not None and half_integral:
            for name, _ in var.classes:
                if preferred_order.of(name) != canonical.of(name):
                    raise ValidationError(
                        f"rho {name}: indices of half-integral classes are only reported in the canonical order",
                        "order")
        for ix in enumerate_indices(var.param, var.order, var.constraints):
            special = resolve_special(var.param, var.order, ix)
            resolution = Resolution(tuple(var.speh) + special.speh, special.tempered)
            if resolution.dimension() != param.group.N:
                raise Finding(f"resolution of {ix} has dimension {resolution.dimension()}, expected {param.group.N}")
            phi = assemble(resolution, param.group)
            source = None
            if not half_integral:
                source = canonical_index(param, ix)
                if preferred_order is not None:
                    source = reorder_path(param, canonical, preferred_order, source)
            out.append(ResolvedElement(ix, var.classes, var.param, var.order, resolution, phi, source))
    return out
