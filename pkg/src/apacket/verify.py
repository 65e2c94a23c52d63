"""Independent oracles and the consistency suites built on them.

The oracles here count packets by plain nested loops and re-derive every
sign and neighbour test from scratch; they share nothing with the packet
module beyond the parameter types, so a bug cannot cancel itself.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .packet import PacketIndex, canonical_index, enumerate_indices, enumerate_packet, sign_condition
from .params import (ArthurParameter, BlockOrder, Finding, GroupKind, HalfInt, JordanBlock, Kind, RhoLabel, SelfDuality,
                     ValidationError, block_from_ab, canonical_order, is_admissible_order)
from .reduce import change_sign, push_half_integral, push_integral, resolve
from .reorder import shortest_paths, swap_adjacent

IndexTuple = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass
class Report:
    suite: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, message: str) -> None:
        self.failures.append(message)

    def merge(self, other: "Report") -> None:
        self.cases += other.cases
        self.failures.extend(other.failures)

    def summary(self) -> str:
        if self.skipped is not None:
            return f"SKIP {self.suite}: {self.skipped}"
        if self.passed:
            return f"PASS {self.suite} ({self.cases} cases)"
        return f"FAIL {self.suite}: {len(self.failures)} failures in {self.cases} cases; first: {self.failures[0]}"


# Oracles

def _length(block: JordanBlock) -> int:
    return (block.A.twice - block.B.twice) // 2 + 1


def _sign(length: int, l: int, eta: int) -> int:
    return eta ** length * (-1) ** (length // 2 + l)


def _options(block: JordanBlock) -> list[tuple[int, int]]:
    length = _length(block)
    out = []
    for l in range(length // 2 + 1):
        out.append((l, 1))
        if 2 * l != length:
            out.append((l, -1))
    return out


def _neighbours_ok(lo: JordanBlock, lo_val: tuple[int, int], hi: JordanBlock, hi_val: tuple[int, int]) -> bool:
    """The neighbour criterion for a uniform-zeta chain, tried on every representative."""
    (l1, e1), (l2, e2) = lo_val, hi_val
    len1, len2 = _length(lo), _length(hi)
    reps1 = (1, -1) if 2 * l1 == len1 else (e1,)
    reps2 = (1, -1) if 2 * l2 == len2 else (e2,)
    for x in reps1:
        for y in reps2:
            if y == (-1) ** (len1 - 1) * x:
                if hi.A - l2 >= lo.A - l1 and hi.B + l2 >= lo.B + l1:
                    return True
            elif hi.B + l2 > lo.A - l1:
                return True
    return False


def _oracle_layout(param: ArthurParameter, strict: bool) -> dict[str, tuple[list[int], list[int]]] | None:
    """Per rho: (chain positions sorted by A then B, free positions), or None if no direct count applies."""
    positions: dict[str, list[int]] = {}
    for pos, blk in enumerate(param.blocks):
        positions.setdefault(blk.rho.name, []).append(pos)
    layout = {}
    for name, seq in positions.items():
        seq = sorted(seq, key=lambda p: (param.blocks[p].A, param.blocks[p].B))
        zetas = {param.blocks[p].zeta for p in seq}
        if len(zetas) == 1:
            splits = [(seq, [])]
        elif strict:
            return None
        else:
            splits = [([p for p in seq if param.blocks[p].zeta == z],
                       sorted((p for p in seq if param.blocks[p].zeta != z), key=lambda p: param.blocks[p].B))
                      for z in (-1, 1)]
        for chain, free in splits:
            if _chain_and_far(param, seq, chain, free):
                layout[name] = (chain, free)
                break
        else:
            return None
    return layout


def _chain_and_far(param: ArthurParameter, seq: list[int], chain: list[int], free: list[int]) -> bool:
    blocks = param.blocks
    if any(blocks[q].B < blocks[p].B for p, q in zip(chain, chain[1:])):
        return False
    if any(blocks[q].B <= blocks[p].A for p, q in zip(free, free[1:])):
        return False
    spread = sum(_length(blocks[p]) for p in seq)
    bound = 2 ** len(chain) * (sum(blocks[p].A for p in chain) + len(chain) * spread)
    return all(blocks[p].B > bound for p in free)


def _oracle_indices(param: ArthurParameter, layout: dict[str, tuple[list[int], list[int]]]) -> list[IndexTuple]:
    blocks = param.blocks
    found = []
    for combo in itertools.product(*(_options(b) for b in blocks)):
        total = 1
        for blk, (l, e) in zip(blocks, combo):
            total *= _sign(_length(blk), l, e)
        if total != 1:
            continue
        if all(_neighbours_ok(blocks[p], combo[p], blocks[q], combo[q])
               for chain, _ in layout.values() for p, q in zip(chain, chain[1:])):
            found.append((tuple(v[0] for v in combo), tuple(v[1] for v in combo)))
    return found


def brute_force_packet(param: ArthurParameter) -> list[IndexTuple]:
    """All canonical (l, eta) of an all-one-sign parameter, by raw loops."""
    layout = _oracle_layout(param, strict=True)
    if layout is None:
        raise ValidationError("brute force needs one zeta per rho with A and B sortable together", "special form")
    return _oracle_indices(param, layout)


def brute_force_packet_size(param: ArthurParameter) -> int:
    return len(brute_force_packet(param))


def oracle_packet(param: ArthurParameter) -> list[IndexTuple] | None:
    """Direct count for a zeta = - chain plus far-away disjoint zeta = + blocks; None when it does not apply."""
    layout = _oracle_layout(param, strict=False)
    return None if layout is None else _oracle_indices(param, layout)


def closed_form_single_block(A, B) -> int:
    length = int(HalfInt.of(A) - HalfInt.of(B)) + 1
    r = length // 2
    return r + 1 if length % 2 else 2 * (r // 2) + 1


# Parameter generators

ORTH = RhoLabel("r", 1, SelfDuality.ORTHOGONAL)
SYMP = RhoLabel("s", 2, SelfDuality.SYMPLECTIC)
NONSELFDUAL = RhoLabel("u", 1, SelfDuality.NONE)


def group_for(blocks: Sequence[JordanBlock], np_blocks: Sequence[JordanBlock] = ()) -> GroupKind:
    """The group whose dual type matches the (common) type of the given good-parity blocks."""
    N = sum(b.dimension() for b in blocks) + 2 * sum(b.dimension() for b in np_blocks)
    orthogonal = blocks[0].rho.self_dual_type.sign * (-1) ** (blocks[0].a + blocks[0].b) > 0
    if not orthogonal:
        return GroupKind(Kind.SO_ODD, N)
    return GroupKind(Kind.SP if N % 2 else Kind.SO_EVEN, N)


def parameter_of(blocks: Sequence[JordanBlock], np_blocks: Sequence[JordanBlock] = ()) -> ArthurParameter:
    return ArthurParameter(group_for(blocks, np_blocks), tuple(blocks), tuple(np_blocks))


def single_block(a: int, b: int) -> ArthurParameter:
    return parameter_of([block_from_ab(ORTH, a, b)])


def _random_family(rng: random.Random, rho: RhoLabel, integral: bool, n_max: int, a_max: int,
                   mixed: bool) -> list[JordanBlock]:
    while True:
        b = rng.randint(2 if mixed else 1, a_max)
        choices = [a for a in range(1, a_max + 1) if ((a + b) % 2 == 0) == integral]
        if mixed:
            below = [a for a in choices if a < b]
            above = [a for a in choices if a > b]
            if not below or not above:
                continue
            avals = [rng.choice(below), rng.choice(above)]
            avals += [rng.choice(choices) for _ in range(rng.randint(0, n_max - 2))]
        elif choices:
            avals = [rng.choice(choices) for _ in range(rng.randint(1, n_max))]
        else:
            continue
        return [block_from_ab(rho, a, b) for a in avals]


def random_fixed_b(rng: random.Random, integral: bool | None = None, n_max: int = 4, a_max: int = 13,
                   mixed: bool = False, extras: bool = False) -> ArthurParameter:
    """A fixed-b family on the orthogonal rho; ``extras`` may add a symplectic-rho family and a psi_np pair."""
    if integral is None:
        integral = rng.random() < 0.5
    blocks = _random_family(rng, ORTH, integral, n_max, a_max, mixed)
    np_blocks = []
    if extras and rng.random() < 0.3:
        # a symplectic rho has good parity exactly in the other integrality class
        blocks += _random_family(rng, SYMP, not integral, 2, 7, False)
    if extras and rng.random() < 0.2:
        np_blocks.append(block_from_ab(NONSELFDUAL, rng.randint(1, 4), rng.randint(1, 4)))
    return parameter_of(blocks, np_blocks)


def random_chain(rng: random.Random, integral: bool, b_max: int = 8) -> ArthurParameter:
    """Equal zeta = - blocks plus one or two far-away zeta = + blocks, all with the same b."""
    while True:
        b = rng.randint(2, b_max)
        below = [a for a in range(1, b) if ((a + b) % 2 == 0) == integral]
        if below:
            break
    minus = [block_from_ab(ORTH, rng.choice(below), b)] * rng.randint(1, 3)
    k = rng.randint(1, 2)
    spread = sum(_length(x) for x in minus) + k * b
    bound = 2 ** len(minus) * (sum(x.A for x in minus) + len(minus) * spread)
    start = HalfInt(2 * bound.floor() + 2) + (minus[0].B - minus[0].B.floor())
    plus = []
    for _ in range(k):
        plus.append(JordanBlock(ORTH, start + (b - 1), start, 1))
        start = start + b + rng.randint(0, 2)
    return parameter_of(minus + plus)


# Per-parameter checks

def _phi_key(element) -> tuple:
    return (tuple((p.key(), p.multiplicity) for p in element.phi.pieces), element.phi.epsilon)


def check_resolution(param: ArthurParameter, report: Report) -> list:
    """Resolve every element and check dimension, self-duality, the epsilon product and injectivity."""
    try:
        elements = resolve(param)
    except (Finding, ValidationError) as exc:
        report.fail(f"{_show(param)}: {type(exc).__name__}: {exc}")
        return []
    seen = {}
    for el in elements:
        label = f"{_show(param)} index {el.index} class {el.classes}"
        if el.phi.dimension() != param.group.N or el.resolution.dimension() != param.group.N:
            report.fail(f"{label}: dimension {el.phi.dimension()} != {param.group.N}")
        if el.phi.epsilon_product() != 1:
            report.fail(f"{label}: epsilon product is not +1")
        if not el.phi.is_self_dual():
            report.fail(f"{label}: phi is not self-dual")
        key = _phi_key(el)
        if key in seen:
            report.fail(f"{label}: same (phi, epsilon) as {seen[key]}")
        seen[key] = label
    return elements


def _show(param: ArthurParameter) -> str:
    return "{" + ", ".join(str(b) for b in param.blocks) + "}"


def check_bijections(param: ArthurParameter,
                     index_map: Callable[[PacketIndex], PacketIndex] | None = None) -> Report:
    """Cardinality claims of the two pushes, plus distinct (phi, epsilon) over the packet."""
    report = Report(f"bijections {_show(param)}", cases=1)
    order = canonical_order(param)
    names = [n for n in param.rho_names() if any(b.zeta < 0 for b in param.blocks_of(n))]
    direct = oracle_packet(param)
    if all(b.is_integral() for b in param.blocks):
        target, _, default_map = push_integral(param, order)
        mapping = index_map or default_map
        target_packet = set(brute_force_packet(target))
        image = set()
        source = []
        for combo in itertools.product(*(_options(b) for b in param.blocks)):
            ix = PacketIndex(tuple(v[0] for v in combo), tuple(v[1] for v in combo))
            if not sign_condition(param, ix):
                continue
            moved = mapping(ix)
            key = (moved.l, moved.eta)
            if key in target_packet:
                source.append((ix.l, ix.eta))
                image.add(key)
        if image != target_packet:
            missing = sorted(target_packet - image)
            report.fail(f"{_show(param)}: target elements {missing[:3]} have no source")
        if direct is not None and set(direct) != set(source):
            extra = sorted(set(source) ^ set(direct))
            report.fail(f"{_show(param)}: index map disagrees with the direct count at {extra[:3]}")
        size = len(target_packet)
    else:
        size = 0
        variants = [(param, canonical_order(param), {})]
        for name in names:
            nxt = []
            for p, o, cons in variants:
                for cls in push_half_integral(p, o, name):
                    moved = {cls.position_map[q]: v for q, v in cons.items()}
                    moved.update(cls.constraints)
                    nxt.append((cls.param, cls.order, moved))
            variants = nxt
        for p, o, cons in variants:
            size += len(enumerate_indices(p, o, cons))
        if direct is not None and len(direct) != size:
            report.fail(f"{_show(param)}: class images sum to {size}, direct count is {len(direct)}")
    elements = check_resolution(param, report)
    if len(elements) != size:
        report.fail(f"{_show(param)}: resolved {len(elements)} elements, expected {size}")
    return report


# Suites

def suite_single_block(a_max: int = 9) -> Report:
    report = Report("single-block packet sizes")
    for a in range(1, a_max + 1):
        for b in range(1, a_max + 1):
            param = single_block(a, b)
            report.cases += 1
            blk = param.blocks[0]
            got = len(enumerate_packet(param, canonical_order(param)))
            want = brute_force_packet_size(param)
            closed = closed_form_single_block(blk.A, blk.B)
            if not got == want == closed:
                report.fail(f"a={a}, b={b}: enumerate {got}, brute force {want}, closed form {closed}")
    return report


WORKED_PIECES = {(-1, 4): 1, (1, 4): 1, (0, 1): 1, (0, 3): 1, (0, 5): 1, (0, 7): 1}
WORKED_EPSILON = {1: 1, 3: -1, 5: -1, 7: 1}


def worked_example() -> ArthurParameter:
    return parameter_of([block_from_ab(ORTH, 3, 3), block_from_ab(ORTH, 5, 3)])


def suite_worked_example() -> Report:
    report = Report("worked example", cases=1)
    param = worked_example()
    target = PacketIndex((0, 0), (1, 1))
    matches = [el for el in resolve(param) if el.source_index == target]
    if len(matches) != 1:
        report.fail(f"index {target} resolved {len(matches)} times")
        return report
    phi = matches[0].phi
    pieces = {(p.twist.twice, p.dim): p.multiplicity for p in phi.pieces}
    eps = {dim: sign for (_, dim), sign in phi.epsilon}
    if pieces != WORKED_PIECES:
        report.fail(f"pieces {sorted(pieces)} differ from {sorted(WORKED_PIECES)}")
    if eps != WORKED_EPSILON:
        report.fail(f"epsilon {eps} differs from {WORKED_EPSILON}")
    if phi.dimension() != 24:
        report.fail(f"dimension {phi.dimension()} != 24")
    return report


def suite_resolution(cases: int = 500, seed: int = 0) -> Report:
    report = Report("dimension and sign over random fixed-b parameters")
    rng = random.Random(seed)
    for i in range(cases):
        param = random_fixed_b(rng, integral=bool(i % 2), extras=True)
        report.cases += 1
        check_resolution(param, report)
    return report


def _bijection_suite(name: str, integral: bool, cases: int, seed: int) -> Report:
    report = Report(name)
    rng = random.Random(seed)
    for i in range(cases):
        # every other case has the shape where a direct count exists
        if i % 2 == 0:
            param = random_chain(rng, integral)
        else:
            param = random_fixed_b(rng, integral=integral, n_max=4, a_max=11, mixed=True)
        report.merge(check_bijections(param))
    return report


def suite_integral_bijection(cases: int = 200, seed: int = 1) -> Report:
    return _bijection_suite("integral push bijection", True, cases, seed)


def suite_half_integral_partition(cases: int = 200, seed: int = 2) -> Report:
    return _bijection_suite("half-integral class partition", False, cases, seed)


def special_three_block(A_max: int = 6, integral: bool = True) -> Iterable[ArthurParameter]:
    offset = 0 if integral else 1
    pairs = [(A, B) for A in range(offset, 2 * A_max + 1, 2) for B in range(offset, A + 1, 2)]
    for combo in itertools.combinations_with_replacement(pairs, 3):
        if any(combo[i + 1][1] < combo[i][1] for i in range(2)):
            continue
        yield parameter_of([JordanBlock(ORTH, HalfInt(A), HalfInt(B), 1) for A, B in combo])


def suite_reorder(A_max: int = 6) -> Report:
    report = Report("change of order: involution and path independence")
    for integral in (True, False):
        for param in special_three_block(A_max, integral):
            report.cases += 1
            start = canonical_order(param)
            orders = [BlockOrder.from_mapping({"r": perm}) for perm in itertools.permutations(range(3))]
            orders = [o for o in orders if is_admissible_order(param, o)]
            for ix in enumerate_packet(param, start):
                for target in orders:
                    _check_paths(param, start, target, ix, report)
    return report


def _check_paths(param, start, target, ix, report) -> None:
    outcomes = set()
    try:
        for path in shortest_paths(start.of("r"), target.of("r")):
            order, current = start, ix
            for pos in path:
                step = swap_adjacent(param, order, current, "r", pos)
                back = swap_adjacent(param, step.order, step.index, "r", pos)
                if back.index != canonical_index(param, current) or back.order != order:
                    report.fail(f"{_show(param)} {current}: swap at {pos} is not undone ({back.index})")
                order, current = step.order, step.index
            if not sign_condition(param, current):
                report.fail(f"{_show(param)} {ix}: transported index breaks the sign condition")
            outcomes.add(current)
    except Finding as exc:
        report.fail(f"{_show(param)} {ix} to {target.of('r')}: {exc}")
        return
    if len(outcomes) > 1:
        report.fail(f"{_show(param)} {ix} to {target.of('r')}: paths disagree {sorted(map(str, outcomes))}")


def counterexample_pair(A1=5, B1=3, A2=3, B2=1) -> tuple[ArthurParameter, ArthurParameter]:
    """psi' (first block pushed) and psi'' (second block pushed) for the counterexample configuration."""
    h = HalfInt.of
    pushed_first = parameter_of([JordanBlock(ORTH, h(A1) - h(B1), h(0), 1), JordanBlock(ORTH, h(A2), h(B2), 1)])
    pushed_second = parameter_of([JordanBlock(ORTH, h(A1), h(B1), 1), JordanBlock(ORTH, h(A2) - h(B2), h(0), 1)])
    return pushed_first, pushed_second


def check_counterexample(A1=5, B1=3, A2=3, B2=1) -> Report:
    report = Report("counterexample to pushing a zeta=- block past a smaller zeta=+ block", cases=1)
    if not (A1 > B1 + B2 > A2 > A1 - B1):
        report.skipped = "hypothesis not met: need A1 > B1 + B2 > A2 > A1 - B1"
        return report
    first, second = counterexample_pair(A1, B1, A2, B2)
    n_first = brute_force_packet_size(first)
    n_second = brute_force_packet_size(second)
    # the intervals of psi'' are disjoint, so its count is the plain product under the sign condition
    counts = []
    for blk in second.blocks:
        plus = sum(1 for l, e in _options(blk) if _sign(_length(blk), l, e) == 1)
        counts.append((plus, len(_options(blk)) - plus))
    product = counts[0][0] * counts[1][0] + counts[0][1] * counts[1][1]
    if n_second != product:
        report.fail(f"psi'' count {n_second} differs from the product count {product}")
    if not n_second > n_first:
        report.fail(f"expected |psi''| > |psi'|, got {n_second} and {n_first}")
    if len(enumerate_packet(first, canonical_order(first))) != n_first:
        report.fail("enumerate_packet disagrees with brute force on psi'")
    mixed = parameter_of([JordanBlock(ORTH, HalfInt.of(A1), HalfInt.of(B1), -1),
                          JordanBlock(ORTH, HalfInt.of(A2), HalfInt.of(B2), 1)])
    try:
        push_integral(mixed, canonical_order(mixed))
        report.fail("push_integral accepted the counterexample configuration")
    except ValidationError:
        pass
    return report


def change_sign_configurations(m_max: int = 2, A_max: HalfInt = HalfInt(7)) -> Iterable[tuple[ArthurParameter, int]]:
    """(psi, m): m equal (A, 1/2, zeta) blocks, optionally under one far-away block of the other sign."""
    for m in range(1, m_max + 1):
        for twice_A in range(1, A_max.twice + 1, 2):
            for zeta in (1, -1):
                run = [JordanBlock(ORTH, HalfInt(twice_A), HalfInt(1), zeta)] * m
                yield parameter_of(run), m
                spread = sum(_length(x) for x in run) + 2
                bound = 2 ** m * (sum(x.A for x in run) + m * spread)
                far = HalfInt(2 * bound.floor() + 3)
                yield parameter_of(run + [JordanBlock(ORTH, far + 1, far, -zeta)]), m


def suite_change_sign() -> Report:
    report = Report("change sign: nonvanishing both ways and index ranges")
    for param, m in change_sign_configurations():
        order = canonical_order(param)
        seq = order.of("r")
        first = param.blocks[seq[0]]
        flip = (-1) ** ((first.A.twice - 1) // 2)
        for combo in itertools.product(*(_options(b) for b in param.blocks)):
            ls = [v[0] for v in combo]
            etas = [v[1] for v in combo]
            run = list(seq[:m])
            if any(ls[q] != ls[p] or etas[q] != flip * etas[p] for p, q in zip(run, run[1:])):
                continue
            report.cases += 1
            index = PacketIndex(tuple(ls), tuple(etas))
            try:
                star, star_index = change_sign(param, order, index)
            except (ValidationError, Finding) as exc:
                report.fail(f"{_show(param)} {index}: {exc}")
                continue
            bad = [p for p, b in enumerate(star.blocks) if not 0 <= star_index.l[p] <= _length(b) // 2]
            if bad:
                report.fail(f"{_show(param)} {index}: l* out of range at {bad} ({star_index})")
                continue
            before = _chain_nonvanishing(param, index)
            after = _chain_nonvanishing(star, star_index)
            if before != after:
                report.fail(f"{_show(param)} {index}: nonvanishing {before} before, {after} after")
    return report


def _chain_nonvanishing(param: ArthurParameter, index: PacketIndex) -> bool:
    layout = _oracle_layout(param, strict=False)
    if layout is None:
        raise Finding(f"no direct nonvanishing test for {_show(param)}")
    return all(_neighbours_ok(param.blocks[p], index.at(p), param.blocks[q], index.at(q))
               for chain, _ in layout.values() for p, q in zip(chain, chain[1:]))


def suite_determinism() -> Report:
    from .dsl import parse_parameter, serialize_result

    report = Report("determinism of serialized output", cases=1)
    text = "group SOeven N=24\nrho r dim=1 orth\nblock r a=3 b=3\nblock r a=5 b=3\n"
    runs = []
    for _ in range(2):
        param = parse_parameter(text)
        runs.append(serialize_result(param, resolve(param)))
    if runs[0] != runs[1]:
        report.fail("two runs on the same input serialized differently")
    return report


def special_sweep(n_max: int = 3, A_max: int = 4) -> Report:
    """enumerate_packet against brute force on every all-positive parameter up to the given size."""
    report = Report("enumeration against brute force")
    for integral in (True, False):
        offset = 0 if integral else 1
        pairs = [(A, B) for A in range(offset, 2 * A_max + 1, 2) for B in range(offset, A + 1, 2)]
        for n in range(1, n_max + 1):
            for combo in itertools.combinations_with_replacement(pairs, n):
                if any(combo[i + 1][1] < combo[i][1] for i in range(n - 1)):
                    continue
                param = parameter_of([JordanBlock(ORTH, HalfInt(A), HalfInt(B), 1) for A, B in combo])
                report.cases += 1
                got = {(ix.l, ix.eta) for ix in enumerate_packet(param, canonical_order(param))}
                want = set(brute_force_packet(param))
                if got != want:
                    report.fail(f"{_show(param)}: {len(got)} enumerated, {len(want)} by brute force")
    return report


def run_all(cases: int | None = None, seed: int = 0) -> list[Report]:
    """Every acceptance suite in order; ``cases`` scales the three randomized ones."""
    return [
        suite_single_block(),
        suite_worked_example(),
        suite_resolution(500 if cases is None else cases, seed),
        suite_integral_bijection(200 if cases is None else cases, seed + 1),
        suite_half_integral_partition(200 if cases is None else cases, seed + 2),
        suite_reorder(),
        check_counterexample(),
        suite_change_sign(),
        suite_determinism(),
    ]
