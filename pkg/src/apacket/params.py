"""Exact half-integers, Jordan blocks, Arthur parameters and block orders.

Everything here is immutable.  A parameter is split at construction time
into the part whose blocks have the parity of the dual group (``blocks``)
and the part that must be paired with its dual (``np_blocks``, one
representative per pair).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union


class ValidationError(ValueError):
    """Raised when an input violates a stated invariant.

    ``invariant`` names the rule that failed so callers (the CLI, the DSL
    parser) can report it without parsing the message.
    """

    def __init__(self, message: str, invariant: str = "") -> None:
        super().__init__(message)
        self.invariant = invariant


class OrderError(ValidationError):
    pass


class Finding(RuntimeError):
    """An internal consistency check failed on otherwise valid input."""


HalfIntLike = Union["HalfInt", int, Fraction, str]


class HalfInt:
    """An element of (1/2)Z stored as twice its value."""

    __slots__ = ("twice",)

    def __init__(self, twice: int) -> None:
        if type(twice) is not int and (not isinstance(twice, int) or isinstance(twice, bool)):
            raise TypeError(f"HalfInt expects an int numerator, got {twice!r}")
        object.__setattr__(self, "twice", twice)

    def __setattr__(self, name, value):
        raise AttributeError("HalfInt is immutable")

    @classmethod
    def of(cls, value: HalfIntLike) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a half-integer")
        if isinstance(value, int):
            return cls(2 * value)
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, Fraction):
            doubled = 2 * value
            if doubled.denominator != 1:
                raise ValueError(f"{value} is not a half-integer")
            return cls(int(doubled))
        raise TypeError(f"cannot convert {value!r} to HalfInt")

    def is_integral(self) -> bool:
        return self.twice % 2 == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def floor(self) -> int:
        return self.twice // 2

    def half(self) -> "HalfInt":
        if self.twice % 2:
            raise ValueError(f"cannot halve {self} inside (1/2)Z")
        return HalfInt(self.twice // 2)

    def __int__(self) -> int:
        if self.twice % 2:
            raise ValueError(f"{self} is not integral")
        return self.twice // 2

    def __index__(self) -> int:
        return int(self)

    def __bool__(self) -> bool:
        return self.twice != 0

    def __add__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice + _twice(other))

    __radd__ = __add__

    def __sub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice - _twice(other))

    def __rsub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(_twice(other) - self.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __abs__(self) -> "HalfInt":
        return HalfInt(abs(self.twice))

    def __mul__(self, other: int) -> "HalfInt":
        if not isinstance(other, int):
            return NotImplemented
        return HalfInt(self.twice * other)

    __rmul__ = __mul__

    def _cmp_key(self, other) -> int:
        try:
            return _twice(other)
        except (TypeError, ValueError):
            raise TypeError(f"cannot compare HalfInt with {other!r}") from None

    def __eq__(self, other) -> bool:
        if type(other) is HalfInt:
            return self.twice == other.twice
        if isinstance(other, (HalfInt, int, Fraction)) and not isinstance(other, bool):
            try:
                return self.twice == _twice(other)
            except ValueError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash(Fraction(self.twice, 2))

    def __lt__(self, other) -> bool:
        return self.twice < self._cmp_key(other)

    def __le__(self, other) -> bool:
        return self.twice <= self._cmp_key(other)

    def __gt__(self, other) -> bool:
        return self.twice > self._cmp_key(other)

    def __ge__(self, other) -> bool:
        return self.twice >= self._cmp_key(other)

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def __repr__(self) -> str:
        return f"HalfInt({str(self)!r})"


def _twice(value: HalfIntLike) -> int:
    if type(value) is HalfInt:
        return value.twice
    if type(value) is int:
        return 2 * value
    return HalfInt.of(value).twice


def minus_one_power(exponent: HalfIntLike) -> int:
    """(-1)**exponent for an integral exponent."""
    t = _twice(exponent)
    if t % 2:
        raise ValueError(f"(-1)^{HalfInt(t)} is not defined")
    return -1 if (t // 2) % 2 else 1


class SelfDuality(enum.Enum):
    ORTHOGONAL = "orth"
    SYMPLECTIC = "symp"
    NONE = "nsd"

    @property
    def sign(self) -> int:
        if self is SelfDuality.NONE:
            raise ValueError("non-self-dual label has no orthogonal/symplectic sign")
        return 1 if self is SelfDuality.ORTHOGONAL else -1


@dataclass(frozen=True)
class RhoLabel:
    name: str
    dim: int
    self_dual_type: SelfDuality

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("rho label needs a name", "rho-name")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValidationError(f"rho {self.name}: dim must be a positive integer", "rho-dim")

    @property
    def self_dual(self) -> bool:
        return self.self_dual_type is not SelfDuality.NONE


def _sign(value: int) -> int:
    if value not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {value!r}", "sign")
    return value


@dataclass(frozen=True)
class JordanBlock:
    """(rho, A, B, zeta); use :func:`block_from_ab` to build from (a, b)."""

    rho: RhoLabel
    A: HalfInt
    B: HalfInt
    zeta: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", HalfInt.of(self.A))
        object.__setattr__(self, "B", HalfInt.of(self.B))
        _sign(self.zeta)
        if not (self.A >= self.B >= 0):
            raise ValidationError(f"block needs A >= B >= 0, got A={self.A}, B={self.B}", "A>=B>=0")
        if not (self.A - self.B).is_integral():
            raise ValidationError(f"block needs A - B integral, got A={self.A}, B={self.B}", "A-B integral")

    @property
    def a(self) -> int:
        return block_to_ab(self)[0]

    @property
    def b(self) -> int:
        return block_to_ab(self)[1]

    @property
    def length(self) -> int:
        """A - B + 1, the number of exponents in [B, A]."""
        return int(self.A - self.B) + 1

    def is_integral(self) -> bool:
        return self.A.is_integral()

    def dimension(self) -> int:
        a, b = block_to_ab(self)
        return self.rho.dim * a * b

    def shifted(self, t: HalfIntLike) -> "JordanBlock":
        return JordanBlock(self.rho, self.A + t, self.B + t, self.zeta)

    def __str__(self) -> str:
        sign = "+" if self.zeta > 0 else "-"
        return f"({self.rho.name}, {self.A}, {self.B}, {sign})"


def block_from_ab(rho: RhoLabel, a: int, b: int, tie: int | None = None) -> JordanBlock:
    if a < 1 or b < 1:
        raise ValidationError(f"a and b must be >= 1, got a={a}, b={b}", "a,b>=1")
    A = HalfInt(a + b - 2)
    B = HalfInt(abs(a - b))
    if a > b:
        zeta = 1
    elif a < b:
        zeta = -1
    else:
        zeta = 1 if tie is None else _sign(tie)
    return JordanBlock(rho, A, B, zeta)


def block_to_ab(block: JordanBlock) -> tuple[int, int]:
    long_side = int(block.A + block.B) + 1
    short_side = int(block.A - block.B) + 1
    if block.zeta > 0:
        return long_side, short_side
    return short_side, long_side


class Kind(enum.Enum):
    SP = "Sp"
    SO_ODD = "SOodd"
    SO_EVEN = "SOeven"


@dataclass(frozen=True)
class GroupKind:
    """The group together with N, the dimension of the dual group's standard representation."""

    kind: Kind
    N: int

    def __post_init__(self) -> None:
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", Kind(self.kind))
        # N = 0 (the trivial group) only arises as the target of a reduction
        if not isinstance(self.N, int) or self.N < 0:
            raise ValidationError(f"N must be a nonnegative integer, got {self.N!r}", "N>=0")
        want_odd = self.kind is Kind.SP
        if (self.N % 2 == 1) != want_odd:
            parity = "odd" if want_odd else "even"
            raise ValidationError(f"{self.kind.value} needs {parity} N, got N={self.N}", "N parity")

    @property
    def sigma0(self) -> bool:
        return self.kind is Kind.SO_EVEN

    @property
    def dual_sign(self) -> int:
        """+1 if the dual group is orthogonal, -1 if symplectic."""
        return -1 if self.kind is Kind.SO_ODD else 1


def block_sign(block: JordanBlock) -> int:
    """Orthogonal (+1) or symplectic (-1) type of rho x nu_a x nu_b."""
    a, b = block_to_ab(block)
    return block.rho.self_dual_type.sign * (-1 if (a + b) % 2 else 1)


def has_good_parity(block: JordanBlock, group: GroupKind) -> bool:
    return block.rho.self_dual and block_sign(block) == group.dual_sign


@dataclass(frozen=True)
class ArthurParameter:
    group: GroupKind
    blocks: tuple[JordanBlock, ...]
    np_blocks: tuple[JordanBlock, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "np_blocks", tuple(self.np_blocks))
        self.validate()

    @classmethod
    def from_blocks(cls, group: GroupKind, blocks: Iterable[JordanBlock]) -> "ArthurParameter":
        """Split ``blocks`` by parity; each wrong-parity block stands for a dual pair."""
        good, paired = [], []
        for blk in blocks:
            (good if has_good_parity(blk, group) else paired).append(blk)
        return cls(group, tuple(good), tuple(paired))

    def validate(self) -> None:
        labels: dict[str, RhoLabel] = {}
        for blk in self.blocks + self.np_blocks:
            seen = labels.setdefault(blk.rho.name, blk.rho)
            if seen != blk.rho:
                raise ValidationError(f"rho {blk.rho.name} declared twice with different data", "rho unique")
        for blk in self.blocks:
            if not has_good_parity(blk, self.group):
                raise ValidationError(f"block {blk} does not have the parity of the dual group", "parity")
        for blk in self.np_blocks:
            if has_good_parity(blk, self.group):
                raise ValidationError(f"paired block {blk} has the parity of the dual group", "parity")
        for name in self.rho_names():
            kinds = {blk.is_integral() for blk in self.blocks_of(name)}
            if len(kinds) > 1:
                raise ValidationError(f"blocks of rho {name} mix integral and half-integral A, B", "integrality")
        total = self.dimension()
        if total != self.group.N:
            raise ValidationError(f"sum of d*a*b is {total}, expected N={self.group.N}", "dimension")

    def dimension(self) -> int:
        return sum(b.dimension() for b in self.blocks) + 2 * sum(b.dimension() for b in self.np_blocks)

    def rho_names(self) -> list[str]:
        """Names of rho carrying good-parity blocks, in order of first appearance."""
        return list(dict.fromkeys(b.rho.name for b in self.blocks))

    def rho(self, name: str) -> RhoLabel:
        for blk in self.blocks + self.np_blocks:
            if blk.rho.name == name:
                return blk.rho
        raise KeyError(name)

    def positions_of(self, name: str) -> list[int]:
        return [i for i, b in enumerate(self.blocks) if b.rho.name == name]

    def blocks_of(self, name: str) -> list[JordanBlock]:
        return [b for b in self.blocks if b.rho.name == name]

    def with_blocks(self, blocks: Sequence[JordanBlock], np_blocks: Sequence[JordanBlock] | None = None,
                    N: int | None = None) -> "ArthurParameter":
        """Copy with new blocks; N defaults to the new total dimension."""
        np_part = self.np_blocks if np_blocks is None else tuple(np_blocks)
        total = sum(b.dimension() for b in blocks) + 2 * sum(b.dimension() for b in np_part)
        group = GroupKind(self.group.kind, total if N is None else N)
        return ArthurParameter(group, tuple(blocks), np_part)


@dataclass(frozen=True)
class BlockOrder:
    """Per-rho sequences of positions into ``ArthurParameter.blocks``, lowest first."""

    sequences: tuple[tuple[str, tuple[int, ...]], ...] = field(default=())

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Sequence[int]]) -> "BlockOrder":
        return cls(tuple((name, tuple(seq)) for name, seq in mapping.items()))

    @classmethod
    def as_given(cls, param: ArthurParameter) -> "BlockOrder":
        return cls.from_mapping({name: param.positions_of(name) for name in param.rho_names()})

    def of(self, name: str) -> tuple[int, ...]:
        for key, seq in self.sequences:
            if key == name:
                return seq
        raise KeyError(name)

    def names(self) -> list[str]:
        return [key for key, _ in self.sequences]

    def replace(self, name: str, seq: Sequence[int]) -> "BlockOrder":
        return BlockOrder(tuple((k, tuple(seq) if k == name else s) for k, s in self.sequences))

    def __iter__(self) -> Iterator[tuple[str, tuple[int, ...]]]:
        return iter(self.sequences)


def _check_order_shape(param: ArthurParameter, order: BlockOrder) -> None:
    if sorted(order.names()) != sorted(param.rho_names()):
        raise OrderError("order must list exactly the rho of the parameter", "order shape")
    for name, seq in order:
        if sorted(seq) != param.positions_of(name):
            raise OrderError(f"order for {name} is not a permutation of its blocks", "order shape")


def dominates(high: JordanBlock, low: JordanBlock) -> bool:
    """True if admissibility forces ``high`` above ``low``."""
    return high.A > low.A and high.B > low.B and high.zeta == low.zeta


def is_admissible_order(param: ArthurParameter, order: BlockOrder) -> bool:
    _check_order_shape(param, order)
    for _, seq in order:
        for i, lo in enumerate(seq):
            for hi in seq[i + 1:]:
                if dominates(param.blocks[lo], param.blocks[hi]):
                    return False
    return True


def canonical_order(param: ArthurParameter) -> BlockOrder:
    """Sort each rho by A, then B, then zeta = -1 first; raise if that is not admissible."""

    def key(pos: int):
        blk = param.blocks[pos]
        return (blk.A.twice, blk.B.twice, blk.zeta)

    order = BlockOrder.from_mapping(
        {name: sorted(param.positions_of(name), key=key) for name in param.rho_names()})
    if not is_admissible_order(param, order):
        raise OrderError("the sorted order is not admissible for this multiset of blocks", "admissible")
    return order


def is_far_away(block: JordanBlock, J: Iterable[JordanBlock], context: Iterable[JordanBlock]) -> bool:
    J = list(J)
    spread = sum((c.A - c.B + 1 for c in context), HalfInt(0))
    bound = (sum((j.A for j in J), HalfInt(0)) + spread * len(J)) * (2 ** len(J))
    return block.B > bound


def dominate_shift(param: ArthurParameter, order: BlockOrder,
                   shifts: Mapping[int, HalfIntLike]) -> ArthurParameter:
    """Shift block ``i`` to (A + T_i, B + T_i); keeps ``order`` and checks it stays admissible."""
    new_blocks = list(param.blocks)
    for pos, t in shifts.items():
        t = HalfInt.of(t)
        if not t.is_integral() or t < 0:
            raise ValidationError(f"shift for block {pos} must be a nonnegative integer, got {t}", "shift")
        new_blocks[pos] = param.blocks[pos].shifted(t)
    shifted = param.with_blocks(new_blocks)
    if not is_admissible_order(shifted, order):
        raise OrderError("shifted parameter makes the order inadmissible", "admissible")
    return shifted
