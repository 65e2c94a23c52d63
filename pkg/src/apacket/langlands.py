"""Assembling (phi, epsilon) from segments and tempered blocks."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .params import Finding, GroupKind, HalfInt, RhoLabel, SelfDuality, ValidationError

if TYPE_CHECKING:
    from .reduce import Resolution, TemperedBlock


def dual_label(rho: RhoLabel) -> RhoLabel:
    if rho.self_dual:
        return rho
    name = rho.name[:-1] if rho.name.endswith("*") else rho.name + "*"
    return RhoLabel(name, rho.dim, SelfDuality.NONE)


@dataclass(frozen=True)
class Segment:
    """The decreasing run <x, x-1, ..., -y>."""

    rho: RhoLabel
    x: HalfInt
    y: HalfInt

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", HalfInt.of(self.x))
        object.__setattr__(self, "y", HalfInt.of(self.y))
        if not (self.x + self.y).is_integral() or self.x + self.y < 0:
            raise ValidationError(f"segment <{self.x}, ..., {-self.y}> is empty or malformed", "segment")

    @property
    def length(self) -> int:
        return int(self.x + self.y) + 1

    def __str__(self) -> str:
        return f"<{self.x}, ..., {-self.y}>"


@dataclass(frozen=True)
class LPiece:
    """rho |.|^twist (x) nu_dim with a multiplicity."""

    rho: RhoLabel
    twist: HalfInt
    dim: int
    multiplicity: int = 1

    def key(self) -> tuple[str, int, int]:
        return (self.rho.name, self.twist.twice, self.dim)

    def __str__(self) -> str:
        core = f"{self.rho.name}|.|^{self.twist} x nu_{self.dim}" if self.twist else f"{self.rho.name} x nu_{self.dim}"
        return core if self.multiplicity == 1 else f"{self.multiplicity}*({core})"


@dataclass(frozen=True)
class LanglandsParameter:
    pieces: tuple[LPiece, ...]
    epsilon: tuple[tuple[tuple[str, int], int], ...]

    def dimension(self) -> int:
        return sum(p.multiplicity * p.rho.dim * p.dim for p in self.pieces)

    def epsilon_map(self) -> dict[tuple[str, int], int]:
        return dict(self.epsilon)

    def epsilon_product(self) -> int:
        """Product of epsilon over the tempered pieces counted with multiplicity."""
        mult = {(p.rho.name, p.dim): p.multiplicity for p in self.pieces if p.twist == 0}
        total = 1
        for key, sign in self.epsilon:
            if mult.get(key, 1) % 2:
                total *= sign
        return total

    def is_self_dual(self) -> bool:
        counts = {p.key(): p.multiplicity for p in self.pieces}
        for p in self.pieces:
            name = dual_label(p.rho).name
            if counts.get((name, -p.twist.twice, p.dim)) != p.multiplicity:
                return False
        return True


def segment_to_piece(seg: Segment) -> LPiece:
    # x + y is integral, so x - y is too and (x - y)/2 has twice-value x - y
    return LPiece(seg.rho, HalfInt(int(seg.x - seg.y)), seg.length)


def tempered_to_pieces(block: "TemperedBlock") -> tuple[list[LPiece], dict[tuple[str, int], int]]:
    pieces: list[LPiece] = []
    eps: dict[tuple[str, int], int] = {}
    c = block.B
    sign = block.eta
    while c <= block.A:
        dim = c.twice + 1
        pieces.append(LPiece(block.rho, HalfInt(0), dim))
        eps[(block.rho.name, dim)] = sign
        c = c + 1
        sign = -sign
    return pieces, eps


def _merge(pieces: Iterable[LPiece]) -> tuple[LPiece, ...]:
    counts: Counter = Counter()
    labels: dict[tuple[str, int, int], LPiece] = {}
    for p in pieces:
        counts[p.key()] += p.multiplicity
        labels.setdefault(p.key(), p)
    merged = [LPiece(labels[k].rho, labels[k].twist, labels[k].dim, counts[k]) for k in counts]
    merged.sort(key=LPiece.key)
    return tuple(merged)


def assemble(resolution: "Resolution", group: GroupKind, check_sign: bool = True) -> LanglandsParameter:
    """phi = Speh rows + their duals + tempered pieces, with epsilon on the tempered part."""
    speh_pieces: list[LPiece] = []
    for matrix in resolution.speh:
        for row in matrix.rows:
            piece = segment_to_piece(row)
            speh_pieces.append(piece)
            speh_pieces.append(LPiece(dual_label(piece.rho), -piece.twist, piece.dim))
    tempered_pieces: list[LPiece] = []
    eps: dict[tuple[str, int], int] = {}
    for block in resolution.tempered:
        pieces, fragment = tempered_to_pieces(block)
        tempered_pieces.extend(pieces)
        for key, sign in fragment.items():
            if eps.setdefault(key, sign) != sign:
                raise Finding(f"tempered pieces disagree on epsilon at {key[0]} x nu_{key[1]}")
    for p in speh_pieces:
        if p.twist == 0 and (p.rho.name, p.dim) in eps:
            raise Finding(f"Speh row {p} collides with a tempered epsilon-carrying piece")
    phi = LanglandsParameter(_merge(speh_pieces + tempered_pieces), tuple(sorted(eps.items())))
    if phi.dimension() != group.N:
        raise Finding(f"phi has dimension {phi.dimension()}, expected N={group.N}")
    if not phi.is_self_dual():
        raise Finding("phi is not self-dual")
    if check_sign and phi.epsilon_product() != 1:
        raise Finding("the product of epsilon over phi is not +1")
    return phi
