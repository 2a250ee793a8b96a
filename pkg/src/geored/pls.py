"""Local search over weighted MAX-SAT and its augmenting-path search problem.

Improvement is taken in the maximization sense: every step of an augmenting
path strictly increases the satisfied weight and the path ends at a local
maximum under single-variable flips.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .csp import WEIGHTED_MAXSAT, Assignment, BudgetExceeded, CspInstance, DEFAULT_BUDGET, maxsat_weight


def flip(a: Sequence[int], i: int) -> Assignment:
    return tuple(1 - x if j == i else x for j, x in enumerate(a))


def neighbors(a: Sequence[int]) -> list[Assignment]:
    """Single-flip neighbors, by ascending flipped index."""
    return [flip(a, i) for i in range(len(a))]


def _require_weighted(F: CspInstance) -> None:
    if F.kind != WEIGHTED_MAXSAT:
        raise ValueError(f"expected a weighted-maxsat instance, got {F.kind}")


def is_local_max(F: CspInstance, a: Sequence[int]) -> bool:
    _require_weighted(F)
    w = maxsat_weight(F, a)
    return all(maxsat_weight(F, b) <= w for b in neighbors(a))


@dataclass(frozen=True)
class PathWitness:
    start: Assignment
    flips: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "flips", tuple(self.flips))
        if any(not 0 <= i < len(self.start) for i in self.flips):
            raise ValueError("flip index out of range")

    @property
    def states(self) -> list[Assignment]:
        out = [self.start]
        for i in self.flips:
            out.append(flip(out[-1], i))
        return out

    def to_dict(self) -> dict:
        return {"start": list(self.start), "flips": list(self.flips)}

    @classmethod
    def from_dict(cls, d: dict) -> PathWitness:
        return cls(tuple(d["start"]), tuple(d["flips"]))


@dataclass(frozen=True)
class AStarInstance:
    """A weighted formula, a start candidate and a path-length bound ``d``."""

    base: CspInstance
    start: Assignment
    d: int

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(self.start))
        _require_weighted(self.base)
        if len(self.start) != self.base.n:
            raise ValueError("start candidate length differs from the variable count")
        if self.d < 1:
            raise ValueError("path bound must be >= 1")


def is_augmenting_path(inst: AStarInstance, w: PathWitness) -> bool:
    if w.start != inst.start or len(w.flips) > inst.d:
        return False
    states = w.states
    weights = [maxsat_weight(inst.base, s) for s in states]
    if any(a >= b for a, b in zip(weights, weights[1:])):
        return False
    return is_local_max(inst.base, states[-1])


def augmenting_paths(inst: AStarInstance, budget: int = DEFAULT_BUDGET) -> list[PathWitness]:
    """Every augmenting path of length at most ``d``, by lexicographic flip sequence.

    Branches only over strictly improving neighbors; a local maximum has none,
    so each recorded path is maximal.
    """
    n = inst.base.n
    required = sum(n**i for i in range(inst.d + 1))
    if required > budget:
        raise BudgetExceeded(required, budget, "path candidates")
    F = inst.base
    out: list[PathWitness] = []
    flips: list[int] = []

    def rec(state: Assignment, weight: int) -> None:
        if is_local_max(F, state):
            out.append(PathWitness(inst.start, tuple(flips)))
            return
        if len(flips) == inst.d:
            return
        for i in range(n):
            nxt = flip(state, i)
            w = maxsat_weight(F, nxt)
            if w > weight:
                flips.append(i)
                rec(nxt, w)
                flips.pop()

    rec(inst.start, maxsat_weight(F, inst.start))
    return out


# -- bit-level path encoding -----------------------------------------------------


@dataclass(frozen=True)
class PathEncoding:
    """One block of ``2n + 2`` bits per flip, each holding ``n + 1`` circularly consecutive ones."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    @property
    def block_length(self) -> int:
        return 2 * self.n + 2

    def bits(self, pad_to: int | None = None) -> tuple[int, ...]:
        """Concatenated blocks, right-padded with all-zero blocks up to ``pad_to`` blocks."""
        blocks = list(self.blocks)
        if pad_to is not None:
            if pad_to < len(blocks):
                raise ValueError("path longer than the padded witness length")
            blocks += [(0,) * self.block_length] * (pad_to - len(blocks))
        return tuple(b for block in blocks for b in block)

    @classmethod
    def from_bits(cls, n: int, bits: Sequence[int]) -> PathEncoding:
        size = 2 * n + 2
        if len(bits) % size:
            raise ValueError(f"bit string length {len(bits)} is not a multiple of {size}")
        blocks = [tuple(bits[i : i + size]) for i in range(0, len(bits), size)]
        while blocks and not any(blocks[-1]):
            blocks.pop()
        return cls(n, tuple(blocks))

    def to_text(self, pad_to: int | None = None) -> str:
        return "".join(map(str, self.bits(pad_to)))


def maxsat_positions(n: int) -> dict[int, int]:
    """Block offsets for the variables x_1..x_n, b_1..b_n, alpha of the MAX-SAT* image.

    ``x_j`` sits at ``j - 1`` and ``b_j`` exactly ``n + 1`` further; alpha takes
    the otherwise unused offset ``n``.
    """
    pos = {j: j for j in range(n)}
    pos.update({n + j: j + n + 1 for j in range(n)})
    pos[2 * n] = n
    return pos


def _block(n: int, start: int) -> tuple[int, ...]:
    size = 2 * n + 2
    ones = {(start + i) % size for i in range(n + 1)}
    return tuple(int(i in ones) for i in range(size))


def encode_path(w: PathWitness, positions: Mapping[int, int], n: int) -> PathEncoding:
    size = 2 * n + 2
    blocks = []
    for i in w.flips:
        if i not in positions:
            raise ValueError(f"variable {i} has no encoding position")
        p = positions[i]
        if not 0 <= p < size:
            raise ValueError(f"position {p} outside a block of length {size}")
        blocks.append(_block(n, p))
    return PathEncoding(n, tuple(blocks))


def decode_block(n: int, block: Sequence[int]) -> int:
    """Start offset of the run of ``n + 1`` circular ones in ``block``."""
    size = 2 * n + 2
    if len(block) != size or sum(block) != n + 1:
        raise ValueError(f"block {''.join(map(str, block))} does not hold {n + 1} ones")
    for p in range(size):
        if block[p] and not block[p - 1]:
            if tuple(block) == _block(n, p):
                return p
            break
    raise ValueError(f"block {''.join(map(str, block))} is not a circular run of ones")


def decode_path(enc: PathEncoding, positions: Mapping[int, int], start: Sequence[int]) -> PathWitness:
    by_pos = {p: v for v, p in positions.items()}
    flips = []
    for block in enc.blocks:
        p = decode_block(enc.n, block)
        if p not in by_pos:
            raise ValueError(f"offset {p} names no variable")
        flips.append(by_pos[p])
    return PathWitness(tuple(start), tuple(flips))
