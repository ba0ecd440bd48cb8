"""Følner data: intervals [0, L_n) in ℤ or explicit finite sets in ℤ^d."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from flowlab.errors import DomainError

Element = Union[int, Tuple[int, ...]]


class FolnerKind(str, Enum):
    INTERVAL = "interval"
    EXPLICIT = "explicit"


def _as_tuple(g: Element) -> Tuple[int, ...]:
    return (int(g),) if isinstance(g, int) else tuple(int(x) for x in g)


@dataclass(frozen=True)
class FolnerSpec:
    """Finite sets A_1, A_2, ... of strictly increasing size."""

    kind: FolnerKind
    sizes: Tuple[int, ...]
    sets: Optional[Tuple[FrozenSet[Tuple[int, ...]], ...]] = None

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        if any(s < 1 for s in sizes):
            raise DomainError("Følner sets must be nonempty")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise DomainError(f"Følner set sizes must increase strictly: {sizes}")
        if self.kind is FolnerKind.EXPLICIT:
            if self.sets is None or len(self.sets) != len(sizes):
                raise DomainError("explicit Følner data needs one set per level")
            dims = {len(x) for s in self.sets for x in s}
            if len(dims) > 1:
                raise DomainError("all Følner set elements must have the same dimension")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def intervals(cls, sizes: Iterable[int]) -> "FolnerSpec":
        return cls(FolnerKind.INTERVAL, tuple(sizes))

    @classmethod
    def explicit(cls, sets: Iterable[Iterable[Element]]) -> "FolnerSpec":
        frozen = tuple(frozenset(_as_tuple(g) for g in s) for s in sets)
        return cls(FolnerKind.EXPLICIT, tuple(len(s) for s in frozen), frozen)

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "FolnerSpec":
        kind = payload.get("kind", "interval")
        if kind == FolnerKind.INTERVAL.value:
            return cls.intervals(payload.get("sizes", []))
        if kind == FolnerKind.EXPLICIT.value:
            return cls.explicit(payload.get("sets", []))
        raise DomainError(f"unknown Følner kind {kind!r}")

    def __len__(self) -> int:
        return len(self.sizes)

    @property
    def dimension(self) -> int:
        if self.kind is FolnerKind.INTERVAL or not self.sets or not self.sets[0]:
            return 1
        return len(next(iter(self.sets[0])))

    def contains(self, g: Element, level: int) -> bool:
        if self.kind is FolnerKind.INTERVAL:
            return 0 <= int(g) < self.sizes[level]
        return _as_tuple(g) in self.sets[level]

    def sym_diff(self, g: Element, level: int) -> int:
        """|gA △ A| for the level's set A."""
        if self.kind is FolnerKind.INTERVAL:
            return 2 * min(abs(int(g)), self.sizes[level])
        shift = _as_tuple(g)
        base = self.sets[level]
        moved = {tuple(a + s for a, s in zip(x, shift)) for x in base}
        return len(moved.symmetric_difference(base))

    def subsequence(self, levels: Sequence[int]) -> "FolnerSpec":
        if self.kind is FolnerKind.INTERVAL:
            return FolnerSpec.intervals(self.sizes[i] for i in levels)
        return FolnerSpec(
            FolnerKind.EXPLICIT,
            tuple(self.sizes[i] for i in levels),
            tuple(self.sets[i] for i in levels),
        )

    def to_dict(self) -> Dict[str, object]:
        if self.kind is FolnerKind.INTERVAL:
            return {"kind": self.kind.value, "sizes": list(self.sizes)}
        sets: List[List[List[int]]] = [[list(x) for x in sorted(s)] for s in self.sets]
        return {"kind": self.kind.value, "sets": sets}
