"""The six column-built polyomino families and their gluing rules.

Every family is described by how a column of size ``j`` may be glued after
a column of size ``k``: the number of admissible vertical placements
``U(k, j)`` and, for each placement, the vertical boundary length it creates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class FamilyId(str, Enum):
    DCC = "dcc"  # directed column-convex
    CC = "cc"  # column-convex
    DC = "dc"  # directed diagonally-convex
    ST = "st"  # staircase (parallelogram)
    ES = "es"  # escalier
    WA = "wa"  # wall (bargraph)

    def __str__(self):
        return self.value


FAMILIES = tuple(FamilyId)


@dataclass(frozen=True)
class FamilySpec:
    id: FamilyId
    horizontal_increment: int
    supports_known_gf: bool
    description: str


_SPECS = {
    FamilyId.DCC: FamilySpec(FamilyId.DCC, 2, True, "directed column-convex"),
    FamilyId.CC: FamilySpec(FamilyId.CC, 2, True, "column-convex"),
    FamilyId.DC: FamilySpec(FamilyId.DC, 0, False, "directed diagonally-convex"),
    FamilyId.ST: FamilySpec(FamilyId.ST, 2, True, "staircase"),
    FamilyId.ES: FamilySpec(FamilyId.ES, 2, False, "escalier"),
    FamilyId.WA: FamilySpec(FamilyId.WA, 2, True, "wall (bargraph)"),
}


def as_family(family) -> FamilyId:
    """Coerce a string or FamilyId, raising ValueError for unknown names."""
    try:
        return FamilyId(str(family))
    except ValueError:
        names = ", ".join(f.value for f in FAMILIES)
        raise ValueError(f"unknown family {family!r}; expected one of {names}") from None


def family_spec(family) -> FamilySpec:
    return _SPECS[as_family(family)]


def horizontal_increment(family) -> int:
    """Perimeter units contributed by each column apart from vertical steps."""
    return _SPECS[as_family(family)].horizontal_increment


def gluing_count(family, k: int, j: int) -> int:
    """Number of ways to glue a column of size j after a column of size k."""
    f = as_family(family)
    if k < 1 or j < 1:
        raise ValueError("column sizes must be positive")
    if f is FamilyId.DCC:
        return k
    if f is FamilyId.CC:
        return k + j - 1
    if f is FamilyId.DC:
        return k - j + 2 if j <= k + 1 else 0
    if f is FamilyId.ST:
        return min(k, j)
    if f is FamilyId.ES:
        return 1 if j >= k - 1 else 0
    return 1


def placement_steps(family, k: int, j: int) -> list[int]:
    """Vertical perimeter created by each admissible placement of j after k.

    The list has ``gluing_count(family, k, j)`` entries. For dcc the value is
    the physical length (k - u) + |j - u| with u the attachment row of the new
    base; dc counts the diagonal-contact defect, 2 per extreme placement.
    """
    f = as_family(family)
    if f is FamilyId.DCC:
        return [(k - u) + abs(j - u) for u in range(1, k + 1)]
    if f is FamilyId.CC:
        # z: top offset of the new column, w: matching bottom offset
        return [abs(k - j + z) + abs(z) for z in range(-(k - 1), j)]
    if f is FamilyId.DC:
        n = k - j + 2
        if n <= 0:
            return []
        if n == 1:
            return [4]
        return [2, 2] + [0] * (n - 2)
    if f is FamilyId.ST:
        if j <= k:
            return [2 * w + k - j for w in range(j)]
        return [2 * z + j - k for z in range(k)]
    if f is FamilyId.ES:
        return [abs(j - k)] if j >= k - 1 else []
    return [abs(j - k)]
