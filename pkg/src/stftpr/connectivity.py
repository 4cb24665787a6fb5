"""Support-connectivity partitions, cyclic and on the integer line."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import StftprError


@dataclass(frozen=True)
class ConnectivityPartition:
    """Disjoint components of a support set under a gap relation.

    Components are ordered by smallest member; an empty support yields zero
    components and counts as connected.
    """

    relation: str
    components: tuple[tuple[int, ...], ...]
    universe: tuple[int, ...]

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def component_of(self, j: int) -> int:
        for i, comp in enumerate(self.components):
            if j in comp:
                return i
        raise KeyError(f"index {j} not in partition universe")

    def to_json(self) -> dict:
        return {"relation": self.relation, "components": [list(c) for c in self.components]}


class _DisjointSet:
    """Union-find with path compression and union by size."""

    def __init__(self, items: Iterable[int]):
        self._parent = {j: j for j in items}
        self._size = {j: 1 for j in self._parent}

    def find(self, j: int) -> int:
        parent = self._parent
        root = j
        while parent[root] != root:
            root = parent[root]
        while parent[j] != root:
            parent[j], j = root, parent[j]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def groups(self) -> tuple[tuple[int, ...], ...]:
        buckets: dict[int, list[int]] = {}
        for j in self._parent:
            buckets.setdefault(self.find(j), []).append(j)
        comps = [tuple(sorted(members)) for members in buckets.values()]
        return tuple(sorted(comps, key=lambda c: c[0]))


def _partition(support: set[int], deltas: Iterable[int], members_fn, relation: str) -> ConnectivityPartition:
    dsu = _DisjointSet(support)
    for j in support:
        for delta in deltas:
            other = members_fn(j, delta)
            if other in support:
                dsu.union(j, other)
    return ConnectivityPartition(relation, dsu.groups(), tuple(sorted(support)))


def components_mod_d(support: Iterable[int], d: int, L: int) -> ConnectivityPartition:
    """Partition of a support in Z_d under cyclic distance <= L."""
    if not (0 <= L < d / 2):
        raise StftprError(f"gap bound out of range: need 0 <= L < d/2, got L={L}, d={d}")
    supp = {int(j) for j in support}
    if any(j < 0 or j >= d for j in supp):
        raise StftprError(f"support must lie in 0..{d - 1}")
    relation = f"L-mod-d(d={d},L={L})"
    return _partition(supp, range(1, L + 1), lambda j, delta: (j + delta) % d, relation)


def components_line(support: Iterable[int], gaps) -> ConnectivityPartition:
    """Partition of an integer support with steps restricted to a gap set.

    ``gaps`` is either an integer L (allowed steps: magnitudes 1..L) or any
    object with a ``members`` collection of allowed signed differences, e.g. a
    window difference set.
    """
    supp = {int(j) for j in support}
    if isinstance(gaps, int):
        deltas = range(1, gaps + 1)
        relation = f"L-line(L={gaps})"
    else:
        members = {int(k) for k in gaps.members}
        deltas = sorted(k for k in members if k > 0)
        relation = f"g-line(D={deltas})"
    return _partition(supp, deltas, lambda j, delta: j + delta, relation)
