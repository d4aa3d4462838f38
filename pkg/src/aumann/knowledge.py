"""Finite knowledge models: events, partitions, and common knowledge.

Worlds are indexed ``0..n-1``; an :class:`Event` is a subset of them stored as
a bit-mask. A :class:`KnowledgeModel` holds one :class:`Partition` per agent.
Agent ``i`` knows event ``E`` at world ``w`` when the cell of ``w`` in
partition ``i`` is contained in ``E``; iterating "everybody knows" to its
fixed point yields common knowledge, which (on a finite world set) is also
characterized by the meet of the agents' partitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import NotCellUnion

__all__ = [
    "Event",
    "Partition",
    "KnowledgeModel",
    "cell_of",
    "know",
    "mutual_knowledge",
    "mutual_knowledge_chain",
    "common_knowledge",
    "meet_partition",
    "common_knowledge_via_meet",
    "cell_decomposition",
]


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Event:
    """Set of worlds out of ``{0, ..., n-1}``, stored as bit-mask ``mask``."""

    mask: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"world count must be positive, got {self.n}")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask:#x} sets bits outside 0..{self.n - 1}")

    @classmethod
    def from_worlds(cls, worlds: Iterable[int], n: int) -> "Event":
        mask = 0
        for w in worlds:
            if not 0 <= w < n:
                raise ValueError(f"world {w} outside 0..{n - 1}")
            mask |= 1 << w
        return cls(mask, n)

    @classmethod
    def empty(cls, n: int) -> "Event":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "Event":
        return cls((1 << n) - 1, n)

    def worlds(self) -> tuple[int, ...]:
        return tuple(_iter_bits(self.mask))

    def _same_space(self, other: "Event") -> None:
        if self.n != other.n:
            raise ValueError(f"events over different world sets ({self.n} vs {other.n})")

    def __iter__(self) -> Iterator[int]:
        return _iter_bits(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __contains__(self, world: int) -> bool:
        return 0 <= world < self.n and self.mask >> world & 1 == 1

    def __and__(self, other: "Event") -> "Event":
        self._same_space(other)
        return Event(self.mask & other.mask, self.n)

    def __or__(self, other: "Event") -> "Event":
        self._same_space(other)
        return Event(self.mask | other.mask, self.n)

    def __sub__(self, other: "Event") -> "Event":
        self._same_space(other)
        return Event(self.mask & ~other.mask, self.n)

    def __invert__(self) -> "Event":
        return Event(self.mask ^ ((1 << self.n) - 1), self.n)

    def __le__(self, other: "Event") -> bool:
        """Subset test."""
        self._same_space(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "Event") -> bool:
        self._same_space(other)
        return self.mask & other.mask == 0

    def __repr__(self) -> str:
        return f"Event({{{', '.join(map(str, self.worlds()))}}}, n={self.n})"


@dataclass(frozen=True)
class Partition:
    """Non-empty, pairwise disjoint cells covering the full world set."""

    cells: tuple[Event, ...]

    def __post_init__(self) -> None:
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ValueError("a partition needs at least one cell")
        n = cells[0].n
        union = 0
        for k, cell in enumerate(cells):
            if cell.n != n:
                raise ValueError(f"cell {k} lives over a different world set")
            if cell.mask == 0:
                raise ValueError(f"cell {k} is empty")
            if union & cell.mask:
                raise ValueError(f"cell {k} overlaps an earlier cell")
            union |= cell.mask
        if union != (1 << n) - 1:
            raise ValueError("cells do not cover the world set")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int) -> "Partition":
        return cls(tuple(Event.from_worlds(b, n) for b in blocks))

    @property
    def n(self) -> int:
        return self.cells[0].n

    def __len__(self) -> int:
        return len(self.cells)

    @cached_property
    def _masks(self) -> tuple[int, ...]:
        return tuple(c.mask for c in self.cells)

    @cached_property
    def _cell_index(self) -> tuple[int, ...]:
        index = [0] * self.n
        for k, cell in enumerate(self.cells):
            for w in cell:
                index[w] = k
        return tuple(index)

    def cell_of(self, world: int) -> Event:
        """The unique cell containing ``world``."""
        if not 0 <= world < self.n:
            raise IndexError(f"world {world} outside 0..{self.n - 1}")
        return self.cells[self._cell_index[world]]


@dataclass(frozen=True)
class KnowledgeModel:
    """World set ``{0..n_worlds-1}`` with one partition per agent.

    Events are measured against the full power set, so any bit-mask over the
    worlds is a legal event.
    """

    n_worlds: int
    partitions: tuple[Partition, ...]

    def __post_init__(self) -> None:
        partitions = tuple(self.partitions)
        object.__setattr__(self, "partitions", partitions)
        if self.n_worlds < 1:
            raise ValueError("n_worlds must be positive")
        if not partitions:
            raise ValueError("need at least one agent")
        for i, p in enumerate(partitions):
            if p.n != self.n_worlds:
                raise ValueError(f"partition {i} covers {p.n} worlds, model has {self.n_worlds}")

    @classmethod
    def from_blocks(cls, n_worlds: int, blocks_per_agent: Iterable[Iterable[Iterable[int]]]) -> "KnowledgeModel":
        return cls(n_worlds, tuple(Partition.from_blocks(b, n_worlds) for b in blocks_per_agent))

    @property
    def n_agents(self) -> int:
        return len(self.partitions)

    def event(self, worlds: Iterable[int]) -> Event:
        return Event.from_worlds(worlds, self.n_worlds)

    def _check_agent(self, agent: int) -> None:
        if not 0 <= agent < self.n_agents:
            raise IndexError(f"agent {agent} outside 0..{self.n_agents - 1}")

    def _check_event(self, e: Event) -> None:
        if e.n != self.n_worlds:
            raise ValueError(f"event over {e.n} worlds, model has {self.n_worlds}")

    @cached_property
    def meet(self) -> Partition:
        """Meet of all agents' partitions (cached); see :func:`meet_partition`."""
        return meet_partition(self)


def cell_of(model: KnowledgeModel, agent: int, world: int) -> Event:
    """The cell of agent ``agent``'s partition containing ``world``."""
    model._check_agent(agent)
    return model.partitions[agent].cell_of(world)


def _know_mask(cell_masks: Sequence[int], e_mask: int) -> int:
    out = 0
    for c in cell_masks:
        if c & ~e_mask == 0:
            out |= c
    return out


def know(model: KnowledgeModel, agent: int, e: Event) -> Event:
    """Worlds at which the agent knows ``e``: the union of its cells inside ``e``."""
    model._check_agent(agent)
    model._check_event(e)
    return Event(_know_mask(model.partitions[agent]._masks, e.mask), model.n_worlds)


def _everybody_knows(model: KnowledgeModel, mask: int) -> int:
    acc = (1 << model.n_worlds) - 1
    for p in model.partitions:
        acc &= _know_mask(p._masks, mask)
        if not acc:
            break
    return acc


def mutual_knowledge(model: KnowledgeModel, e: Event, m: int) -> Event:
    """Degree-``m`` mutual knowledge of ``e``.

    Degree 0 is ``e`` itself; degree ``m+1`` intersects every agent's
    knowledge of the degree-``m`` set. The sequence is decreasing from degree
    1 on, so iteration stops early once it stabilizes.
    """
    if m < 0:
        raise ValueError("degree m must be nonnegative")
    model._check_event(e)
    cur = e.mask
    for _ in range(m):
        nxt = _everybody_knows(model, cur)
        if nxt == cur:
            break
        cur = nxt
    return Event(cur, model.n_worlds)


def mutual_knowledge_chain(model: KnowledgeModel, e: Event, max_iters: int | None = None) -> list[Event]:
    """The trace ``[M_1(e), ..., M_k(e)]`` up to the first stabilized degree.

    ``max_iters`` bounds the number of iterations as a safety valve; the
    chain provably stabilizes within ``n_worlds`` steps, so the default
    ``n_worlds + 1`` can only trip on a caller-supplied lower bound.
    """
    model._check_event(e)
    limit = model.n_worlds + 1 if max_iters is None else max_iters
    trace: list[Event] = []
    cur = e.mask
    for _ in range(limit):
        nxt = _everybody_knows(model, cur)
        trace.append(Event(nxt, model.n_worlds))
        if nxt == cur:
            return trace
        cur = nxt
    raise RuntimeError(f"mutual-knowledge chain did not stabilize within {limit} iterations")


def common_knowledge(model: KnowledgeModel, e: Event, max_iters: int | None = None) -> Event:
    """Common knowledge of ``e``: the stabilized value of the mutual chain.

    On a finite world set the decreasing chain reaches a fixed point within
    ``n_worlds`` iterations, and that fixed point equals the intersection of
    all mutual-knowledge degrees.
    """
    model._check_event(e)
    limit = model.n_worlds + 1 if max_iters is None else max_iters
    cur = e.mask
    for _ in range(limit):
        nxt = _everybody_knows(model, cur)
        if nxt == cur:
            return Event(cur, model.n_worlds)
        cur = nxt
    raise RuntimeError(f"common-knowledge fixpoint not reached within {limit} iterations")


def meet_partition(model: KnowledgeModel) -> Partition:
    """Finest partition coarser than every agent's partition.

    Worlds are connected when they share a cell in some agent's partition;
    the meet cells are the connected components (found by union-find).
    """
    n = model.n_worlds
    parent = list(range(n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for p in model.partitions:
        for mask in p._masks:
            worlds = list(_iter_bits(mask))
            first = find(worlds[0])
            for w in worlds[1:]:
                parent[find(w)] = first

    groups: dict[int, int] = {}
    for w in range(n):
        root = find(w)
        groups[root] = groups.get(root, 0) | (1 << w)
    cells = sorted(groups.values(), key=lambda m: (m & -m))
    return Partition(tuple(Event(m, n) for m in cells))


def common_knowledge_via_meet(model: KnowledgeModel, e: Event) -> Event:
    """Oracle for :func:`common_knowledge`: union of meet cells inside ``e``."""
    model._check_event(e)
    out = 0
    for cell in model.meet.cells:
        if cell.mask & ~e.mask == 0:
            out |= cell.mask
    return Event(out, model.n_worlds)


def cell_decomposition(model: KnowledgeModel, agent: int, f: Event) -> tuple[Event, ...]:
    """Write ``f`` as a disjoint union of agent ``agent``'s cells.

    Raises :class:`NotCellUnion` when some cell straddles the boundary of
    ``f``. Any non-empty common-knowledge set decomposes this way for every
    agent.
    """
    model._check_agent(agent)
    model._check_event(f)
    partition = model.partitions[agent]
    cells: list[Event] = []
    remaining = f.mask
    while remaining:
        w = (remaining & -remaining).bit_length() - 1
        cell = partition.cell_of(w)
        if cell.mask & ~f.mask:
            raise NotCellUnion(
                f"cell {cell.worlds()} of agent {agent} is not contained in {f.worlds()}"
            )
        cells.append(cell)
        remaining &= ~cell.mask
    return tuple(cells)
