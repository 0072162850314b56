"""Connected labelled graphs on small vertex sets.

Vertices are 0..k-1.  The edge universe is the lexicographic list of
pairs (0,1), (0,2), ..., (k-2,k-1), and a graph is a subset of it,
represented as a bitmask over that list.  Enumeration order (ascending
mask) is part of the package contract: every reduction downstream
consumes graphs in this order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from .errors import InputError

HARD_VERTEX_LIMIT = 7  # 2^21 masks; beyond this enumeration is hopeless anyway


def edge_universe(k: int) -> Tuple[Tuple[int, int], ...]:
    """All vertex pairs in lexicographic order."""
    return tuple((i, j) for i in range(k) for j in range(i + 1, k))


def connected_count(k: int) -> int:
    """Number of connected labelled graphs on k vertices, exactly.

    Standard recurrence: subtract, over the component containing vertex
    0, the number of ways to complete the rest arbitrarily.
    """
    if k < 1:
        raise InputError("vertex count must be positive")
    counts: List[int] = [0, 1]
    for n in range(2, k + 1):
        total = 1 << (n * (n - 1) // 2)
        for j in range(1, n):
            total -= math.comb(n - 1, j - 1) * counts[j] * (1 << ((n - j) * (n - j - 1) // 2))
        counts.append(total)
    return counts[k]


_mask_cache: dict = {}


def connected_graph_masks(k: int) -> Sequence[int]:
    """Bitmasks of all connected graphs on k vertices, ascending.

    Cached per k; the k=7 list has 1,866,256 entries and is built once.
    """
    if k < 1:
        raise InputError("vertex count must be positive")
    if k > HARD_VERTEX_LIMIT:
        raise InputError(
            f"refusing to enumerate connected graphs on {k} vertices: the "
            f"count grows superexponentially in k (limit {HARD_VERTEX_LIMIT})")
    if k in _mask_cache:
        return _mask_cache[k]
    if k == 1:
        _mask_cache[k] = (0,)
        return _mask_cache[k]
    edges = edge_universe(k)
    m = len(edges)
    # per-edge masks over vertices, for the reachability sweep
    vmasks = [(1 << a) | (1 << b) for a, b in edges]
    full = (1 << k) - 1
    out = []
    for g in range(1 << m):
        reach = 1
        while True:
            grown = reach
            gg = g
            while gg:
                low = gg & -gg
                e = low.bit_length() - 1
                vm = vmasks[e]
                if vm & grown:
                    grown |= vm
                gg ^= low
            if grown == reach:
                break
            reach = grown
        if reach == full:
            out.append(g)
    _mask_cache[k] = tuple(out)
    return _mask_cache[k]


def mask_to_edges(mask: int, k: int) -> Tuple[Tuple[int, int], ...]:
    universe = edge_universe(k)
    return tuple(universe[i] for i in range(len(universe)) if mask >> i & 1)


def connected_graphs(k: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Yield the edge sets of all connected graphs on k vertices."""
    universe = edge_universe(k)
    for mask in connected_graph_masks(k):
        yield tuple(universe[i] for i in range(len(universe)) if mask >> i & 1)


@dataclass(frozen=True)
class SpanningTree:
    """Breadth-first spanning tree of a connected graph.

    ``order`` lists the vertices in discovery order; ``steps`` holds one
    (parent, child) pair per non-root vertex, in the same order, and is
    what the mesh walk consumes.
    """

    order: Tuple[int, ...]
    steps: Tuple[Tuple[int, int], ...]


def spanning_tree(edges: Sequence[Tuple[int, int]], k: int,
                  required_edge: Optional[Tuple[int, int]] = None) -> SpanningTree:
    """BFS tree rooted at vertex 0, expanding lowest indices first.

    If ``required_edge`` is given the tree is seeded with that edge (its
    lower endpoint acts as the root) and grown around it.
    """
    adj: List[List[int]] = [[] for _ in range(k)]
    eset = set()
    for a, b in edges:
        if not (0 <= a < k and 0 <= b < k and a != b):
            raise InputError(f"bad edge ({a}, {b}) for {k} vertices")
        adj[a].append(b)
        adj[b].append(a)
        eset.add((min(a, b), max(a, b)))
    for lst in adj:
        lst.sort()

    steps: List[Tuple[int, int]] = []
    if required_edge is None:
        order = [0]
        seen = {0}
        queue = [0]
    else:
        a, b = min(required_edge), max(required_edge)
        if (a, b) not in eset:
            raise InputError(f"required edge ({a}, {b}) is not in the graph")
        order = [a, b]
        steps.append((a, b))
        seen = {a, b}
        queue = [a, b]
    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                order.append(w)
                steps.append((v, w))
                queue.append(w)
    if len(order) != k:
        raise InputError("graph is not connected")
    return SpanningTree(tuple(order), tuple(steps))


def edge_labellings(num_edges: int, num_shells: int) -> Iterator[Tuple[int, ...]]:
    """All shell-label assignments for the edges, odometer order.

    Labels run 1..num_shells; the last edge varies fastest.
    """
    if num_shells < 1:
        raise InputError("need at least one shell")
    if num_edges == 0:
        yield ()
        return
    cur = [1] * num_edges
    while True:
        yield tuple(cur)
        i = num_edges - 1
        while i >= 0 and cur[i] == num_shells:
            cur[i] = 1
            i -= 1
        if i < 0:
            return
        cur[i] += 1


def chunk_ranges(total: int, chunk: int) -> List[Tuple[int, int]]:
    """Partition range(total) into fixed-size contiguous chunks.

    The partition depends only on (total, chunk), never on thread
    count, so per-chunk partial sums can be reduced in index order to
    give scheduling-independent results.
    """
    if chunk < 1:
        raise InputError("chunk size must be positive")
    return [(lo, min(lo + chunk, total)) for lo in range(0, max(total, 0), chunk)]


def partition_indices(total: int, num_chunks: int) -> List[Tuple[int, int]]:
    """Split range(total) into num_chunks contiguous near-equal pieces.

    Companion to chunk_ranges for callers that want a fixed number of
    chunks instead of a fixed chunk size.  Empty pieces are kept so the
    result always has exactly num_chunks entries.
    """
    if num_chunks < 1:
        raise InputError("chunk count must be positive")
    total = max(total, 0)
    base, extra = divmod(total, num_chunks)
    out = []
    lo = 0
    for i in range(num_chunks):
        hi = lo + base + (1 if i < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out
