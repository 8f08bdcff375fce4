"""Free trees: construction, parsing, traversal, classification, enumeration.

Vertices are always 0..n-1.  A tree is immutable once built; adjacency is
computed once and cached.  Enumeration of isomorphism classes composes
canonical rooted shapes rather than deduplicating labeled trees, which keeps
n = 12 (551 classes) instant.
"""

from __future__ import annotations

import functools
import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class TreeError(ValueError):
    """Raised when edge data does not describe a tree on 0..n-1."""


class ParseError(TreeError):
    """Raised when tree text cannot be parsed at all."""


@dataclass(frozen=True)
class Tree:
    """An unrooted tree on vertices 0..n-1.

    ``edges`` is stored sorted with each pair (min, max); edge order is part of
    the public contract (edge weights are reported in this order).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise TreeError(f"tree must have at least one vertex, got n={self.n}")
        norm = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        if len(norm) != self.n - 1:
            raise TreeError(
                f"tree on {self.n} vertices needs {self.n - 1} edges, got {len(norm)}"
            )
        adj: list[list[int]] = [[] for _ in range(self.n)]
        seen: set[tuple[int, int]] = set()
        for u, v in norm:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise TreeError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise TreeError(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise TreeError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            adj[u].append(v)
            adj[v].append(u)
        # Connectivity: n-1 distinct edges + connected == tree (no cycle check needed).
        if self.n > 1:
            reached = [False] * self.n
            reached[0] = True
            queue = deque([0])
            count = 1
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if not reached[y]:
                        reached[y] = True
                        count += 1
                        queue.append(y)
            if count != self.n:
                missing = min(i for i, r in enumerate(reached) if not r)
                raise TreeError(
                    f"edges do not connect all vertices (vertex {missing} unreachable)"
                )
        object.__setattr__(self, "edges", norm)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def leaves(self) -> tuple[int, ...]:
        if self.n == 1:
            return (0,)
        return tuple(v for v in range(self.n) if len(self._adj[v]) == 1)


def path_tree(n: int) -> Tree:
    """The path 0-1-...-(n-1)."""
    return Tree(n, tuple((i, i + 1) for i in range(n - 1)))


def star_tree(n: int) -> Tree:
    """The star with center 0 and leaves 1..n-1."""
    return Tree(n, tuple((0, i) for i in range(1, n)))


def parse_tree(text: str) -> Tree:
    """Parse edge-list text into a Tree.

    One ``u v`` pair per line; blank lines and ``#`` comments ignored.  An
    optional leading ``n <count>`` line pins the vertex count (needed for the
    single-vertex tree, which has no edges).
    """
    edges: list[tuple[int, int]] = []
    declared_n: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if declared_n is not None:
                raise ParseError(f"line {lineno}: duplicate 'n' header")
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'n <count>'")
            try:
                declared_n = int(parts[1])
            except ValueError:
                raise ParseError(f"line {lineno}: bad vertex count {parts[1]!r}") from None
            continue
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex in {line!r}") from None
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: negative vertex in {line!r}")
        edges.append((u, v))
    if declared_n is None:
        if not edges:
            raise ParseError("no edges and no 'n' header: cannot infer vertex count")
        declared_n = max(max(e) for e in edges) + 1
    try:
        return Tree(declared_n, tuple(edges))
    except ParseError:
        raise
    except TreeError as exc:
        raise TreeError(f"invalid tree: {exc}") from None


def format_tree(tree: Tree) -> str:
    lines = [f"n {tree.n}"]
    lines.extend(f"{u} {v}" for u, v in tree.edges)
    return "\n".join(lines) + "\n"


def bfs_order(tree: Tree, root: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return (order, parent) for a BFS from ``root``; parent[root] == -1.

    Neighbors are visited in increasing vertex order, so the result is
    deterministic.
    """
    parent = [-2] * tree.n
    parent[root] = -1
    order = [root]
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in tree.neighbors(x):
            if parent[y] == -2:
                parent[y] = x
                order.append(y)
                queue.append(y)
    return tuple(order), tuple(parent)


def _farthest(tree: Tree, src: int) -> tuple[int, tuple[int, ...]]:
    """Vertex farthest from src (lowest index on ties) and the parent array."""
    order, parent = bfs_order(tree, src)
    dist = [0] * tree.n
    for v in order[1:]:
        dist[v] = dist[parent[v]] + 1
    best = max(range(tree.n), key=lambda v: (dist[v], -v))
    return best, parent


def longest_path(tree: Tree) -> tuple[int, ...]:
    """One longest path, as a vertex sequence, via double BFS.

    Deterministic: both sweeps break distance ties toward the lowest vertex
    index, and the path is returned with the smaller endpoint first.
    """
    a, _ = _farthest(tree, 0)
    b, parent = _farthest(tree, a)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    if path[0] > path[-1]:
        path.reverse()
    return tuple(path)


def eccentricity_path(tree: Tree) -> tuple[int, ...]:
    return longest_path(tree)


def classify(tree: Tree) -> str:
    """Classify as 'caterpillar', 'lobster', or 'other'.

    A caterpillar reduces to a path (or a single vertex) when all leaves are
    removed; a lobster does so after removing leaves twice.  A caterpillar is
    never reported as a lobster even though it vacuously is one.
    """
    if _reduces_to_path(tree, 1):
        return "caterpillar"
    if _reduces_to_path(tree, 2):
        return "lobster"
    return "other"


def is_caterpillar(tree: Tree) -> bool:
    return _reduces_to_path(tree, 1)


def _reduces_to_path(tree: Tree, rounds: int) -> bool:
    alive = set(range(tree.n))
    degree = {v: tree.degree(v) for v in alive}
    for _ in range(rounds):
        if len(alive) <= 2:
            return True
        drop = {v for v in alive if degree[v] <= 1}
        alive -= drop
        for v in drop:
            for w in tree.neighbors(v):
                if w in alive:
                    degree[w] -= 1
    if len(alive) <= 2:
        return True
    return all(
        sum(1 for w in tree.neighbors(v) if w in alive) <= 2 for v in alive
    ) and _connected_subset_is_path(tree, alive)


def _connected_subset_is_path(tree: Tree, alive: set[int]) -> bool:
    ends = [v for v in alive if sum(1 for w in tree.neighbors(v) if w in alive) == 1]
    return len(ends) == 2


# ---------------------------------------------------------------------------
# Isomorphism-class enumeration.


def _partitions(n: int, maxpart: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n into non-increasing parts, each <= maxpart."""
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first, *rest)


@functools.lru_cache(maxsize=None)
def _rooted_shape_codes(size: int) -> tuple[tuple, ...]:
    """All canonical rooted-tree shapes of the given size.

    A shape is a sorted tuple of child shapes; sortedness of children at every
    level makes each shape its own canonical form, so distinct tuples are
    non-isomorphic rooted trees.
    """
    if size == 1:
        return ((),)
    shapes: list[tuple] = []
    for part in _partitions(size - 1):
        groups: dict[int, int] = {}
        for s in part:
            groups[s] = groups.get(s, 0) + 1
        pools = [
            list(itertools.combinations_with_replacement(_rooted_shape_codes(s), mult))
            for s, mult in sorted(groups.items())
        ]
        for combo in itertools.product(*pools):
            children = tuple(sorted(c for group in combo for c in group))
            shapes.append(children)
    return tuple(sorted(set(shapes)))


def count_rooted_shapes(size: int) -> int:
    return len(_rooted_shape_codes(size))


def _shape_to_edges(shape: tuple, start: int = 0) -> tuple[int, list[tuple[int, int]]]:
    """Materialize a shape as preorder-numbered edges rooted at ``start``.

    Returns (next free vertex id, edges).
    """
    edges: list[tuple[int, int]] = []
    nxt = start + 1
    for child in shape:
        edges.append((start, nxt))
        nxt, sub = _shape_to_edges(child, nxt)
        edges.extend(sub)
    return nxt, edges


def rooted_shape_tree(shape: tuple) -> Tree:
    """The tree realizing a rooted shape, root at vertex 0, preorder ids."""
    nxt, edges = _shape_to_edges(shape)
    return Tree(nxt, tuple(edges))


def _rooted_code(tree: Tree, root: int, parent: int) -> tuple:
    children = sorted(
        _rooted_code(tree, w, root) for w in tree.neighbors(root) if w != parent
    )
    return tuple(children)


def rooted_code(tree: Tree, root: int) -> tuple:
    """Canonical code of ``tree`` rooted at ``root`` (sorted-children form)."""
    return _rooted_code(tree, root, -1)


def centroids(tree: Tree) -> tuple[int, ...]:
    """The one or two centroid vertices (minimizing the largest branch)."""
    if tree.n == 1:
        return (0,)
    size = [1] * tree.n
    order, parent = bfs_order(tree, 0)
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    best_val = tree.n
    best: list[int] = []
    for v in range(tree.n):
        biggest = tree.n - size[v]  # the component on the parent side (0 for the root)
        for w in tree.neighbors(v):
            if parent[w] == v:
                biggest = max(biggest, size[w])
        if biggest < best_val:
            best_val = biggest
            best = [v]
        elif biggest == best_val:
            best.append(v)
    return tuple(sorted(best))


def canonical_tree_code(tree: Tree) -> tuple:
    """Isomorphism-invariant code: rooted code at the centroid.

    With two centroids, the minimum of the two rooted codes is used, so any two
    isomorphic trees produce identical codes.
    """
    cs = centroids(tree)
    return min(rooted_code(tree, c) for c in cs)


def enumerate_trees(n: int) -> list[Tree]:
    """One representative per isomorphism class of trees on n vertices.

    Output order is deterministic (sorted by canonical code).  Capped at
    n = 12 — enumeration is meant for desk-scale sweeps, not bulk generation.
    """
    if not 1 <= n <= 12:
        raise TreeError(f"n must be in 1..12 for enumeration, got {n}")
    seen: dict[tuple, Tree] = {}
    for shape in _rooted_shape_codes(n):
        t = rooted_shape_tree(shape)
        code = canonical_tree_code(t)
        if code not in seen:
            seen[code] = t
    return [seen[c] for c in sorted(seen)]


def count_trees(n: int) -> int:
    return len(enumerate_trees(n))


# ---------------------------------------------------------------------------
# Random trees (uniform over labeled trees) via Pruefer decoding.


def tree_from_pruefer(seq: Sequence[int], n: int | None = None) -> Tree:
    """Decode a Pruefer sequence into the labeled tree it encodes."""
    if n is None:
        n = len(seq) + 2
    if n == 1:
        if seq:
            raise TreeError("single-vertex tree has empty Pruefer sequence")
        return Tree(1, ())
    if len(seq) != n - 2:
        raise TreeError(f"Pruefer sequence for n={n} must have length {n - 2}")
    if any(not (0 <= x < n) for x in seq):
        raise TreeError("Pruefer sequence entry out of range")
    remaining = [0] * n
    for x in seq:
        remaining[x] += 1
    edges: list[tuple[int, int]] = []
    leaves = [v for v in range(n) if remaining[v] == 0]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        remaining[x] -= 1
        if remaining[x] == 0:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Tree(n, tuple(edges))


def random_tree(n: int, rng) -> Tree:
    """Uniform random labeled tree on n vertices (``rng`` is a random.Random)."""
    if n < 1:
        raise TreeError(f"n must be >= 1, got {n}")
    if n <= 2:
        return path_tree(n)
    return tree_from_pruefer([rng.randrange(n) for _ in range(n - 2)], n)


def relabel(tree: Tree, perm: Iterable[int]) -> Tree:
    """Apply a vertex permutation (perm[old] = new)."""
    p = tuple(perm)
    return Tree(tree.n, tuple((p[u], p[v]) for u, v in tree.edges))
