"""Rooted pieces: forests hanging from external root vertices.

A piece records only the hanging vertices (0..p-1).  Roots are *outside* the
piece: ``root_edges`` lists ``(root_index, piece_vertex)`` pairs, exactly one
per connected branch, and every root index 0..num_roots-1 carries at least one
branch.  A piece therefore always has p vertices and p edges (branch edges plus
root edges), which is what makes its weight profile square against a core's.

Canonical forms identify pieces up to isomorphism that may permute roots only
when their hanging forests (and root labels, if given) agree, which is the
equivalence the labeling search is allowed to exploit.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .trees import Tree, _rooted_shape_codes, _shape_to_edges


class PieceError(ValueError):
    """Raised when data does not describe a valid rooted piece."""


@dataclass(frozen=True)
class PieceComponent:
    """One branch: the hanging subtree reached through a single root edge."""

    root: int
    attach: int
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class RootedPiece:
    p: int
    num_roots: int
    branch_edges: tuple[tuple[int, int], ...]
    root_edges: tuple[tuple[int, int], ...]
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        p, r = self.p, self.num_roots
        if p < 1:
            raise PieceError(f"piece needs at least one vertex, got p={p}")
        if r < 1:
            raise PieceError(f"piece needs at least one root, got {r}")
        norm = tuple(sorted((min(u, v), max(u, v)) for u, v in self.branch_edges))
        comp = list(range(p))

        def find(x: int) -> int:
            while comp[x] != x:
                x = comp[x]
            return x

        adj: list[list[int]] = [[] for _ in range(p)]
        seen: set[tuple[int, int]] = set()
        for u, v in norm:
            if not (0 <= u < p and 0 <= v < p):
                raise PieceError(f"branch edge ({u}, {v}) out of range for p={p}")
            if u == v:
                raise PieceError(f"self-loop at piece vertex {u}")
            if (u, v) in seen:
                raise PieceError(f"duplicate branch edge ({u}, {v})")
            seen.add((u, v))
            ru, rv = find(u), find(v)
            if ru == rv:
                raise PieceError(f"branch edges contain a cycle through ({u}, {v})")
            comp[ru] = rv
            adj[u].append(v)
            adj[v].append(u)
        roots_norm = tuple(sorted(self.root_edges))
        if len(set(roots_norm)) != len(roots_norm):
            raise PieceError("duplicate root edge")
        for ri, v in roots_norm:
            if not 0 <= ri < r:
                raise PieceError(f"root index {ri} out of range for num_roots={r}")
            if not 0 <= v < p:
                raise PieceError(f"root edge attaches to missing vertex {v}")
        n_components = p - len(norm)
        if len(roots_norm) != n_components:
            raise PieceError(
                f"piece has {n_components} branch component(s) but "
                f"{len(roots_norm)} root edge(s); need exactly one each"
            )
        if len({find(v) for _, v in roots_norm}) != n_components:
            raise PieceError("some branch component has multiple root edges")
        if {ri for ri, _ in roots_norm} != set(range(r)):
            raise PieceError("every root index must carry at least one branch")
        object.__setattr__(self, "branch_edges", norm)
        object.__setattr__(self, "root_edges", roots_norm)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    @property
    def total_edges(self) -> int:
        return len(self.branch_edges) + len(self.root_edges)

    def components(self) -> tuple[PieceComponent, ...]:
        out = []
        for ri, attach in self.root_edges:
            seen = {attach}
            queue = deque([attach])
            while queue:
                x = queue.popleft()
                for y in self._adj[x]:
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            out.append(PieceComponent(ri, attach, tuple(sorted(seen))))
        return tuple(out)


def piece_from_tree(tree: Tree, root: int) -> tuple[RootedPiece, tuple[int, ...]]:
    """View a tree as a single-root piece: everything hanging from ``root``.

    Returns the piece and a map ``piece_vertex -> original tree vertex``.
    """
    if tree.n < 2:
        raise PieceError("cannot root a single-vertex tree: the piece would be empty")
    if not 0 <= root < tree.n:
        raise PieceError(f"root {root} out of range")
    old = [v for v in range(tree.n) if v != root]
    new_of = {v: i for i, v in enumerate(old)}
    branch = tuple(
        (new_of[u], new_of[v]) for u, v in tree.edges if u != root and v != root
    )
    root_edges = tuple((0, new_of[w]) for w in tree.neighbors(root))
    return RootedPiece(tree.n - 1, 1, branch, root_edges), tuple(old)


def augmented_tree(piece: RootedPiece) -> tuple[Tree, int]:
    """For a single-root piece, the tree piece+root; the root becomes vertex p."""
    if piece.num_roots != 1:
        raise PieceError("augmented_tree needs a single-root piece")
    edges = piece.branch_edges + tuple((piece.p, v) for _, v in piece.root_edges)
    return Tree(piece.p + 1, edges), piece.p


# ---------------------------------------------------------------------------
# Canonical forms.


def _branch_code_order(
    adj: tuple[tuple[int, ...], ...], v: int, parent: int
) -> tuple[tuple, tuple[int, ...]]:
    """(canonical code, matching preorder of actual vertices) for a branch."""
    items = []
    for w in adj[v]:
        if w != parent:
            items.append(_branch_code_order(adj, w, v))
    items.sort(key=lambda t: (t[0], t[1][0]))
    code = tuple(c for c, _ in items)
    order = (v,) + tuple(x for _, o in items for x in o)
    return code, order


def group_codes(piece: RootedPiece) -> tuple[tuple, ...]:
    """Per root index, the canonical code of its hanging forest."""
    per_root: list[list[tuple[tuple, tuple[int, ...]]]] = [
        [] for _ in range(piece.num_roots)
    ]
    for ri, attach in piece.root_edges:
        per_root[ri].append(_branch_code_order(piece.adjacency, attach, -1))
    return tuple(
        tuple(sorted(c for c, _ in branches)) for branches in per_root
    )


def canonical_code(piece: RootedPiece) -> tuple:
    """Isomorphism-invariant code of the piece with interchangeable roots."""
    return tuple(sorted(group_codes(piece)))


def canonical_form(
    piece: RootedPiece, root_labels: Optional[Sequence[int]] = None
) -> tuple[tuple, tuple[int, ...]]:
    """Canonical key and the vertex order realizing it.

    The key is the sorted tuple of ``(group_code, root_label)`` pairs; two
    (piece, labels) inputs get equal keys iff an isomorphism maps one to the
    other preserving root labels.  ``order[new_index] = original vertex`` lets
    a witness labeling computed on the canonical piece be carried back.
    """
    if root_labels is not None and len(root_labels) != piece.num_roots:
        raise PieceError(
            f"expected {piece.num_roots} root labels, got {len(root_labels)}"
        )
    per_root: list[list[tuple[tuple, tuple[int, ...]]]] = [
        [] for _ in range(piece.num_roots)
    ]
    for ri, attach in piece.root_edges:
        per_root[ri].append(_branch_code_order(piece.adjacency, attach, -1))
    items = []
    for ri, branches in enumerate(per_root):
        branches.sort(key=lambda t: (t[0], t[1][0]))
        gcode = tuple(c for c, _ in branches)
        label = None if root_labels is None else root_labels[ri]
        items.append((gcode, label, ri, branches))
    items.sort(key=lambda it: (it[0], -1 if it[1] is None else it[1], it[2]))
    key = tuple((gcode, label) for gcode, label, _, _ in items)
    order = tuple(
        x for _, _, _, branches in items for _, o in branches for x in o
    )
    return key, order


def piece_from_group_codes(groups: Sequence[tuple]) -> RootedPiece:
    """Build the canonical piece whose root i hangs the forest ``groups[i]``."""
    branch_edges: list[tuple[int, int]] = []
    root_edges: list[tuple[int, int]] = []
    nxt = 0
    for ri, group in enumerate(groups):
        if not group:
            raise PieceError(f"root {ri} has an empty hanging forest")
        for branch in group:
            root_edges.append((ri, nxt))
            nxt, sub = _shape_to_edges(branch, nxt)
            branch_edges.extend(sub)
    return RootedPiece(nxt, len(groups), tuple(branch_edges), tuple(root_edges))


def piece_from_key(key: tuple) -> tuple[RootedPiece, Optional[tuple[int, ...]]]:
    """Invert ``canonical_form``: rebuild the canonical piece and root labels."""
    piece = piece_from_group_codes([g for g, _ in key])
    labels = tuple(l for _, l in key)
    if all(l is None for l in labels):
        return piece, None
    return piece, labels


# ---------------------------------------------------------------------------
# Enumeration of piece shapes.


@functools.lru_cache(maxsize=None)
def _forest_codes(size: int) -> tuple[tuple, ...]:
    """Canonical rooted-forest shapes on ``size`` vertices.

    A forest hanging below one root is exactly the child multiset of a rooted
    tree on size+1 vertices, so the codes coincide.
    """
    return _rooted_shape_codes(size + 1)


def count_forest_shapes(size: int) -> int:
    return len(_forest_codes(size))


def _group_lists(
    total: int, max_key: tuple[int, int], budget: int
) -> Iterator[tuple[tuple[int, int], ...]]:
    """Non-increasing (size, shape index) multisets with sizes summing to total."""
    if total == 0:
        yield ()
        return
    if budget == 0:
        return
    s_hi, i_hi = max_key
    for s in range(min(total, s_hi), 0, -1):
        n_codes = len(_forest_codes(s))
        i_start = i_hi if s == s_hi else n_codes - 1
        for i in range(i_start, -1, -1):
            for rest in _group_lists(total - s, (s, i), budget - 1):
                yield ((s, i), *rest)


def enumerate_rooted_forests(
    p: int, max_roots: Optional[int] = None
) -> list[RootedPiece]:
    """All piece shapes with p hanging vertices and at most max_roots roots.

    One representative per isomorphism class; ``max_roots=None`` means no cap
    (up to p roots, one branch each).  Output order is deterministic; no two
    results share a canonical code.
    """
    if not 1 <= p <= 8:
        raise PieceError(f"p must be in 1..8, got {p}")
    if max_roots is None:
        max_roots = p
    if max_roots < 1:
        raise PieceError(f"max_roots must be >= 1, got {max_roots}")
    out = []
    top = (p, len(_forest_codes(p)) - 1)
    for combo in _group_lists(p, top, min(max_roots, p)):
        groups = tuple(_forest_codes(s)[i] for s, i in combo)
        out.append(piece_from_group_codes(groups))
    return out
