"""Splitting a tree into a core plus a small rooted piece.

A split removes whole hanging components near an end of a longest path and
re-roots them on the vertices they hung from.  Plans come out in preference
order — single root with the exact target size, single root one short, then
two roots — and each plan carries the core, the piece, and the index maps
needed to paste a combined labeling back onto the original tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .pieces import RootedPiece
from .trees import Tree, longest_path

VALID_TARGETS = (5, 6, 7)


class SplitError(Exception):
    """Raised for invalid split requests or plan/tree mismatches."""


@dataclass(frozen=True)
class SplitPlan:
    """One way to cut a tree into core + rooted piece.

    ``roots`` are original-tree vertices (kept in the core) in piece root
    order; ``core_map``/``piece_map`` send core/piece indices back to
    original vertices; ``root_core_vertices[ri]`` is the core index of root
    ri, where the piece's root labels will be read from.
    """

    target: int
    kind: str
    roots: tuple[int, ...]
    core: Tree
    piece: RootedPiece
    core_map: tuple[int, ...]
    piece_map: tuple[int, ...]
    root_core_vertices: tuple[int, ...]

    def original_edges(self) -> frozenset[tuple[int, int]]:
        """The edge set of the tree this plan was cut from."""
        edges = set()
        for u, v in self.core.edges:
            a, b = self.core_map[u], self.core_map[v]
            edges.add((min(a, b), max(a, b)))
        for u, v in self.piece.branch_edges:
            a, b = self.piece_map[u], self.piece_map[v]
            edges.add((min(a, b), max(a, b)))
        for ri, attach in self.piece.root_edges:
            a, b = self.roots[ri], self.piece_map[attach]
            edges.add((min(a, b), max(a, b)))
        return frozenset(edges)


def paste_labels(
    plan: SplitPlan,
    core_labels: Sequence[int],
    piece_labels: Sequence[int],
) -> tuple[int, ...]:
    """Combine core and piece labels into labels for the original tree."""
    n = plan.core.n + plan.piece.p
    out: list[Optional[int]] = [None] * n
    for i, orig in enumerate(plan.core_map):
        out[orig] = core_labels[i]
    for i, orig in enumerate(plan.piece_map):
        out[orig] = piece_labels[i]
    assert all(x is not None for x in out)
    return tuple(out)  # type: ignore[return-value]


def _components_without(t: Tree, v: int) -> list[tuple[int, ...]]:
    """Connected components of t - v, each sorted, ordered by (size, vertices)."""
    seen = {v}
    comps = []
    for s in t.neighbors(v):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in t.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        comps.append(tuple(sorted(comp)))
    comps.sort(key=lambda c: (len(c), c))
    return comps


def _subsets_with_total(
    sizes: Sequence[int], total: int
) -> Iterator[tuple[int, ...]]:
    """Index subsets with the given size total, in lexicographic order."""
    m = len(sizes)
    suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        suffix[i] = suffix[i + 1] + sizes[i]

    def rec(start: int, need: int, chosen: list[int]) -> Iterator[tuple[int, ...]]:
        if need == 0:
            yield tuple(chosen)
            return
        for j in range(start, m):
            if suffix[j] < need:
                return
            if sizes[j] <= need:
                chosen.append(j)
                yield from rec(j + 1, need - sizes[j], chosen)
                chosen.pop()

    return rec(0, total, [])


def _build_plan(
    t: Tree,
    target: int,
    kind: str,
    removals: Sequence[tuple[int, tuple[int, ...]]],
) -> SplitPlan:
    """Materialize a plan from (root, component) removals.

    Roots appear in the order given; components are grouped under their root
    as piece branches.  Raises (never returns a broken plan) if the removals
    do not leave a connected core — a generator bug, not an input condition.
    """
    roots: list[int] = []
    for r, _ in removals:
        if r not in roots:
            roots.append(r)
    removed: set[int] = set()
    for _, comp in removals:
        removed.update(comp)
    piece_map = tuple(sorted(removed))
    pidx = {orig: i for i, orig in enumerate(piece_map)}
    core_map = tuple(v for v in range(t.n) if v not in removed)
    cidx = {orig: i for i, orig in enumerate(core_map)}

    branch_edges = []
    for u, v in t.edges:
        if u in removed and v in removed:
            branch_edges.append((pidx[u], pidx[v]))
    root_edges = []
    for r, comp in removals:
        in_comp = set(comp)
        attach = [u for u in t.neighbors(r) if u in in_comp]
        assert len(attach) == 1, "component must hang from its root by one edge"
        root_edges.append((roots.index(r), pidx[attach[0]]))
    piece = RootedPiece(
        len(piece_map), len(roots), tuple(branch_edges), tuple(root_edges)
    )

    core_edges = []
    for u, v in t.edges:
        if u not in removed and v not in removed:
            core_edges.append((cidx[u], cidx[v]))
    core = Tree(len(core_map), tuple(core_edges))

    plan = SplitPlan(
        target,
        kind,
        tuple(roots),
        core,
        piece,
        core_map,
        piece_map,
        tuple(cidx[r] for r in roots),
    )
    assert plan.original_edges() == frozenset(t.edges)
    return plan


def find_splits(t: Tree, s: int) -> Iterator[SplitPlan]:
    """Candidate splits of t with piece size s (or s-1), best first.

    Yields single-root plans of exactly s piece vertices, then single-root
    plans of s-1 (leaving a core one vertex larger), then two-root plans
    totalling s.  Roots stay within distance 6 of an endpoint of a fixed
    longest path, mirroring the walk that guarantees a usable split exists.
    If the generator finishes without producing any plan, it raises a
    diagnostic error: the splitting guarantee says this cannot happen for
    trees above the piece size, so an empty sequence is an implementation bug.
    """
    if s not in VALID_TARGETS:
        raise SplitError(f"target piece size must be one of {VALID_TARGETS}, got {s}")
    if t.n < s + 1:
        raise SplitError(f"tree too small to split: n={t.n} needs at least {s + 1}")
    return _plan_generator(t, s)


def _plan_generator(t: Tree, s: int) -> Iterator[SplitPlan]:
    spine = longest_path(t)
    L = len(spine) - 1
    pos = {v: i for i, v in enumerate(spine)}

    def single_root_plans(total: int, kind: str) -> Iterator[SplitPlan]:
        for i, v in enumerate(spine):
            if min(i, L - i) > 6:
                continue
            comps = _components_without(t, v)
            far = next((c for c in comps if i < L and spine[i + 1] in c), None)
            near = next((c for c in comps if i > 0 and spine[i - 1] in c), None)
            variants = [
                ("far", [c for c in comps if c is not far]),
                ("near", [c for c in comps if c is not near]),
            ]
            for kept, pool in variants:
                sizes = [len(c) for c in pool]
                for idxs in _subsets_with_total(sizes, total):
                    chosen = [pool[j] for j in idxs]
                    if kept == "near":
                        # The keep-far variant already covers subsets not
                        # touching the far side; skip them here to avoid
                        # duplicate plans.
                        if far is None or all(c is not far for c in chosen):
                            continue
                    yield _build_plan(t, s, kind, [(v, c) for c in chosen])

    def two_root_plans() -> Iterator[SplitPlan]:
        # Distinct roots on or next to the spine, each root shedding
        # components that avoid the other root, so the removals are
        # automatically disjoint and the core stays connected.
        candidates: list[int] = []
        for i, v in enumerate(spine):
            if min(i, L - i) <= 6:
                candidates.append(v)
        for i, v in enumerate(spine):
            if min(i, L - i) + 1 <= 6:
                for u in t.neighbors(v):
                    if u not in pos and u not in candidates:
                        candidates.append(u)

        def pool_for(r: int, other: int) -> list[tuple[int, ...]]:
            return [c for c in _components_without(t, r) if other not in c]

        for ia in range(len(candidates)):
            for ib in range(ia + 1, len(candidates)):
                r1, r2 = candidates[ia], candidates[ib]
                pool1 = pool_for(r1, r2)
                pool2 = pool_for(r2, r1)
                if not pool1 or not pool2:
                    continue
                sizes1 = [len(c) for c in pool1]
                sizes2 = [len(c) for c in pool2]
                for a in range(1, s):
                    b = s - a
                    for idxs1 in _subsets_with_total(sizes1, a):
                        part1 = [(r1, pool1[j]) for j in idxs1]
                        for idxs2 in _subsets_with_total(sizes2, b):
                            yield _build_plan(
                                t,
                                s,
                                "two-root-forest",
                                part1 + [(r2, pool2[j]) for j in idxs2],
                            )

    emitted = 0
    for plan in single_root_plans(s, "exact-tree"):
        emitted += 1
        yield plan
    for plan in single_root_plans(s - 1, "short-tree"):
        emitted += 1
        yield plan
    for plan in two_root_plans():
        emitted += 1
        yield plan
    if emitted == 0:
        # The splitting guarantee says every big-enough tree has a plan; an
        # empty sequence is a generator bug, reported loudly for triage.
        raise SplitError(
            f"no split plans produced for tree n={t.n}, s={s}, "
            f"edges={t.edges} — splitting guarantee violated (bug)"
        )


def apply_split(t: Tree, plan: SplitPlan) -> tuple[Tree, RootedPiece]:
    """Validate that the plan belongs to t and return its core and piece."""
    if plan.core.n + plan.piece.p != t.n:
        raise SplitError(
            f"plan covers {plan.core.n + plan.piece.p} vertices, tree has {t.n}"
        )
    if plan.original_edges() != frozenset(t.edges):
        raise SplitError("plan does not reassemble this tree's edges")
    return plan.core, plan.piece
