"""Pruned exhaustive backtracking over label assignments.

Three consumers share this engine: the universal fallback labeler (boxed
search below global cordiality bounds), the brute-force oracle
(``exists_k_cordial``), and the rooted-forest certifier (``hovey_certify``).
The search is complete: ``None`` means no assignment exists, never "gave up"
— running out of an explicit node budget raises instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

from .labelings import Labeling, check_piece_cordial, is_k_cordial
from .pieces import (
    RootedPiece,
    canonical_form,
    group_codes,
    piece_from_key,
)
from .trees import Tree

Structure = Union[Tree, RootedPiece]

DEFAULT_MAX_NODES = 2_000_000


class SearchError(ValueError):
    """Raised for structurally inconsistent constraint specifications."""


class BudgetExceeded(RuntimeError):
    """Raised when the node budget runs out before the search completes."""


@dataclass(frozen=True)
class ConstraintSpec:
    """Residue-count constraints for a labeling search.

    ``base_v``/``base_e`` hold counts of already-labeled context (a core's
    profile); caps and floors bound the FINAL counts (base plus new).  Caps
    alone cannot express balance, so floors (defaulting to zero, i.e. pure cap
    semantics) make the box exact when needed: with cap = ceil and floor =
    floor of count/k, box-satisfaction is equivalent to cordial balance.

    ``special_weight = (ell, slack)`` raises the effective cap of weight ell
    by ``slack`` — the static relaxation matching the rooted-forest surplus
    condition; the exact surplus conditions are enforced by an accept
    predicate, caps being a sound over-approximation for pruning.

    ``fixed`` pre-assigns structure vertices (root labels are supplied
    separately to ``solve`` since roots are not structure vertices).
    """

    k: int
    base_v: tuple[int, ...]
    base_e: tuple[int, ...]
    cap_v: tuple[int, ...]
    cap_e: tuple[int, ...]
    floor_v: Optional[tuple[int, ...]] = None
    floor_e: Optional[tuple[int, ...]] = None
    special_weight: Optional[tuple[int, int]] = None
    fixed: Optional[Mapping[int, int]] = None

    def __post_init__(self) -> None:
        k = self.k
        if k < 1:
            raise SearchError(f"modulus must be >= 1, got k={k}")
        for name in ("base_v", "base_e", "cap_v", "cap_e"):
            arr = getattr(self, name)
            object.__setattr__(self, name, tuple(arr))
            arr = getattr(self, name)
            if len(arr) != k:
                raise SearchError(f"{name} must have length k={k}, got {len(arr)}")
            if any(x < 0 for x in arr):
                raise SearchError(f"{name} has a negative entry")
        for name in ("floor_v", "floor_e"):
            arr = getattr(self, name)
            if arr is None:
                object.__setattr__(self, name, (0,) * k)
            else:
                object.__setattr__(self, name, tuple(arr))
            arr = getattr(self, name)
            if len(arr) != k or any(x < 0 for x in arr):
                raise SearchError(f"{name} must be k nonnegative entries")
        assert self.floor_v is not None and self.floor_e is not None
        if any(f > c for f, c in zip(self.floor_v, self.cap_v)):
            raise SearchError("floor_v exceeds cap_v at some residue")
        eff_cap_e = list(self.cap_e)
        if self.special_weight is not None:
            ell, slack = self.special_weight
            if not 0 <= ell < k:
                raise SearchError(f"special weight {ell} outside Z_{k}")
            if slack < 0:
                raise SearchError("special weight slack must be >= 0")
            eff_cap_e[ell] += slack
        if any(f > c for f, c in zip(self.floor_e, eff_cap_e)):
            raise SearchError("floor_e exceeds cap_e at some residue")
        if self.fixed is not None:
            object.__setattr__(self, "fixed", dict(self.fixed))

    def effective_cap_e(self) -> tuple[int, ...]:
        caps = list(self.cap_e)
        if self.special_weight is not None:
            ell, slack = self.special_weight
            caps[ell] += slack
        return tuple(caps)


def cordial_spec(n_vertices: int, n_edges: int, k: int) -> ConstraintSpec:
    """The exact box characterizing k-cordial balance for these totals."""
    zeros = (0,) * k
    return ConstraintSpec(
        k,
        zeros,
        zeros,
        (-(-n_vertices // k),) * k,
        (-(-n_edges // k),) * k,
        (n_vertices // k,) * k,
        (n_edges // k,) * k,
    )


def surplus_spec(p: int, k: int, ell: int) -> ConstraintSpec:
    """Sound caps for the rooted-forest conditions with surplus weight ell.

    If some non-surplus count reached ceil(p/k)+1, the spread conditions would
    force every weight count to at least ceil(p/k) and the surplus to at least
    ceil(p/k)+1, totalling more than p edges; so non-surplus counts are at
    most ceil(p/k) and the surplus at most one more.  The vertex box is exact
    for the balance condition.  These caps prune; the exact spread conditions
    are enforced by an accept predicate where needed.
    """
    zeros = (0,) * k
    return ConstraintSpec(
        k,
        zeros,
        zeros,
        (-(-p // k),) * k,
        (-(-p // k),) * k,
        (p // k,) * k,
        zeros,
        special_weight=(ell, 1),
    )


def _dfs_preorder(structure: Structure) -> list[int]:
    if isinstance(structure, Tree):
        starts = [0]
        adj = structure.adjacency
        n = structure.n
    else:
        starts = [v for _, v in structure.root_edges]
        adj = structure.adjacency
        n = structure.p
    seen = [False] * n
    order: list[int] = []
    for s in starts:
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        while stack:
            x = stack.pop()
            order.append(x)
            for y in reversed(adj[x]):
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
    return order


def solve(
    structure: Structure,
    spec: ConstraintSpec,
    root_labels: Optional[tuple[int, ...]] = None,
    accept: Optional[Callable[[Labeling], bool]] = None,
    max_nodes: Optional[int] = None,
) -> Optional[Labeling]:
    """Complete backtracking search for a labeling within the spec's box.

    Returns the first labeling (in the engine's deterministic order) whose
    final counts lie within [floor, cap] everywhere and which the optional
    ``accept`` predicate approves, or None when the search space is exhausted.
    Raises BudgetExceeded if ``max_nodes`` value placements are attempted
    first.

    Variable order is DFS preorder (from vertex 0 for trees, from the root
    attachment points for pieces); value order prefers labels with the most
    remaining capacity, ties broken by ascending residue.
    """
    k = spec.k
    if isinstance(structure, Tree):
        if root_labels is not None:
            raise SearchError("trees take no root labels")
        n = structure.n
        edge_list = [(u, v) for u, v in structure.edges]
        const_edges: list[tuple[int, int]] = []
    elif isinstance(structure, RootedPiece):
        if root_labels is None:
            raise SearchError("piece search requires root labels")
        root_labels = tuple(root_labels)
        if len(root_labels) != structure.num_roots:
            raise SearchError(
                f"expected {structure.num_roots} root labels, got {len(root_labels)}"
            )
        if any(not 0 <= g < k for g in root_labels):
            raise SearchError("root label outside Z_k")
        n = structure.p
        edge_list = [(u, v) for u, v in structure.branch_edges]
        const_edges = [(v, root_labels[ri]) for ri, v in structure.root_edges]
    else:
        raise SearchError(f"unsupported structure {type(structure).__name__}")

    values: list[Optional[int]] = [None] * n
    cnt_v = list(spec.base_v)
    cnt_e = list(spec.base_e)
    cap_v = spec.cap_v
    cap_e = spec.effective_cap_e()
    floor_v = spec.floor_v
    floor_e = spec.floor_e
    assert floor_v is not None and floor_e is not None

    fixed = spec.fixed or {}
    for v, c in fixed.items():
        if not 0 <= v < n:
            raise SearchError(f"fixed vertex {v} out of range")
        if not 0 <= c < k:
            raise SearchError(f"fixed label {c} outside Z_{k}")
        values[v] = c
        cnt_v[c] += 1

    order = _dfs_preorder(structure)
    slots = [v for v in order if values[v] is None]
    slot_index = {v: i for i, v in enumerate(slots)}

    # Assign every edge to the endpoint that completes it; edges between two
    # pre-known endpoints are counted immediately.
    slot_edges: list[list[tuple[str, int]]] = [[] for _ in slots]
    rem_edges = 0
    for u, v in edge_list:
        iu = slot_index.get(u)
        iv = slot_index.get(v)
        if iu is None and iv is None:
            a, b = values[u], values[v]
            assert a is not None and b is not None
            cnt_e[(a + b) % k] += 1
        elif iu is None:
            assert iv is not None
            slot_edges[iv].append(("vert", u))
            rem_edges += 1
        elif iv is None:
            slot_edges[iu].append(("vert", v))
            rem_edges += 1
        else:
            late, early = (iu, v) if iu > iv else (iv, u)
            slot_edges[late].append(("vert", early))
            rem_edges += 1
    for v, g in const_edges:
        iv = slot_index.get(v)
        if iv is None:
            c = values[v]
            assert c is not None
            cnt_e[(c + g) % k] += 1
        else:
            slot_edges[iv].append(("const", g))
            rem_edges += 1

    if any(cnt_v[i] > cap_v[i] for i in range(k)):
        return None
    if any(cnt_e[i] > cap_e[i] for i in range(k)):
        return None

    def build() -> Labeling:
        assert all(x is not None for x in values)
        labels = tuple(values)  # type: ignore[arg-type]
        if isinstance(structure, RootedPiece):
            return Labeling(k, labels, root_labels)
        return Labeling(k, labels)

    nodes = 0
    n_slots = len(slots)
    slack_v = sum(cap_v) - sum(cnt_v)
    slack_e = sum(cap_e) - sum(cnt_e)
    any_floor_v = any(floor_v)
    any_floor_e = any(floor_e)

    def deficits_ok(slots_left: int, edges_left: int) -> bool:
        # Remaining capacity must cover everything still to be placed, and
        # what is still to be placed must cover the remaining floor deficits.
        if slack_v < slots_left or slack_e < edges_left:
            return False
        if any_floor_v:
            dv = 0
            for i in range(k):
                d = floor_v[i] - cnt_v[i]
                if d > 0:
                    dv += d
            if dv > slots_left:
                return False
        if any_floor_e:
            de = 0
            for i in range(k):
                d = floor_e[i] - cnt_e[i]
                if d > 0:
                    de += d
            if de > edges_left:
                return False
        return True

    def rec(i: int, edges_left: int) -> Optional[Labeling]:
        nonlocal nodes, slack_v, slack_e
        if i == n_slots:
            assert edges_left == 0
            lab = build()
            if accept is None or accept(lab):
                return lab
            return None
        v = slots[i]
        incident = slot_edges[i]
        cands = sorted(range(k), key=lambda c: (cnt_v[c] - cap_v[c], c))
        for c in cands:
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                raise BudgetExceeded(
                    f"search exceeded {max_nodes} nodes at depth {i}/{n_slots}"
                )
            if cnt_v[c] >= cap_v[c]:
                continue
            applied: list[int] = []
            feasible = True
            for kind, x in incident:
                pv = x if kind == "const" else values[x]
                assert pv is not None
                w = (c + pv) % k
                if cnt_e[w] >= cap_e[w]:
                    feasible = False
                    break
                cnt_e[w] += 1
                applied.append(w)
            if feasible:
                cnt_v[c] += 1
                values[v] = c
                slack_v -= 1
                slack_e -= len(applied)
                left = edges_left - len(incident)
                if deficits_ok(n_slots - i - 1, left):
                    got = rec(i + 1, left)
                    if got is not None:
                        return got
                values[v] = None
                cnt_v[c] -= 1
                slack_v += 1
                slack_e += len(applied)
            for w in applied:
                cnt_e[w] -= 1
        return None

    if not deficits_ok(n_slots, rem_edges):
        return None
    return rec(0, rem_edges)


def exists_k_cordial(
    t: Tree, k: int, max_nodes: Optional[int] = None
) -> Optional[Labeling]:
    """Complete decision: a k-cordial labeling of t, or None if none exists.

    The search box equals the cordiality conditions exactly, so no
    post-filtering is involved; any witness is re-verified before return.
    """
    witness = solve(t, cordial_spec(t.n, t.n - 1, k), max_nodes=max_nodes)
    if witness is not None:
        assert is_k_cordial(t, witness).ok
    return witness


# ---------------------------------------------------------------------------
# Memoized piece solving.


class PieceMemo:
    """Canonical-form cache of piece searches.

    Keys combine the piece's canonical code, its root labels, and the residual
    constraint box, so isomorphic requests (including permuted equivalent
    components) are solved once.  Witnesses are stored in canonical vertex
    order and mapped back per caller.

    Concurrency: entries are plain dict puts of immutable values; concurrent
    use from threads can at worst duplicate a solve, never corrupt a result.
    """

    def __init__(self) -> None:
        self.table: dict = {}
        self.hits = 0
        self.misses = 0

    def solve_boxed(
        self,
        piece: RootedPiece,
        root_labels: tuple[int, ...],
        spec: ConstraintSpec,
        max_nodes: Optional[int] = None,
    ) -> Optional[Labeling]:
        """Solve with a residual box already expressed in ``spec`` (bases must
        be zero so the key depends only on the box)."""
        if any(spec.base_v) or any(spec.base_e):
            raise SearchError("solve_boxed requires zero bases; fold them into caps")
        if spec.fixed:
            raise SearchError("solve_boxed does not support fixed vertices")
        ckey, order = canonical_form(piece, root_labels)
        key = (
            "boxed",
            spec.k,
            ckey,
            spec.cap_v,
            spec.cap_e,
            spec.floor_v,
            spec.floor_e,
            spec.special_weight,
        )
        if key in self.table:
            self.hits += 1
            canon_labels = self.table[key]
        else:
            self.misses += 1
            cpiece, clabels = piece_from_key(ckey)
            assert clabels is not None
            witness = solve(cpiece, spec, root_labels=clabels, max_nodes=max_nodes)
            canon_labels = None if witness is None else witness.labels
            self.table[key] = canon_labels
        if canon_labels is None:
            return None
        labels = [0] * piece.p
        for i, orig in enumerate(order):
            labels[orig] = canon_labels[i]
        return Labeling(spec.k, tuple(labels), root_labels)


@dataclass
class HoveyReport:
    """Outcome of certifying one piece shape over all root labelings.

    ``failures`` lists (g, ell) cases with no satisfying labeling; an empty
    list means certified.  ``witness`` recomputes the labeling for any case
    from the memoized canonical solutions.
    """

    shape: RootedPiece
    k: int
    certified: bool
    total_cases: int
    failures: tuple[tuple[tuple[int, ...], int], ...]
    memo: "PieceMemo" = field(repr=False)

    def witness(self, g: tuple[int, ...], ell: int) -> Optional[Labeling]:
        return _solve_case(self.shape, self.k, tuple(g), ell, self.memo)

    def table(self) -> str:
        """Per-case grid, printable for shapes with at most two roots."""
        if self.shape.num_roots > 2:
            raise ValueError("case table only rendered for <= 2 roots")
        k = self.k
        fail = set(self.failures)
        header = "g\\ell " + " ".join(f"{ell:>2}" for ell in range(k))
        lines = [header]
        second = range(k) if self.shape.num_roots == 2 else [None]
        for g2 in second:
            g = (0,) if g2 is None else (0, g2)
            cells = " ".join(
                " ." if (g, ell) not in fail else " X" for ell in range(k)
            )
            lines.append(f"{str(g):<5} {cells}")
        return "\n".join(lines)


def _rotated_items(
    codes: tuple[tuple, ...], g: tuple[int, ...], k: int
) -> list[tuple]:
    """For each rotation a, the sorted (code, label) items of g+a.

    Rotating all labels by a sends root labels g to g+a and the surplus weight
    ell to ell+2a while preserving solvability, so equivalent cases share one
    canonical key: the minimum over a of (items[a], rotated ell).
    """
    r = len(g)
    return [
        tuple(sorted((codes[i], (g[i] + a) % k) for i in range(r)))
        for a in range(k)
    ]


def _rotation_normal(
    codes: tuple[tuple, ...], g: tuple[int, ...], ell: Optional[int], k: int
) -> tuple[tuple, Optional[int], int]:
    """Minimal (items, rotated ell) representative and the rotation achieving it."""
    rot = _rotated_items(codes, g, k)
    best = None
    best_a = 0
    for a in range(k):
        ell_a = None if ell is None else (ell + 2 * a) % k
        cand = (rot[a], ell_a)
        if best is None or cand < best:
            best = cand
            best_a = a
    assert best is not None
    return best[0], best[1], best_a


def _materialize(
    shape: RootedPiece,
    g: tuple[int, ...],
    a: int,
    k: int,
    canon_labels: Optional[tuple[int, ...]],
) -> Optional[Labeling]:
    if canon_labels is None:
        return None
    rotated = tuple((x + a) % k for x in g)
    _, order = canonical_form(shape, rotated)
    labels = [0] * shape.p
    for i, orig in enumerate(order):
        labels[orig] = (canon_labels[i] - a) % k
    return Labeling(k, tuple(labels), g)


def _perfect_canon(
    items: tuple, p: int, k: int, memo: PieceMemo, max_nodes: Optional[int]
) -> Optional[tuple[int, ...]]:
    """Canonical labels with every weight count <= 1 (hence exactly 1 when
    p = k), satisfying the surplus conditions for every ell simultaneously."""
    key = ("perfect", k, items)
    if key in memo.table:
        memo.hits += 1
        return memo.table[key]
    memo.misses += 1
    cpiece, clabels = piece_from_key(items)
    assert clabels is not None
    zeros = (0,) * k
    spec = ConstraintSpec(
        k,
        zeros,
        zeros,
        (-(-p // k),) * k,
        (1,) * k,
        (p // k,) * k,
        zeros,
    )
    witness = solve(cpiece, spec, root_labels=clabels, max_nodes=max_nodes)
    canon_labels = None
    if witness is not None:
        assert check_piece_cordial(cpiece, witness, 0).ok
        canon_labels = witness.labels
    memo.table[key] = canon_labels
    return canon_labels


def _case_canon(
    items: tuple,
    ell_c: int,
    p: int,
    k: int,
    memo: PieceMemo,
    max_nodes: Optional[int],
) -> Optional[tuple[int, ...]]:
    """Canonical labels satisfying the surplus conditions for weight ell_c;
    the accept predicate enforces the exact conditions at every solution."""
    key = ("case", k, items, ell_c)
    if key in memo.table:
        memo.hits += 1
        return memo.table[key]
    memo.misses += 1
    cpiece, clabels = piece_from_key(items)
    assert clabels is not None
    spec = surplus_spec(p, k, ell_c)
    witness = solve(
        cpiece,
        spec,
        root_labels=clabels,
        accept=lambda f: check_piece_cordial(cpiece, f, ell_c).ok,
        max_nodes=max_nodes,
    )
    canon_labels = None if witness is None else witness.labels
    memo.table[key] = canon_labels
    return canon_labels


def _solve_perfect(
    shape: RootedPiece,
    k: int,
    g: tuple[int, ...],
    memo: PieceMemo,
    codes: tuple[tuple, ...],
    max_nodes: Optional[int],
) -> Optional[Labeling]:
    items, _, a = _rotation_normal(codes, g, None, k)
    return _materialize(
        shape, g, a, k, _perfect_canon(items, shape.p, k, memo, max_nodes)
    )


def _solve_case(
    shape: RootedPiece,
    k: int,
    g: tuple[int, ...],
    ell: int,
    memo: PieceMemo,
    codes: Optional[tuple[tuple, ...]] = None,
    max_nodes: Optional[int] = None,
) -> Optional[Labeling]:
    """A labeling satisfying the surplus conditions for this (g, ell)."""
    if codes is None:
        codes = group_codes(shape)
    if shape.p == k:
        perfect = _solve_perfect(shape, k, g, memo, codes, max_nodes)
        if perfect is not None:
            return perfect
    items, ell_c, a = _rotation_normal(codes, g, ell, k)
    assert ell_c is not None
    result = _materialize(
        shape, g, a, k, _case_canon(items, ell_c, shape.p, k, memo, max_nodes)
    )
    if result is not None:
        assert check_piece_cordial(shape, result, ell).ok
    return result


def _resolve_class(
    rep: tuple[tuple[int, int], ...],
    uniq: list[tuple],
    p: int,
    k: int,
    memo: PieceMemo,
    max_nodes: Optional[int],
) -> tuple[int, ...]:
    """Surplus weights with no solution, in the coordinates of the class
    representative ``rep`` (sorted (code-rank, root label) pairs)."""
    items = tuple(sorted((uniq[i], lab) for i, lab in rep))
    if p == k and _perfect_canon(items, p, k, memo, max_nodes) is not None:
        return ()
    stab = [
        b
        for b in range(k)
        if tuple(sorted((i, (lab + b) % k) for i, lab in rep)) == rep
    ]
    fails = []
    for ellp in range(k):
        ell_c = min((ellp + 2 * b) % k for b in stab)
        if _case_canon(items, ell_c, p, k, memo, max_nodes) is None:
            fails.append(ellp)
    return tuple(fails)


def hovey_certify(
    shape: RootedPiece,
    k: int,
    memo: Optional[PieceMemo] = None,
    max_nodes: Optional[int] = None,
) -> HoveyReport:
    """Certify a piece shape over every root labeling and surplus weight.

    Quantifies over all g with g[0] = 0 (rotating makes this lossless,
    recorded here as the applied symmetry reduction) and all ell in Z_k.
    Equivalent cases under global rotation and permutation of isomorphic
    components form one class, decided once; complete: a failure is a proof
    that the case has no satisfying labeling.
    """
    if memo is None:
        memo = PieceMemo()
    codes = group_codes(shape)
    p = shape.p
    r = shape.num_roots
    # Rank-intern the per-root codes: comparisons of (rank, label) pairs
    # agree with comparisons of (code, label) pairs, so class keys built from
    # ranks pick the same minimal rotation as the structural memo keys.
    uniq = sorted(set(codes))
    rank = {c: i for i, c in enumerate(uniq)}
    ids = tuple(rank[c] for c in codes)
    idx = range(r)
    class_fails: dict[tuple[tuple[int, int], ...], tuple[int, ...]] = {}
    failures: list[tuple[tuple[int, ...], int]] = []
    total = 0
    for rest in itertools.product(range(k), repeat=r - 1):
        g = (0,) + rest
        best = None
        best_a = 0
        for a in range(k):
            t = tuple(sorted((ids[i], (g[i] + a) % k) for i in idx))
            if best is None or t < best:
                best = t
                best_a = a
        assert best is not None
        fails = class_fails.get(best)
        if fails is None:
            fails = _resolve_class(best, uniq, p, k, memo, max_nodes)
            class_fails[best] = fails
        total += k
        for ellp in fails:
            failures.append((g, (ellp - 2 * best_a) % k))
    failures.sort()
    return HoveyReport(shape, k, not failures, total, tuple(failures), memo)
