"""Sequential (Grace) labelings of caterpillars and rooted caterpillar pieces.

The engine's fast paths.  A caterpillar drawn as a non-crossing bigraph and
labeled with consecutive residues part by part produces edge weights that form
a run of consecutive residues, one per edge — which is what makes the output
k-cordial for every k and makes the rooted variants paste cleanly onto cores.
"""

from __future__ import annotations

from dataclasses import dataclass

from .labelings import Labeling, edge_weights
from .pieces import RootedPiece, augmented_tree
from .trees import Tree, classify, longest_path


class GraceError(ValueError):
    """Raised when a structure is outside the sequential construction's domain."""


class GraceTargetError(GraceError):
    """Raised when no sequential variant realizes the request; callers fall
    back to constraint search."""


@dataclass(frozen=True)
class CaterpillarLayout:
    """A caterpillar drawn as a planar bigraph.

    ``spine`` is a maximum path; parts are the two bipartition classes, each
    ordered by (spine position of the vertex itself or of its spine neighbor,
    then vertex index) — a non-crossing left-to-right drawing.
    """

    spine: tuple[int, ...]
    part_a: tuple[int, ...]
    part_b: tuple[int, ...]

    def sequence(self) -> tuple[int, ...]:
        return self.part_a + self.part_b


def _parts_for_spine(t: Tree, spine: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    pos = {v: i for i, v in enumerate(spine)}
    keyed: list[tuple[tuple[int, int], int, int]] = []
    for v in range(t.n):
        if v in pos:
            parity = pos[v] % 2
            keyed.append(((pos[v], v), parity, v))
        else:
            anchor = next(u for u in t.neighbors(v) if u in pos)
            keyed.append(((pos[anchor], v), (pos[anchor] + 1) % 2, v))
    keyed.sort()
    part_a = tuple(v for _, parity, v in keyed if parity == 0)
    part_b = tuple(v for _, parity, v in keyed if parity == 1)
    return part_a, part_b


def layout(t: Tree) -> CaterpillarLayout:
    """Deterministic bigraph layout of a caterpillar."""
    if classify(t) != "caterpillar":
        raise GraceError("layout requires a caterpillar")
    spine = longest_path(t)
    part_a, part_b = _parts_for_spine(t, spine)
    return CaterpillarLayout(spine, part_a, part_b)


def grace_label(t: Tree, k: int, offset: int = 0) -> Labeling:
    """Sequential labeling of a caterpillar: part A gets offset.., then part B.

    Each part receives exactly as many consecutive residues as it has
    vertices (half-open ranges); the result is k-cordial for every k >= 2.
    """
    if k < 2:
        raise GraceError(f"modulus must be >= 2, got k={k}")
    lay = layout(t)
    labels = [0] * t.n
    for i, v in enumerate(lay.sequence()):
        labels[v] = (offset + i) % k
    return Labeling(k, tuple(labels))


def rooted_grace(piece: RootedPiece) -> Labeling:
    """Label a single-root caterpillar piece with modulus k = p.

    The piece-plus-root tree is labeled sequentially with the root placed
    first or last in the sequence, forcing the root's label to 0; the p piece
    vertices then take each residue exactly once and the p edge weights are
    all distinct.  Requires the root to sit within distance 1 of an endpoint
    of a longest path of the piece-plus-root tree.
    """
    if piece.num_roots != 1:
        raise GraceError("rooted_grace requires a single-root piece")
    aug, root = augmented_tree(piece)
    if classify(aug) != "caterpillar":
        raise GraceError("piece plus root is not a caterpillar")
    p = piece.p
    spine = longest_path(aug)
    for sp in (spine, spine[::-1]):
        part_a, part_b = _parts_for_spine(aug, sp)
        for root_part, other in ((part_a, part_b), (part_b, part_a)):
            if root not in root_part:
                continue
            if root_part[0] == root:
                seq = root_part + other
            elif root_part[-1] == root:
                seq = other + root_part
            else:
                continue
            position = {v: i for i, v in enumerate(seq)}
            labels = tuple(position[v] % p for v in range(p))
            f = Labeling(p, labels, (position[root] % p,))
            assert f.root_labels == (0,)
            weights = edge_weights(piece, f)
            assert len(set(weights)) == p, (
                f"sequential labeling of {piece} repeated a weight: {weights}"
            )
            return f
    raise GraceTargetError(
        "root is not within distance 1 of a longest-path endpoint of the "
        "piece-plus-root tree"
    )


def grace_with_neighbor_label(piece: RootedPiece, k: int, w: int) -> Labeling:
    """Sequentially label a one-branch caterpillar piece so the root's
    neighbor gets label w.

    The root is fixed context with label 0 (callers rotate the core first), so
    the root edge's weight equals w.  The piece's own vertices take |piece|
    consecutive residues in bigraph order, with the starting residue chosen to
    land w on the attachment vertex — every target is reachable this way.
    """
    if piece.num_roots != 1:
        raise GraceError("grace_with_neighbor_label requires a single-root piece")
    if k < 2:
        raise GraceError(f"modulus must be >= 2, got k={k}")
    if not 0 <= w < k:
        raise GraceError(f"target label {w} outside Z_{k}")
    if len(piece.root_edges) != 1:
        raise GraceTargetError(
            "root has multiple branches; no single sequential run covers the "
            "piece — fall back to search"
        )
    attach = piece.root_edges[0][1]
    ptree = Tree(piece.p, piece.branch_edges)
    try:
        lay = layout(ptree)
    except GraceError:
        raise GraceError("piece is not a caterpillar") from None
    seq = lay.sequence()
    offset = (w - seq.index(attach)) % k
    position = {v: i for i, v in enumerate(seq)}
    labels = tuple((offset + position[v]) % k for v in range(piece.p))
    assert labels[attach] == w
    return Labeling(k, labels, (0,))
