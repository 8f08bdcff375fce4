"""Labelings over Z_k, induced edge weights, cordiality checks, transforms.

Everything here is pure arithmetic over immutable values.  The one convention
worth spelling out: for rooted pieces, root labels are fixed context — they are
excluded from vertex-label counts but their edges count toward edge-weight
counts.  Every function below follows that convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .pieces import RootedPiece
from .trees import Tree

Structure = Union[Tree, RootedPiece]


class LabelingError(ValueError):
    """Raised when a labeling does not fit its structure."""


@dataclass(frozen=True)
class Labeling:
    """An assignment of Z_k values to a structure's vertices.

    ``root_labels`` must be present exactly when the structure is a rooted
    piece; it holds the fixed labels of the external roots in root-index order.
    """

    k: int
    labels: tuple[int, ...]
    root_labels: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise LabelingError(f"modulus must be >= 1, got k={self.k}")
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.root_labels is not None:
            object.__setattr__(self, "root_labels", tuple(self.root_labels))
        for x in self.labels + (self.root_labels or ()):
            if not 0 <= x < self.k:
                raise LabelingError(f"label {x} outside Z_{self.k}")


@dataclass(frozen=True)
class CountProfile:
    v_counts: tuple[int, ...]
    e_counts: tuple[int, ...]


def _check_fit(structure: Structure, f: Labeling) -> None:
    if isinstance(structure, Tree):
        if f.root_labels is not None:
            raise LabelingError("tree labelings carry no root labels")
        if len(f.labels) != structure.n:
            raise LabelingError(
                f"labeling has {len(f.labels)} labels for a {structure.n}-vertex tree"
            )
    elif isinstance(structure, RootedPiece):
        if f.root_labels is None:
            raise LabelingError("piece labelings require root labels")
        if len(f.root_labels) != structure.num_roots:
            raise LabelingError(
                f"expected {structure.num_roots} root labels, got {len(f.root_labels)}"
            )
        if len(f.labels) != structure.p:
            raise LabelingError(
                f"labeling has {len(f.labels)} labels for a p={structure.p} piece"
            )
    else:
        raise LabelingError(f"unsupported structure {type(structure).__name__}")


def edge_weights(structure: Structure, f: Labeling) -> tuple[int, ...]:
    """Per-edge weights f(u)+f(v) mod k.

    Order contract: a tree's weights follow ``tree.edges``; a piece's weights
    list branch edges first (in ``branch_edges`` order) then root edges (in
    ``root_edges`` order).
    """
    _check_fit(structure, f)
    k, labels = f.k, f.labels
    if isinstance(structure, Tree):
        return tuple((labels[u] + labels[v]) % k for u, v in structure.edges)
    weights = [(labels[u] + labels[v]) % k for u, v in structure.branch_edges]
    assert f.root_labels is not None
    weights.extend(
        (f.root_labels[ri] + labels[v]) % k for ri, v in structure.root_edges
    )
    return tuple(weights)


def count_profile(structure: Structure, f: Labeling) -> CountProfile:
    """Label and weight counts; root labels excluded from v_counts."""
    _check_fit(structure, f)
    v = [0] * f.k
    for x in f.labels:
        v[x] += 1
    e = [0] * f.k
    for w in edge_weights(structure, f):
        e[w] += 1
    return CountProfile(tuple(v), tuple(e))


def _smallest_violation(counts: Sequence[int]) -> Optional[tuple[int, int]]:
    lo = min(counts)
    hi = max(counts)
    if hi - lo <= 1:
        return None
    for a in range(len(counts)):
        for b in range(a + 1, len(counts)):
            if abs(counts[a] - counts[b]) >= 2:
                return (a, b)
    return None


@dataclass(frozen=True)
class CordialityReport:
    ok: bool
    v_counts: tuple[int, ...]
    e_counts: tuple[int, ...]
    violation: Optional[tuple[str, tuple[int, int]]]

    def __bool__(self) -> bool:
        return self.ok


def is_k_cordial(t: Tree, f: Labeling) -> CordialityReport:
    """Check |v_a - v_b| <= 1 and |e_a - e_b| <= 1 for all residue pairs.

    A failing report names the lexicographically smallest violating pair;
    vertex violations take precedence over edge violations.
    """
    profile = count_profile(t, f)
    bad_v = _smallest_violation(profile.v_counts)
    if bad_v is not None:
        return CordialityReport(False, profile.v_counts, profile.e_counts, ("vertex", bad_v))
    bad_e = _smallest_violation(profile.e_counts)
    if bad_e is not None:
        return CordialityReport(False, profile.v_counts, profile.e_counts, ("edge", bad_e))
    return CordialityReport(True, profile.v_counts, profile.e_counts, None)


@dataclass(frozen=True)
class PieceCordialityReport:
    ok: bool
    v_counts: tuple[int, ...]
    e_counts: tuple[int, ...]
    violation: Optional[str]

    def __bool__(self) -> bool:
        return self.ok


def check_piece_cordial(
    piece: RootedPiece, f: Labeling, surplus_weight: int
) -> PieceCordialityReport:
    """Check a piece labeling against the rooted-forest conditions.

    With ℓ = ``surplus_weight``: (1) vertex counts within 1 of each other,
    (2) weight counts within 1 of each other away from ℓ, and (3) e_ℓ at least
    every other weight count and at most 2 above it.  Root labels come from
    ``f.root_labels``.
    """
    if not 0 <= surplus_weight < f.k:
        raise LabelingError(f"surplus weight {surplus_weight} outside Z_{f.k}")
    profile = count_profile(piece, f)
    v, e = profile.v_counts, profile.e_counts
    ell = surplus_weight

    def fail(msg: str) -> PieceCordialityReport:
        return PieceCordialityReport(False, v, e, msg)

    bad_v = _smallest_violation(v)
    if bad_v is not None:
        a, b = bad_v
        return fail(f"vertex counts unbalanced: v_{a}={v[a]}, v_{b}={v[b]}")
    rest = [e[i] for i in range(f.k) if i != ell]
    if rest:
        if max(rest) - min(rest) >= 2:
            others = [i for i in range(f.k) if i != ell]
            for ia, a in enumerate(others):
                for b in others[ia + 1 :]:
                    if abs(e[a] - e[b]) >= 2:
                        return fail(
                            f"weight counts away from {ell} unbalanced: "
                            f"e_{a}={e[a]}, e_{b}={e[b]}"
                        )
        if e[ell] < max(rest):
            i = next(i for i in range(f.k) if i != ell and e[i] == max(rest))
            return fail(f"e_{ell}={e[ell]} below e_{i}={e[i]}")
        if e[ell] - min(rest) > 2:
            i = next(i for i in range(f.k) if i != ell and e[i] == min(rest))
            return fail(f"e_{ell}={e[ell]} exceeds e_{i}={e[i]} by more than 2")
    return PieceCordialityReport(True, v, e, None)


# ---------------------------------------------------------------------------
# The transform group: rotations and negation.


def rotate(f: Labeling, a: int) -> Labeling:
    """Add a (mod k) to every label, root labels included."""
    a %= f.k
    roots = None
    if f.root_labels is not None:
        roots = tuple((x + a) % f.k for x in f.root_labels)
    return Labeling(f.k, tuple((x + a) % f.k for x in f.labels), roots)


def negate(f: Labeling) -> Labeling:
    """Replace every label x by -x mod k, root labels included."""
    roots = None
    if f.root_labels is not None:
        roots = tuple((-x) % f.k for x in f.root_labels)
    return Labeling(f.k, tuple((-x) % f.k for x in f.labels), roots)


def rotate_profile(profile: CountProfile, a: int, k: int) -> CountProfile:
    """Profile of rotate(f, a) from the profile of f, in O(k).

    Rotating labels by a shifts each edge weight by 2a, so v'_i = v_{i-a} and
    e'_i = e_{i-2a}.
    """
    v = tuple(profile.v_counts[(i - a) % k] for i in range(k))
    e = tuple(profile.e_counts[(i - 2 * a) % k] for i in range(k))
    return CountProfile(v, e)


def negate_profile(profile: CountProfile, k: int) -> CountProfile:
    v = tuple(profile.v_counts[(-i) % k] for i in range(k))
    e = tuple(profile.e_counts[(-i) % k] for i in range(k))
    return CountProfile(v, e)


# ---------------------------------------------------------------------------
# Minority / majority bookkeeping.


@dataclass(frozen=True)
class MinorityMajority:
    """Residues at the extreme counts, defined only for spread <= 1.

    When counts are uniform both sets are empty and the profile is still
    ``valid``; when the spread is 2 or more the sets are empty and ``valid``
    is False (the labeling is not cordial, so the notion does not apply).
    """

    minority_labels: frozenset[int]
    majority_labels: frozenset[int]
    labels_valid: bool
    minority_weights: frozenset[int]
    majority_weights: frozenset[int]
    weights_valid: bool


def _extremes(counts: Sequence[int]) -> tuple[frozenset[int], frozenset[int], bool]:
    lo, hi = min(counts), max(counts)
    if hi - lo >= 2:
        return frozenset(), frozenset(), False
    if hi == lo:
        return frozenset(), frozenset(), True
    mins = frozenset(i for i, c in enumerate(counts) if c == lo)
    maxs = frozenset(i for i, c in enumerate(counts) if c == hi)
    return mins, maxs, True


def minority_majority(profile: CountProfile) -> MinorityMajority:
    v_min, v_max, v_ok = _extremes(profile.v_counts)
    e_min, e_max, e_ok = _extremes(profile.e_counts)
    return MinorityMajority(v_min, v_max, v_ok, e_min, e_max, e_ok)


# ---------------------------------------------------------------------------
# Labeling documents (the CLI interchange format).


def labeling_document(
    structure: Structure,
    f: Labeling,
    root_vertex_ids: Optional[Sequence[int]] = None,
) -> dict:
    """Serialize a labeling as the JSON document the CLI emits and consumes.

    For pieces, ``valid`` means the rooted-forest conditions hold for some
    surplus weight; ``root_vertex_ids`` lets callers that track external
    vertex numbering (e.g. shape files) preserve it, defaulting to the root
    indices themselves.
    """
    profile = count_profile(structure, f)
    doc: dict = {"k": f.k, "labels": list(f.labels)}
    if isinstance(structure, RootedPiece):
        assert f.root_labels is not None
        ids = (
            list(range(structure.num_roots))
            if root_vertex_ids is None
            else list(root_vertex_ids)
        )
        if len(ids) != structure.num_roots:
            raise LabelingError("root_vertex_ids length mismatch")
        doc["roots"] = [
            {"vertex": ids[i], "label": f.root_labels[i]}
            for i in range(structure.num_roots)
        ]
        doc["valid"] = any(
            check_piece_cordial(structure, f, ell).ok for ell in range(f.k)
        )
    else:
        doc["valid"] = is_k_cordial(structure, f).ok
    doc["v_counts"] = list(profile.v_counts)
    doc["e_counts"] = list(profile.e_counts)
    return doc


@dataclass(frozen=True)
class LabelingDocument:
    k: int
    labels: tuple[int, ...]
    roots: Optional[tuple[tuple[int, int], ...]]  # (vertex, label) pairs


def parse_labeling_document(source: Union[str, dict]) -> LabelingDocument:
    """Parse a labeling document; only k/labels/roots are load-bearing."""
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise LabelingError(f"labeling document is not valid JSON: {exc}") from None
    else:
        data = source
    if not isinstance(data, dict):
        raise LabelingError("labeling document must be a JSON object")
    try:
        k = int(data["k"])
        labels = tuple(int(x) for x in data["labels"])
    except (KeyError, TypeError, ValueError) as exc:
        raise LabelingError(f"labeling document missing/invalid k or labels: {exc}") from None
    roots = None
    if "roots" in data and data["roots"] is not None:
        try:
            roots = tuple(
                (int(r["vertex"]), int(r["label"])) for r in data["roots"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise LabelingError(f"labeling document has invalid roots: {exc}") from None
    for x in labels:
        if not 0 <= x < k:
            raise LabelingError(f"label {x} outside Z_{k}")
    if roots is not None:
        for _, lab in roots:
            if not 0 <= lab < k:
                raise LabelingError(f"root label {lab} outside Z_{k}")
    return LabelingDocument(k, labels, roots)
