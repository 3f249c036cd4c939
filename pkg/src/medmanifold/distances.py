"""Concept-level and record-level distance functions.

Concept distances compare two concepts' full co-occurrence rows (cosine,
Manhattan, Euclidean, a phi-style co-occurrence dissimilarity) or fall
back to the taxonomy-only Wu-Palmer baseline. Record distances aggregate
concept distances over two concept sets in four ways: closest-pair
averaging, symmetric-difference averaging, all-pairs averaging (average
linkage), and a minimum-cost maximum-cardinality bipartite matching.

All concept-pair values are memoized per oracle instance because record
distances reuse them heavily.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .corpus import CooccurrenceMatrix, RecordCorpus
from .errors import ArgumentError, DataError, DegenerateInputError, FormatError
from .hierarchy import ConceptHierarchy

CD_KINDS = ("cosine", "manhattan", "euclidean", "ehdn", "wu_palmer")
SD_KINDS = ("sd1", "sd2", "sd3", "sd4")


class ConceptDistances:
    """Memoized concept-distance oracle over one co-occurrence matrix.

    Parameters
    ----------
    kind : str
        One of :data:`CD_KINDS`. ``wu_palmer`` requires ``hierarchy``;
        the other kinds require ``cooc``.
    cooc : CooccurrenceMatrix, optional
        Source of concept row vectors.
    hierarchy : ConceptHierarchy, optional
        Taxonomy for the Wu-Palmer baseline.
    ehdn_population : bool
        When true the phi-style formula uses the expanded record count
        (sum of collapse frequencies) in place of the vocabulary size.
        Default keeps the vocabulary-size convention.
    """

    def __init__(self, kind, cooc: CooccurrenceMatrix = None,
                 hierarchy: ConceptHierarchy = None, ehdn_population: bool = False):
        if kind not in CD_KINDS:
            raise ArgumentError(f"unknown concept distance kind {kind!r}")
        if kind == "wu_palmer":
            if hierarchy is None:
                raise ArgumentError("wu_palmer distance requires a hierarchy")
        elif cooc is None:
            raise ArgumentError(f"{kind} distance requires a co-occurrence matrix")
        self.kind = kind
        self.cooc = cooc
        self.hierarchy = hierarchy
        self.ehdn_population = ehdn_population
        self._cache: dict = {}
        self._rows: dict = {}

    def _row(self, concept):
        cached = self._rows.get(concept)
        if cached is None:
            vec = self.cooc.row(concept)
            cached = (vec, float(np.linalg.norm(vec)), float(vec.sum()))
            self._rows[concept] = cached
        return cached

    def __call__(self, a, b) -> float:
        if a == b:
            return 0.0
        key = (a, b) if a <= b else (b, a)
        value = self._cache.get(key)
        if value is None:
            value = self._compute(*key)
            self._cache[key] = value
        return value

    def _compute(self, a, b) -> float:
        if self.kind == "wu_palmer":
            return self.hierarchy.wu_palmer_distance(a, b)
        row_a, norm_a, sum_a = self._row(a)
        row_b, norm_b, sum_b = self._row(b)
        if self.kind == "cosine":
            if norm_a == 0.0 or norm_b == 0.0:
                zero = a if norm_a == 0.0 else b
                raise DegenerateInputError(f"concept {zero!r} has a zero co-occurrence row")
            # clamp float fuzz on near-identical rows
            return max(0.0, 1.0 - float(row_a @ row_b) / (norm_a * norm_b))
        if self.kind == "manhattan":
            return float(np.abs(row_a - row_b).sum())
        if self.kind == "euclidean":
            return float(np.linalg.norm(row_a - row_b))
        # phi-style co-occurrence dissimilarity
        n = float(self.cooc.total_records if self.ehdn_population else self.cooc.n_concepts)
        c_ab = float(row_a[self.cooc.index_of(b)])
        denom_sq = sum_a * sum_b * (n - sum_a) * (n - sum_b)
        if denom_sq <= 0.0:
            # at least one factor is non-positive; name the concept it belongs to
            if sum_a <= 0.0 or n - sum_a <= 0.0:
                offender = a
            else:
                offender = b
            raise DegenerateInputError(
                f"degenerate row for concept {offender!r}: "
                f"phi denominator is non-positive (row sums {sum_a:g}, {sum_b:g}, N={n:g})"
            )
        return 1.0 - (c_ab * n - sum_a * sum_b) / np.sqrt(denom_sq)

    def pair_matrix(self, concepts) -> np.ndarray:
        """Dense symmetric distance matrix over an explicit concept list.

        Equals calling the oracle on every pair (self-distance 0 for all
        kinds), but computed with vectorized row arithmetic where the
        kind allows it.
        """
        concepts = list(concepts)
        m = len(concepts)
        if self.kind == "wu_palmer":
            values = np.zeros((m, m))
            for i in range(m):
                for j in range(i + 1, m):
                    d = self(concepts[i], concepts[j])
                    values[i, j] = d
                    values[j, i] = d
            return values
        rows = np.array([self._row(c)[0] for c in concepts])
        if self.kind == "cosine":
            norms = np.linalg.norm(rows, axis=1)
            if np.any(norms == 0.0):
                zero = concepts[int(np.argmin(norms))]
                raise DegenerateInputError(f"concept {zero!r} has a zero co-occurrence row")
            values = 1.0 - (rows @ rows.T) / np.outer(norms, norms)
            values = np.maximum(values, 0.0)
        elif self.kind == "manhattan":
            values = cdist(rows, rows, metric="cityblock")
        elif self.kind == "euclidean":
            values = cdist(rows, rows, metric="euclidean")
        else:
            n = float(self.cooc.total_records if self.ehdn_population else self.cooc.n_concepts)
            sums = rows.sum(axis=1)
            factors = sums * (n - sums)
            denom_sq = np.outer(factors, factors)
            bad = denom_sq <= 0.0
            np.fill_diagonal(bad, False)
            if bad.any():
                i = int(np.flatnonzero(factors <= 0.0)[0])
                raise DegenerateInputError(
                    f"degenerate row for concept {concepts[i]!r}: "
                    f"phi denominator is non-positive (row sum {sums[i]:g}, N={n:g})"
                )
            cols = [self.cooc.index_of(c) for c in concepts]
            c_sub = rows[:, cols]
            with np.errstate(invalid="ignore", divide="ignore"):
                values = 1.0 - (c_sub * n - np.outer(sums, sums)) / np.sqrt(denom_sq)
        values = 0.5 * (values + values.T)
        np.fill_diagonal(values, 0.0)
        return values


def record_distance(kind, cd, vi, vj) -> float:
    """Distance between two concept sets under the chosen aggregation.

    ``cd`` is any symmetric callable ``cd(a, b) -> float``; both sets must
    be non-empty.
    """
    if kind not in SD_KINDS:
        raise ArgumentError(f"unknown record distance kind {kind!r}")
    vi = sorted(set(vi))
    vj = sorted(set(vj))
    if not vi or not vj:
        raise ArgumentError("record distance of an empty concept set")
    if kind == "sd1":
        total = sum(min(cd(a, b) for b in vj) for a in vi)
        total += sum(min(cd(b, a) for a in vi) for b in vj)
        return total / (len(vi) + len(vj))
    if kind == "sd2":
        si, sj = set(vi), set(vj)
        total = sum(sum(cd(a, b) for b in vj) / len(vj) for a in vi if a not in sj)
        total += sum(sum(cd(b, a) for a in vi) / len(vi) for b in vj if b not in si)
        return total / len(si | sj)
    if kind == "sd3":
        return sum(cd(a, b) for a in vi for b in vj) / (len(vi) * len(vj))
    # sd4: mean cost of a minimum-total-cost maximum-cardinality matching;
    # concepts left unmatched by the size-min(|vi|,|vj|) matching are excluded
    cost = np.array([[cd(a, b) for b in vj] for a in vi])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())


@dataclass
class DistanceMatrix:
    """Symmetric pairwise distances with a zero diagonal, indexed by id."""

    ids: list
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.ids), len(self.ids)):
            raise ArgumentError("distance matrix shape does not match ids")
        if not np.allclose(v, v.T, rtol=0.0, atol=1e-12):
            raise DataError("distance matrix is not symmetric")
        if np.any(v < 0.0):
            raise DataError("distance matrix has negative entries")
        if np.any(np.diag(v) != 0.0):
            raise DataError("distance matrix diagonal is not zero")
        self.values = v

    @property
    def n(self) -> int:
        return len(self.ids)

    def index_of(self, item_id) -> int:
        try:
            return self.ids.index(item_id)
        except ValueError:
            raise ArgumentError(f"unknown item id {item_id!r}") from None


def _set_distance(kind, sub: np.ndarray, only_i, only_j, union_size: int) -> float:
    """Record distance from the concept-pair submatrix (rows = Vi, cols = Vj)."""
    if kind == "sd1":
        return float(sub.min(axis=1).sum() + sub.min(axis=0).sum()) / (sub.shape[0] + sub.shape[1])
    if kind == "sd2":
        total = float(sub[only_i, :].mean(axis=1).sum()) if len(only_i) else 0.0
        total += float(sub[:, only_j].mean(axis=0).sum()) if len(only_j) else 0.0
        return total / union_size
    if kind == "sd3":
        return float(sub.mean())
    rows, cols = linear_sum_assignment(sub)
    return float(sub[rows, cols].mean())


def pairwise_record_distances(kind, cd, corpus: RecordCorpus) -> DistanceMatrix:
    """Full symmetric record-record distance matrix in corpus order.

    Distances are computed on the concept sets exactly as stored in
    ``corpus``; pass the raw corpus to follow the convention that set
    sizes count original concepts while ``cd`` already reflects the
    augmented co-occurrence rows.

    When ``cd`` is a :class:`ConceptDistances` oracle the concept-pair
    matrix over the corpus vocabulary is computed up front and the per
    record-pair work runs on submatrix views; the result is identical to
    calling :func:`record_distance` pair by pair.
    """
    if kind not in SD_KINDS:
        raise ArgumentError(f"unknown record distance kind {kind!r}")
    records = corpus.records
    n = len(records)
    values = np.zeros((n, n))
    if isinstance(cd, ConceptDistances):
        union = sorted(set().union(*(r.concepts for r in records)))
        index = {c: i for i, c in enumerate(union)}
        full = cd.pair_matrix(union)
        concept_idx = [np.array([index[c] for c in sorted(r.concepts)], dtype=int)
                       for r in records]
        concept_sets = [set(idx.tolist()) for idx in concept_idx]
        for i in range(n):
            for j in range(i + 1, n):
                ia, ib = concept_idx[i], concept_idx[j]
                sub = full[np.ix_(ia, ib)]
                sj, si = concept_sets[j], concept_sets[i]
                only_i = [p for p, c in enumerate(ia.tolist()) if c not in sj]
                only_j = [p for p, c in enumerate(ib.tolist()) if c not in si]
                d = _set_distance(kind, sub, only_i, only_j, len(si | sj))
                values[i, j] = d
                values[j, i] = d
    else:
        for i in range(n):
            for j in range(i + 1, n):
                try:
                    d = record_distance(kind, cd, records[i].concepts, records[j].concepts)
                except DataError as exc:
                    raise type(exc)(
                        f"records {records[i].id!r} vs {records[j].id!r}: {exc}"
                    ) from exc
                values[i, j] = d
                values[j, i] = d
    return DistanceMatrix(ids=corpus.ids(), values=values)


def concept_distance_matrix(cd, concepts) -> DistanceMatrix:
    """Pairwise concept distances over an explicit concept list."""
    concepts = list(concepts)
    if isinstance(cd, ConceptDistances):
        return DistanceMatrix(ids=concepts, values=cd.pair_matrix(concepts))
    n = len(concepts)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = cd(concepts[i], concepts[j])
            values[i, j] = d
            values[j, i] = d
    return DistanceMatrix(ids=concepts, values=values)


def write_distance_tsv(dm: DistanceMatrix, path) -> None:
    """Dense TSV with a leading id header row and id-labelled rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id\t" + "\t".join(str(i) for i in dm.ids) + "\n")
        for item_id, row in zip(dm.ids, dm.values):
            fh.write(str(item_id) + "\t" + "\t".join(f"{v:.6f}" for v in row) + "\n")


def read_distance_tsv(path) -> DistanceMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if not header or header[0] != "id":
            raise FormatError(f"{path}: missing 'id' header")
        ids = header[1:]
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != len(ids) + 1:
                raise FormatError(f"{path}:{lineno}: wrong column count")
            rows.append([float(x) for x in parts[1:]])
    if len(rows) != len(ids):
        raise FormatError(f"{path}: row count does not match header")
    return DistanceMatrix(ids=ids, values=np.array(rows))


def write_distance_pairs_tsv(dm: DistanceMatrix, path) -> None:
    """Sparse pair-list form ``id_i<TAB>id_j<TAB>distance``, i < j."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(dm.n):
            for j in range(i + 1, dm.n):
                fh.write(f"{dm.ids[i]}\t{dm.ids[j]}\t{dm.values[i, j]:.6f}\n")
