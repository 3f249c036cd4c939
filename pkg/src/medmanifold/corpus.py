"""Weighted concept-set records and the matrices derived from them.

A record is a deduplicated set of concept codes with a collapse count
(``frequency``: how many identical raw records it stands for). Ancestor
augmentation enriches each record with every proper ancestor of its
concepts so that category-level co-occurrence becomes observable; the
occurrence and co-occurrence matrices are then built over the augmented
vocabulary. Row vectors of the co-occurrence matrix are the full-rank
concept representations; a seeded Gaussian random projection provides the
low-dimensional ones.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ArgumentError, FormatError, UnknownConceptError
from .hierarchy import ConceptHierarchy


@dataclass(frozen=True)
class Record:
    """One collapsed record: a concept set plus bookkeeping.

    ``frequency`` is the number of identical raw records collapsed into
    this one and must be >= 1; ``label`` is an optional binary outcome and
    ``cohort`` an optional group tag.
    """

    id: str
    concepts: frozenset
    frequency: int = 1
    label: int | None = None
    cohort: str | None = None

    def __post_init__(self):
        if not self.concepts:
            raise ArgumentError(f"record {self.id!r} has no concepts")
        if self.frequency < 1:
            raise ArgumentError(f"record {self.id!r} has frequency {self.frequency} < 1")
        if self.label is not None and self.label not in (0, 1):
            raise ArgumentError(f"record {self.id!r} has non-binary label {self.label!r}")
        object.__setattr__(self, "concepts", frozenset(self.concepts))


class RecordCorpus:
    """Ordered list of records plus the sorted vocabulary they span."""

    def __init__(self, records):
        self.records = list(records)
        if not self.records:
            raise ArgumentError("corpus is empty")
        vocab = set()
        for r in self.records:
            vocab |= r.concepts
        self.vocabulary = sorted(vocab)

    @property
    def n(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def frequencies(self) -> np.ndarray:
        return np.array([r.frequency for r in self.records], dtype=np.int64)

    def labels(self) -> np.ndarray:
        if any(r.label is None for r in self.records):
            raise ArgumentError("corpus has records without labels")
        return np.array([r.label for r in self.records], dtype=np.int64)


def resolve_concept(hierarchy: ConceptHierarchy, code: str, on_missing: str = "attach"):
    """Ancestor chain for ``code`` under the missing-concept policy.

    ``attach`` treats an unknown code as a leaf under the virtual root
    (no ancestors) with a warning; ``strict`` raises.
    """
    if code in hierarchy:
        return hierarchy.ancestors(code)
    if on_missing == "strict":
        raise UnknownConceptError(f"concept {code!r} is not in the hierarchy")
    warnings.warn(f"concept {code!r} not in hierarchy; attached under the virtual root")
    return []


def augment_record(hierarchy: ConceptHierarchy, record: Record, on_missing: str = "attach") -> Record:
    """Record enriched with all proper ancestors of its concepts."""
    enriched = set(record.concepts)
    for code in record.concepts:
        enriched.update(resolve_concept(hierarchy, code, on_missing))
    return Record(
        id=record.id,
        concepts=frozenset(enriched),
        frequency=record.frequency,
        label=record.label,
        cohort=record.cohort,
    )


def augment_corpus(hierarchy: ConceptHierarchy, corpus: RecordCorpus, on_missing: str = "attach") -> RecordCorpus:
    return RecordCorpus([augment_record(hierarchy, r, on_missing) for r in corpus])


@dataclass
class OccurrenceMatrix:
    """Binary record x concept matrix over augmented records.

    Rows follow corpus order, columns the lexicographic vocabulary;
    ``frequencies`` carries the per-row collapse counts.
    """

    matrix: sp.csr_matrix
    vocabulary: list
    record_ids: list
    frequencies: np.ndarray


def build_occurrence(hierarchy: ConceptHierarchy, corpus: RecordCorpus, on_missing: str = "attach") -> OccurrenceMatrix:
    """Augment every record and mark concept membership.

    The vocabulary is the lexicographically sorted union of augmented
    concepts, independent of record order.
    """
    augmented = augment_corpus(hierarchy, corpus, on_missing)
    vocab = augmented.vocabulary
    col = {c: j for j, c in enumerate(vocab)}
    rows, cols = [], []
    for i, rec in enumerate(augmented):
        for c in rec.concepts:
            rows.append(i)
            cols.append(col[c])
    data = np.ones(len(rows), dtype=np.int64)
    matrix = sp.csr_matrix((data, (rows, cols)), shape=(augmented.n, len(vocab)))
    return OccurrenceMatrix(
        matrix=matrix,
        vocabulary=vocab,
        record_ids=augmented.ids(),
        frequencies=augmented.frequencies(),
    )


@dataclass
class CooccurrenceMatrix:
    """Symmetric concept x concept co-occurrence counts.

    Entry (a, b) is the frequency-weighted number of records whose
    augmented concept set contains both a and b; the diagonal holds the
    weighted occurrence count of each concept.
    """

    matrix: sp.csr_matrix
    vocabulary: list
    total_records: int = 0  # sum of collapse counts, for the population eHDN variant
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {c: i for i, c in enumerate(self.vocabulary)}

    @property
    def n_concepts(self) -> int:
        return len(self.vocabulary)

    def index_of(self, concept: str) -> int:
        try:
            return self._index[concept]
        except KeyError:
            raise UnknownConceptError(f"concept {concept!r} is not in the vocabulary") from None

    def row(self, concept: str) -> np.ndarray:
        """Dense float copy of one concept's co-occurrence row."""
        return np.asarray(self.matrix[self.index_of(concept)].todense(), dtype=float).ravel()

    def dense(self) -> np.ndarray:
        return np.asarray(self.matrix.todense(), dtype=np.int64)


def build_cooccurrence(occurrence: OccurrenceMatrix) -> CooccurrenceMatrix:
    """C = O^T diag(f) O: each collapsed record contributes its frequency
    to every concept pair (including self-pairs) it contains."""
    o = occurrence.matrix
    weighted = o.T.multiply(occurrence.frequencies).tocsr()
    c = (weighted @ o).tocsr()
    c.sort_indices()
    return CooccurrenceMatrix(
        matrix=c,
        vocabulary=list(occurrence.vocabulary),
        total_records=int(occurrence.frequencies.sum()),
    )


@dataclass
class ProjectedConcepts:
    """Row-per-concept dense representation C' = C R with R ~ N(0, 1/k)."""

    matrix: np.ndarray
    vocabulary: list
    k: int
    seed: int
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {c: i for i, c in enumerate(self.vocabulary)}

    def row(self, concept: str) -> np.ndarray:
        try:
            return self.matrix[self._index[concept]]
        except KeyError:
            raise UnknownConceptError(f"concept {concept!r} is not in the vocabulary") from None


def random_projection(cooc: CooccurrenceMatrix, k: int, seed: int) -> ProjectedConcepts:
    """Project co-occurrence rows to k dimensions with a seeded Gaussian map.

    Entries of the projection matrix are i.i.d. N(0, 1/k), the scaling
    that preserves expected norms; the generator is NumPy's PCG64, so a
    fixed (seed, vocabulary order) pair reproduces C' bitwise.
    """
    n = cooc.n_concepts
    if not 1 <= k < n:
        raise ArgumentError(f"projection dimension k={k} must satisfy 1 <= k < N={n}")
    rng = np.random.default_rng(seed)
    r = rng.normal(0.0, 1.0 / np.sqrt(k), size=(n, k))
    projected = np.asarray(cooc.matrix.astype(float) @ r)
    return ProjectedConcepts(matrix=projected, vocabulary=list(cooc.vocabulary), k=k, seed=seed)


def read_records_jsonl(path) -> RecordCorpus:
    """Load records from JSONL: one object per line with ``id``, ``codes``,
    optional ``freq`` (default 1), ``label`` (0/1) and ``cohort``."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            try:
                records.append(
                    Record(
                        id=str(obj["id"]),
                        concepts=frozenset(str(c) for c in obj["codes"]),
                        frequency=int(obj.get("freq", 1)),
                        label=obj.get("label"),
                        cohort=obj.get("cohort"),
                    )
                )
            except KeyError as exc:
                raise FormatError(f"{path}:{lineno}: missing field {exc}") from None
    return RecordCorpus(records)


def write_records_jsonl(corpus: RecordCorpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in corpus:
            obj = {"id": r.id, "codes": sorted(r.concepts)}
            if r.frequency != 1:
                obj["freq"] = r.frequency
            if r.label is not None:
                obj["label"] = r.label
            if r.cohort is not None:
                obj["cohort"] = r.cohort
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def write_cooccurrence_tsv(cooc: CooccurrenceMatrix, path) -> None:
    """Sparse pair-list export: ``concept_a<TAB>concept_b<TAB>count`` with
    a <= b lexicographically, upper triangle plus diagonal, sorted."""
    coo = cooc.matrix.tocoo()
    vocab = cooc.vocabulary
    pairs = {}
    for i, j, v in zip(coo.row, coo.col, coo.data):
        if i <= j:
            pairs[(vocab[i], vocab[j])] = int(v)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# total_records\t{cooc.total_records}\n")
        for (a, b) in sorted(pairs):
            fh.write(f"{a}\t{b}\t{pairs[(a, b)]}\n")


def read_cooccurrence_tsv(path) -> CooccurrenceMatrix:
    entries = {}
    vocab = set()
    total = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.startswith("# total_records\t"):
                total = int(line.split("\t")[1])
                continue
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"{path}:{lineno}: expected 'a<TAB>b<TAB>count'")
            a, b, v = parts[0], parts[1], int(parts[2])
            vocab.add(a)
            vocab.add(b)
            entries[(a, b)] = v
    if not entries:
        raise FormatError(f"{path}: no co-occurrence entries")
    order = sorted(vocab)
    idx = {c: i for i, c in enumerate(order)}
    rows, cols, data = [], [], []
    for (a, b), v in entries.items():
        i, j = idx[a], idx[b]
        rows.append(i)
        cols.append(j)
        data.append(v)
        if i != j:
            rows.append(j)
            cols.append(i)
            data.append(v)
    matrix = sp.csr_matrix((data, (rows, cols)), shape=(len(order), len(order)), dtype=np.int64)
    return CooccurrenceMatrix(matrix=matrix, vocabulary=order, total_records=total)
