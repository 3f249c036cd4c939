"""Deterministic synthetic corpora for pipeline exercises and tests.

Two generators: cohort corpora over a balanced concept tree (each cohort
samples mostly from its own disjoint leaf cluster, with optional leakage
noise and label flips) and a 1-D chain of sliding-window records whose
overlap decays with index gap. Both are driven by Python's Mersenne
Twister (``random.Random``), so a fixed seed reproduces output
byte-for-byte on any platform.
"""

import itertools
import random
from dataclasses import dataclass

from .corpus import Record, RecordCorpus
from .errors import ArgumentError
from .hierarchy import ConceptHierarchy, load_hierarchy


@dataclass
class SynthConfig:
    """Knobs for the cohort generator.

    ``noise`` is the per-concept probability of drawing from the global
    leaf pool instead of the cohort's own cluster; ``flip_prob`` is the
    probability of flipping a record's cohort-derived outcome label.
    """

    seed: int = 0
    depth: int = 3
    branching: int = 5
    n_cohorts: int = 3
    cluster_size: int = 25
    records_per_cohort: int = 100
    concepts_min: int = 3
    concepts_max: int = 8
    noise: float = 0.0
    flip_prob: float = 0.0

    def validate(self):
        for name in ("depth", "branching", "n_cohorts", "cluster_size",
                     "records_per_cohort", "concepts_min", "concepts_max"):
            if getattr(self, name) < 1:
                raise ArgumentError(f"{name} must be >= 1")
        if self.concepts_min > self.concepts_max:
            raise ArgumentError("concepts_min exceeds concepts_max")
        for name in ("noise", "flip_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ArgumentError(f"{name} must be in [0, 1]")
        if self.concepts_max > self.cluster_size:
            raise ArgumentError("concepts_max exceeds cluster_size; records could not be filled")


def _balanced_tree(depth: int, branching: int):
    """Edges and depth-ordered leaves of a balanced code tree.

    Node codes are dot-joined digit paths under a ``t`` prefix; leaves
    sit at the configured depth, in depth-first order (so consecutive
    leaves share long prefixes).
    """
    edges = []
    leaves = []
    for level in range(1, depth + 1):
        for path in itertools.product(range(1, branching + 1), repeat=level):
            code = "t" + ".".join(str(p) for p in path)
            if level > 1:
                parent = "t" + ".".join(str(p) for p in path[:-1])
                edges.append((code, parent))
            if level == depth:
                leaves.append(code)
    return edges, leaves


def generate(cfg: SynthConfig):
    """Cohort corpus with ground truth.

    Returns ``(hierarchy, corpus, groups, cohorts)`` where ``groups``
    maps each parent-of-leaf branch node to its leaf children (subtree
    membership, the stand-in gold standard for code referencing) and
    ``cohorts`` maps record ids to their true cohort tag.
    """
    cfg.validate()
    edges, leaves = _balanced_tree(cfg.depth, cfg.branching)
    if cfg.n_cohorts * cfg.cluster_size > len(leaves):
        raise ArgumentError(
            f"{cfg.n_cohorts} cohorts x {cfg.cluster_size} concepts need more than "
            f"the {len(leaves)} available leaves"
        )
    if not edges:
        # depth-1 tree: leaves are top-level nodes
        edges = [(leaf, "ROOT") for leaf in leaves]
    hierarchy = load_hierarchy(edges)

    clusters = [leaves[c * cfg.cluster_size:(c + 1) * cfg.cluster_size]
                for c in range(cfg.n_cohorts)]
    rng = random.Random(cfg.seed)
    records = []
    cohorts = {}
    for c in range(cfg.n_cohorts):
        for r in range(cfg.records_per_cohort):
            size = rng.randint(cfg.concepts_min, cfg.concepts_max)
            concepts = set()
            while len(concepts) < size:
                pool = leaves if rng.random() < cfg.noise else clusters[c]
                concepts.add(rng.choice(pool))
            label = c % 2
            if rng.random() < cfg.flip_prob:
                label = 1 - label
            rec_id = f"c{c}-r{r:04d}"
            cohort = f"cohort{c}"
            records.append(Record(id=rec_id, concepts=frozenset(concepts),
                                  frequency=1, label=label, cohort=cohort))
            cohorts[rec_id] = cohort
    corpus = RecordCorpus(records)

    # groups cover only concepts that occur, so every anchor is reachable
    # through augmentation in the corpus vocabulary
    used = set(corpus.vocabulary)
    groups = {}
    for child, parent in edges:
        if child in leaves and child in used and parent != "ROOT":
            groups.setdefault(parent, set()).add(child)
    if not groups:
        groups = {"all": used}
    return hierarchy, corpus, groups, cohorts


def generate_chain(n: int, seed: int = 0) -> RecordCorpus:
    """Sliding-window records along a 1-D concept chain.

    Record i holds the window of consecutive chain concepts starting at
    i; the window length (10-14, drawn once from the seed) exceeds 9, so
    any two of the first ten records always overlap and their distance
    grows with index gap.
    """
    if n < 4:
        raise ArgumentError(f"chain needs n >= 4, got {n}")
    rng = random.Random(seed)
    window = rng.randint(10, 14)
    records = []
    for i in range(n):
        concepts = frozenset(f"ch{j:05d}" for j in range(i, i + window))
        records.append(Record(id=f"s{i:05d}", concepts=concepts, frequency=1))
    return RecordCorpus(records)


def chain_hierarchy(corpus: RecordCorpus) -> ConceptHierarchy:
    """Flat hierarchy for a chain corpus: every concept is top-level."""
    return load_hierarchy([(c, "ROOT") for c in corpus.vocabulary])
