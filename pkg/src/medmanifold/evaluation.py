"""Quality metrics for concept and record representations.

Code referencing is scored with NDCG@k over per-group retrieval lists;
clusterings are scored with the inter/intra distance ratio and the
silhouette coefficient; a small k-NN voting classifier with AUC provides
the downstream signal check.
"""

import numpy as np
from scipy.stats import rankdata

from .corpus import ProjectedConcepts
from .distances import DistanceMatrix
from .errors import ArgumentError, DegenerateInputError, FormatError, UnknownConceptError
from .spectral import Embedding


def _cosine_distances(anchor: np.ndarray, rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    anchor_norm = np.linalg.norm(anchor)
    if anchor_norm == 0.0 or np.any(norms == 0.0):
        raise DegenerateInputError("zero-norm representation row under cosine distance")
    return 1.0 - (rows @ anchor) / (norms * anchor_norm)


def ndcg_at_k(space, groups: dict, k: int, ideal_mode: str = "capped",
              candidates=None, metric: str = "cosine") -> float:
    """Mean NDCG@k of per-group concept retrieval.

    For every group id (the anchor) the candidate concepts are ranked by
    ascending distance to the anchor in ``space`` (a
    :class:`ProjectedConcepts` or a precomputed concept
    :class:`DistanceMatrix`); position p in the top k earns gain
    1/log2(p+1) when the candidate belongs to the group.

    ``ideal_mode='literal'`` normalizes by the ideal gain of all x_i
    members regardless of k (the printed convention, which stays below 1
    when x_i > k even for perfect retrieval); ``'capped'`` normalizes by
    min(k, x_i). Ranking ties break by ascending concept id.

    ``candidates`` defaults to every concept in the space except the
    group anchors themselves.
    """
    if k < 1:
        raise ArgumentError(f"k={k} must be >= 1")
    if ideal_mode not in ("literal", "capped"):
        raise ArgumentError(f"ideal_mode={ideal_mode!r} must be 'literal' or 'capped'")
    if not groups:
        raise ArgumentError("no concept groups given")

    if isinstance(space, ProjectedConcepts):
        ids = list(space.vocabulary)
    elif isinstance(space, DistanceMatrix):
        ids = list(space.ids)
    else:
        raise ArgumentError("space must be ProjectedConcepts or DistanceMatrix")
    id_set = set(ids)
    if candidates is None:
        anchors = set(groups)
        candidates = [c for c in ids if c not in anchors]
    candidates = list(candidates)
    for c in candidates:
        if c not in id_set:
            raise UnknownConceptError(f"candidate {c!r} is not in the representation space")

    if isinstance(space, ProjectedConcepts):
        rows = np.array([space.row(c) for c in candidates])

    scores = []
    for group_id in sorted(groups):
        members = set(groups[group_id])
        if not members:
            raise ArgumentError(f"group {group_id!r} is empty")
        if group_id not in id_set:
            raise UnknownConceptError(f"group anchor {group_id!r} is not in the representation space")
        if isinstance(space, ProjectedConcepts):
            anchor = space.row(group_id)
            if metric == "cosine":
                dist = _cosine_distances(anchor, rows)
            elif metric == "euclidean":
                dist = np.linalg.norm(rows - anchor, axis=1)
            else:
                raise ArgumentError(f"metric={metric!r} must be 'cosine' or 'euclidean'")
        else:
            row = space.values[space.index_of(group_id)]
            dist = np.array([row[space.index_of(c)] for c in candidates])
        ranked = sorted(range(len(candidates)), key=lambda i: (dist[i], candidates[i]))
        top = ranked[:k]
        dcg = sum(1.0 / np.log2(p + 2) for p, i in enumerate(top) if candidates[i] in members)
        ideal = len(members) if ideal_mode == "literal" else min(k, len(members))
        idcg = sum(1.0 / np.log2(p + 2) for p in range(ideal))
        scores.append(dcg / idcg)
    return float(np.mean(scores))


def _distance_table(x):
    """(ids, dense pairwise distance matrix) from an Embedding or DistanceMatrix."""
    if isinstance(x, Embedding):
        coords = x.coords
        sq = np.sum(coords ** 2, axis=1)
        gram = coords @ coords.T
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * gram, 0.0)
        values = np.sqrt(d2)
        np.fill_diagonal(values, 0.0)
        return list(x.ids), values
    if isinstance(x, DistanceMatrix):
        return list(x.ids), x.values
    raise ArgumentError("expected an Embedding or DistanceMatrix")


def _cluster_indices(ids, clusters: dict):
    if set(ids) != set(clusters):
        raise ArgumentError("cluster assignment does not cover exactly the item ids")
    labels = sorted(set(clusters.values()))
    if len(labels) < 2:
        raise ArgumentError("need at least 2 clusters")
    return {lab: [i for i, item in enumerate(ids) if clusters[item] == lab] for lab in labels}


def cluster_ratio(x, clusters: dict) -> float:
    """Mean inter-cluster distance over mean intra-cluster distance.

    Both means pool all qualifying pairs. All-singleton clusterings have
    no intra pair and degenerate 0/0 ratios (every pooled distance zero)
    are rejected rather than silently reported as 1.
    """
    ids, values = _distance_table(x)
    by_label = _cluster_indices(ids, clusters)
    labels = sorted(by_label)
    intra, inter = [], []
    for li, lab_i in enumerate(labels):
        members_i = by_label[lab_i]
        for a in range(len(members_i)):
            for b in range(a + 1, len(members_i)):
                intra.append(values[members_i[a], members_i[b]])
        for lab_j in labels[li + 1:]:
            for a in members_i:
                for b in by_label[lab_j]:
                    inter.append(values[a, b])
    if not intra:
        raise DegenerateInputError("no intra-cluster pair exists (all clusters are singletons)")
    d_intra = float(np.mean(intra))
    d_inter = float(np.mean(inter))
    if d_intra == 0.0:
        if d_inter == 0.0:
            raise DegenerateInputError("all pairwise distances are zero; ratio is 0/0")
        return float("inf")
    return d_inter / d_intra


def silhouette(x, clusters: dict) -> float:
    """Mean silhouette coefficient in [-1, 1].

    For each item, a = mean distance to its own cluster (self excluded)
    and b = smallest mean distance to any other cluster; the item scores
    (b - a)/max(a, b). Items in singleton clusters score 0 by convention.
    """
    ids, values = _distance_table(x)
    by_label = _cluster_indices(ids, clusters)
    scores = np.zeros(len(ids))
    for i, item in enumerate(ids):
        own = clusters[item]
        own_members = by_label[own]
        if len(own_members) == 1:
            continue
        a = values[i, own_members].sum() / (len(own_members) - 1)
        b = min(values[i, by_label[lab]].mean() for lab in by_label if lab != own)
        denom = max(a, b)
        if denom > 0.0:
            scores[i] = (b - a) / denom
    return float(scores.mean())


def knn_scores(train_coords: np.ndarray, train_labels: np.ndarray,
               test_coords: np.ndarray, k_vote: int) -> np.ndarray:
    """Fraction of positive labels among each test item's k nearest
    training items (Euclidean; ties broken by training index)."""
    train_coords = np.asarray(train_coords, dtype=float)
    test_coords = np.asarray(test_coords, dtype=float)
    train_labels = np.asarray(train_labels)
    if not 1 <= k_vote <= len(train_labels):
        raise ArgumentError(f"k_vote={k_vote} out of range for {len(train_labels)} training items")
    diffs = test_coords[:, None, :] - train_coords[None, :, :]
    dist = np.sqrt(np.sum(diffs ** 2, axis=2))
    order = np.argsort(dist, axis=1, kind="stable")[:, :k_vote]
    return train_labels[order].mean(axis=1)


def auc(scores, labels) -> float:
    """Rank-based AUC (Mann-Whitney statistic), counting ties as 1/2."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = labels == 1
    neg = labels == 0
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise ArgumentError("AUC needs both classes present")
    ranks = rankdata(scores)
    rank_sum = float(ranks[pos].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def knn_auc(train: Embedding, train_labels, test: Embedding, test_labels, k_vote: int) -> float:
    """AUC of the k-NN vote score on held-out items."""
    train_labels = np.asarray(train_labels)
    if len(set(train_labels.tolist())) < 2:
        raise ArgumentError("training set contains a single class")
    scores = knn_scores(train.coords, train_labels, test.coords, k_vote)
    return auc(scores, np.asarray(test_labels))


def read_groups_tsv(path) -> dict:
    """Load ``group_id<TAB>member_id`` lines into {group: set(members)}."""
    groups: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'group_id<TAB>member_id'")
            groups.setdefault(parts[0], set()).add(parts[1])
    if not groups:
        raise FormatError(f"{path}: no groups found")
    return groups


def write_groups_tsv(groups: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for group_id in sorted(groups):
            for member in sorted(groups[group_id]):
                fh.write(f"{group_id}\t{member}\n")
