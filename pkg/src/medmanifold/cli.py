"""Pipeline driver: every stage is a subcommand with file-based handoff.

Stages exchange artifacts through an output directory (flag ``--out-dir``
or env var ``MEDMANIFOLD_OUT``), so expensive intermediates are cached
across parameter sweeps. Each stage writes its primary artifacts plus a
``<stage>.manifest.json`` recording the tool version, the effective
configuration and the SHA-256 of every input. Primary artifacts are
byte-identical across re-runs with unchanged inputs; only the manifest's
``created_at`` field varies.

Exit codes: 0 success, 1 failed self-check, 2 usage error, 3 data error,
4 numeric error.
"""

import argparse
import datetime
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .corpus import (
    ProjectedConcepts,
    Record,
    RecordCorpus,
    augment_corpus,
    build_cooccurrence,
    build_occurrence,
    random_projection,
    read_cooccurrence_tsv,
    read_records_jsonl,
    write_cooccurrence_tsv,
    write_records_jsonl,
)
from .distances import (
    CD_KINDS,
    SD_KINDS,
    ConceptDistances,
    concept_distance_matrix,
    pairwise_record_distances,
    read_distance_tsv,
    record_distance,
    write_distance_pairs_tsv,
    write_distance_tsv,
)
from .errors import DataError, FormatError, MedManifoldError, NumericError
from .evaluation import (
    cluster_ratio,
    knn_auc,
    ndcg_at_k,
    read_groups_tsv,
    silhouette,
    write_groups_tsv,
)
from .graph import (
    build_knn_graph,
    connect_components,
    connected_components,
    geodesics,
    largest_component,
    read_edges_tsv,
    write_edges_tsv,
)
from .hierarchy import load_hierarchy, load_hierarchy_tsv, write_hierarchy_tsv
from .spectral import Embedding, isomap, laplacian_eigenmap, read_embedding_tsv, write_embedding_tsv
from .synthgen import SynthConfig, chain_hierarchy, generate, generate_chain

ENV_OUT_DIR = "MEDMANIFOLD_OUT"

# canonical artifact names and the stage that produces each
ARTIFACTS = {
    "records": ("records.jsonl", "synth"),
    "hierarchy": ("hierarchy.tsv", "synth"),
    "groups": ("groups.tsv", "synth"),
    "clusters": ("cohorts.tsv", "synth"),
    "augmented": ("records_augmented.jsonl", "augment"),
    "cooccurrence": ("cooccurrence.tsv", "cooccur"),
    "projected": ("projected.tsv", "project"),
    "concept_distances": ("concept_distances.tsv", "concept-dist"),
    "record_distances": ("record_distances.tsv", "record-dist"),
    "edges": ("knn_edges.tsv", "knn-graph"),
    "embedding": ("embedding.tsv", "embed"),
}


class UsageError(Exception):
    """Bad invocation: missing upstream artifact or unreadable config."""


def _resolve(args, key):
    """Path of an input artifact, erroring with the stage to run first."""
    override = getattr(args, key, None)
    name, producer = ARTIFACTS[key]
    path = override if override else os.path.join(args.out_dir, name)
    if not os.path.exists(path):
        raise UsageError(f"missing input {path!r}; run the '{producer}' stage first "
                         f"or pass --{key.replace('_', '-')}")
    return path


def _out_path(args, key):
    return os.path.join(args.out_dir, ARTIFACTS[key][0])


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(args, stage, inputs, outputs, extra=None):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
    manifest = {
        "stage": stage,
        "tool_version": __version__,
        "config": config,
        "inputs": {os.path.basename(p): _sha256(p) for p in inputs},
        "outputs": [os.path.basename(p) for p in outputs],
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    path = os.path.join(args.out_dir, f"{stage}.manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit_metrics(args, stage, results):
    """Print metric results and persist them next to the other artifacts.

    ``results`` is a list of (metric, value, params) triples; ``--format``
    selects flat JSON objects or an aligned text table.
    """
    objects = [{"metric": m, "value": v, "params": p} for m, v, p in results]
    out = os.path.join(args.out_dir, f"metrics_{stage.replace('eval-', '')}.{args.format}")
    if args.format == "json":
        text = json.dumps(objects, indent=2, sort_keys=True) + "\n"
    else:
        width = max(len(m) for m, _, _ in results)
        lines = [f"{m.ljust(width)}  {v:.6f}  {json.dumps(p, sort_keys=True)}"
                 for m, v, p in results]
        text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return out


def _build_cd(args, cooc, hierarchy=None):
    if args.cd == "wu_palmer":
        if hierarchy is None:
            hierarchy = load_hierarchy_tsv(_resolve(args, "hierarchy"))
        return ConceptDistances("wu_palmer", hierarchy=hierarchy)
    return ConceptDistances(args.cd, cooc=cooc, ehdn_population=args.ehdn_population)


# ---------------------------------------------------------------- stages


def cmd_synth(args):
    os.makedirs(args.out_dir, exist_ok=True)
    if args.mode == "chain":
        corpus = generate_chain(args.chain_n, args.seed)
        hierarchy = chain_hierarchy(corpus)
        records_path = _out_path(args, "records")
        hierarchy_path = _out_path(args, "hierarchy")
        write_records_jsonl(corpus, records_path)
        write_hierarchy_tsv(hierarchy, hierarchy_path)
        _write_manifest(args, "synth", [], [records_path, hierarchy_path])
        return 0
    cfg = SynthConfig(
        seed=args.seed,
        depth=args.depth,
        branching=args.branching,
        n_cohorts=args.cohorts,
        cluster_size=args.cluster_size,
        records_per_cohort=args.records_per_cohort,
        concepts_min=args.concepts_min,
        concepts_max=args.concepts_max,
        noise=args.noise,
        flip_prob=args.flip_prob,
    )
    hierarchy, corpus, groups, cohorts = generate(cfg)
    records_path = _out_path(args, "records")
    hierarchy_path = _out_path(args, "hierarchy")
    groups_path = _out_path(args, "groups")
    clusters_path = _out_path(args, "clusters")
    write_records_jsonl(corpus, records_path)
    write_hierarchy_tsv(hierarchy, hierarchy_path)
    write_groups_tsv(groups, groups_path)
    with open(clusters_path, "w", encoding="utf-8") as fh:
        for rec_id in corpus.ids():
            fh.write(f"{rec_id}\t{cohorts[rec_id]}\n")
    _write_manifest(args, "synth", [],
                    [records_path, hierarchy_path, groups_path, clusters_path])
    return 0


def cmd_augment(args):
    os.makedirs(args.out_dir, exist_ok=True)
    records_path = _resolve(args, "records")
    hierarchy_path = _resolve(args, "hierarchy")
    corpus = read_records_jsonl(records_path)
    hierarchy = load_hierarchy_tsv(hierarchy_path)
    augmented = augment_corpus(hierarchy, corpus, on_missing=args.on_missing)
    out = _out_path(args, "augmented")
    write_records_jsonl(augmented, out)
    _write_manifest(args, "augment", [records_path, hierarchy_path], [out])
    return 0


def cmd_cooccur(args):
    os.makedirs(args.out_dir, exist_ok=True)
    records_path = _resolve(args, "records")
    hierarchy_path = _resolve(args, "hierarchy")
    corpus = read_records_jsonl(records_path)
    hierarchy = load_hierarchy_tsv(hierarchy_path)
    occurrence = build_occurrence(hierarchy, corpus, on_missing=args.on_missing)
    cooc = build_cooccurrence(occurrence)
    out = _out_path(args, "cooccurrence")
    write_cooccurrence_tsv(cooc, out)
    _write_manifest(args, "cooccur", [records_path, hierarchy_path], [out])
    return 0


def cmd_project(args):
    os.makedirs(args.out_dir, exist_ok=True)
    cooc_path = _resolve(args, "cooccurrence")
    cooc = read_cooccurrence_tsv(cooc_path)
    projected = random_projection(cooc, args.proj_k, args.proj_seed)
    out = _out_path(args, "projected")
    emb = Embedding(ids=projected.vocabulary, coords=projected.matrix,
                    method="projection", dim=projected.k)
    write_embedding_tsv(emb, out)
    _write_manifest(args, "project", [cooc_path], [out])
    return 0


def cmd_concept_dist(args):
    os.makedirs(args.out_dir, exist_ok=True)
    cooc_path = _resolve(args, "cooccurrence")
    cooc = read_cooccurrence_tsv(cooc_path)
    cd = _build_cd(args, cooc)
    vocabulary = cooc.vocabulary if args.cd != "wu_palmer" else sorted(cd.hierarchy.nodes)
    dm = concept_distance_matrix(cd, vocabulary)
    out = _out_path(args, "concept_distances")
    write_distance_tsv(dm, out)
    if args.pairs:
        write_distance_pairs_tsv(dm, os.path.join(args.out_dir, "concept_distances_pairs.tsv"))
    _write_manifest(args, "concept-dist", [cooc_path], [out])
    return 0


def cmd_record_dist(args):
    os.makedirs(args.out_dir, exist_ok=True)
    records_path = _resolve(args, "records")
    cooc_path = _resolve(args, "cooccurrence")
    corpus = read_records_jsonl(records_path)
    cooc = read_cooccurrence_tsv(cooc_path)
    inputs = [records_path, cooc_path]
    if args.use_augmented:
        hierarchy_path = _resolve(args, "hierarchy")
        inputs.append(hierarchy_path)
        corpus = augment_corpus(load_hierarchy_tsv(hierarchy_path), corpus,
                                on_missing=args.on_missing)
    cd = _build_cd(args, cooc)
    dm = pairwise_record_distances(args.sd, cd, corpus)
    out = _out_path(args, "record_distances")
    write_distance_tsv(dm, out)
    _write_manifest(args, "record-dist", inputs, [out])
    return 0


def cmd_knn_graph(args):
    os.makedirs(args.out_dir, exist_ok=True)
    dist_path = _resolve(args, "record_distances")
    dm = read_distance_tsv(dist_path)
    g = build_knn_graph(dm, args.k_nn)
    out = _out_path(args, "edges")
    write_edges_tsv(g, out)
    _write_manifest(args, "knn-graph", [dist_path], [out])
    return 0


def cmd_embed(args):
    os.makedirs(args.out_dir, exist_ok=True)
    edges_path = _resolve(args, "edges")
    g = read_edges_tsv(edges_path)
    inputs = [edges_path]
    dropped = []
    if len(connected_components(g)) > 1:
        if args.connect == "bridge":
            dist_path = _resolve(args, "record_distances")
            inputs.append(dist_path)
            g = connect_components(g, read_distance_tsv(dist_path))
        else:
            g, dropped = largest_component(g)
            print(f"warning: embedding the largest component only; "
                  f"dropped {len(dropped)} records", file=sys.stderr)
    if args.method == "isomap":
        embedding = isomap(geodesics(g), args.dim)
    else:
        embedding = laplacian_eigenmap(g, args.dim, eps=args.eps)
    out = _out_path(args, "embedding")
    write_embedding_tsv(embedding, out)
    _write_manifest(args, "embed", inputs, [out], extra={"dropped_records": dropped})
    return 0


def cmd_eval_ndcg(args):
    os.makedirs(args.out_dir, exist_ok=True)
    groups_path = _resolve(args, "groups")
    groups = read_groups_tsv(groups_path)
    if args.space == "projected":
        space_path = _resolve(args, "projected")
        emb = read_embedding_tsv(space_path, method="projection")
        space = ProjectedConcepts(matrix=emb.coords, vocabulary=emb.ids,
                                  k=emb.dim, seed=-1)
    else:
        space_path = _resolve(args, "concept_distances")
        space = read_distance_tsv(space_path)
    value = ndcg_at_k(space, groups, args.ndcg_k, ideal_mode=args.ideal_mode,
                      metric=args.rank_metric)
    _emit_metrics(args, "eval-ndcg",
                  [("ndcg_at_k", value,
                    {"k": args.ndcg_k, "ideal_mode": args.ideal_mode,
                     "space": args.space, "rank_metric": args.rank_metric})])
    _write_manifest(args, "eval-ndcg", [groups_path, space_path], [])
    return 0


def _read_clusters_tsv(path):
    clusters = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'id<TAB>cluster'")
            clusters[parts[0]] = parts[1]
    return clusters


def cmd_eval_cluster(args):
    os.makedirs(args.out_dir, exist_ok=True)
    embedding_path = _resolve(args, "embedding")
    clusters_path = _resolve(args, "clusters")
    embedding = read_embedding_tsv(embedding_path)
    clusters = _read_clusters_tsv(clusters_path)
    clusters = {k: v for k, v in clusters.items() if k in set(embedding.ids)}
    s = silhouette(embedding, clusters)
    r = cluster_ratio(embedding, clusters)
    _emit_metrics(args, "eval-cluster",
                  [("silhouette", s, {"items": len(embedding.ids)}),
                   ("cluster_ratio", r, {"items": len(embedding.ids)})])
    _write_manifest(args, "eval-cluster", [embedding_path, clusters_path], [])
    return 0


def cmd_eval_auc(args):
    os.makedirs(args.out_dir, exist_ok=True)
    embedding_path = _resolve(args, "embedding")
    records_path = _resolve(args, "records")
    embedding = read_embedding_tsv(embedding_path)
    corpus = read_records_jsonl(records_path)
    labels = {r.id: r.label for r in corpus}
    if any(labels.get(i) is None for i in embedding.ids):
        raise DataError("records are missing binary labels; AUC needs labelled data")
    y = np.array([labels[i] for i in embedding.ids])
    rng = np.random.default_rng(args.split_seed)
    order = rng.permutation(len(embedding.ids))
    n_test = max(1, int(round(args.test_fraction * len(order))))
    test_idx, train_idx = order[:n_test], order[n_test:]
    train = Embedding(ids=[embedding.ids[i] for i in train_idx],
                      coords=embedding.coords[train_idx], method=embedding.method,
                      dim=embedding.dim)
    test = Embedding(ids=[embedding.ids[i] for i in test_idx],
                     coords=embedding.coords[test_idx], method=embedding.method,
                     dim=embedding.dim)
    value = knn_auc(train, y[train_idx], test, y[test_idx], args.k_vote)
    _emit_metrics(args, "eval-auc",
                  [("knn_auc", value,
                    {"k_vote": args.k_vote, "test_fraction": args.test_fraction,
                     "split_seed": args.split_seed})])
    _write_manifest(args, "eval-auc", [embedding_path, records_path], [])
    return 0


# ------------------------------------------------------- worked example

DEMO_RECORDS = [
    ("V1", {"4289", "42823"}, 10),
    ("V2", {"4289"}, 2),
    ("V3", {"42823"}, 10),
    ("V4", {"42820"}, 5),
]
DEMO_EDGES = [("4282", "428"), ("42823", "4282"), ("42820", "4282"), ("4289", "428")]
DEMO_COOC = {
    ("428", "428"): 27, ("428", "4282"): 25, ("428", "42820"): 5,
    ("428", "42823"): 20, ("428", "4289"): 12,
    ("4282", "4282"): 25, ("4282", "42820"): 5, ("4282", "42823"): 20,
    ("4282", "4289"): 10,
    ("42820", "42820"): 5, ("42820", "42823"): 0, ("42820", "4289"): 0,
    ("42823", "42823"): 20, ("42823", "4289"): 10,
    ("4289", "4289"): 12,
}
DEMO_COSINE = {
    ("4289", "42823"): 0.0458, ("4289", "428"): 0.0523, ("4289", "4282"): 0.0652,
    ("4289", "42820"): 0.4250, ("42823", "428"): 0.0133, ("42823", "4282"): 0.0125,
    ("42823", "42820"): 0.3595, ("428", "4282"): 0.0014, ("428", "42820"): 0.2495,
    ("4282", "42820"): 0.2463,
}
DEMO_SD1 = 0.0153


def cmd_demo(args):
    """Golden worked example on the built-in four-record corpus."""
    hierarchy = load_hierarchy(DEMO_EDGES)
    corpus = RecordCorpus([Record(id=i, concepts=frozenset(c), frequency=f)
                           for i, c, f in DEMO_RECORDS])
    cooc = build_cooccurrence(build_occurrence(hierarchy, corpus))
    vocab = cooc.vocabulary
    dense = cooc.dense()
    print("co-occurrence matrix:")
    print("       " + " ".join(f"{v:>6}" for v in vocab))
    for i, v in enumerate(vocab):
        print(f"{v:>6} " + " ".join(f"{dense[i, j]:>6}" for j in range(len(vocab))))
    ok = True
    idx = {c: i for i, c in enumerate(vocab)}
    for (a, b), expected in DEMO_COOC.items():
        if dense[idx[a], idx[b]] != expected or dense[idx[b], idx[a]] != expected:
            print(f"MISMATCH cooccurrence[{a},{b}] = {dense[idx[a], idx[b]]}, expected {expected}")
            ok = False
    cd = ConceptDistances("cosine", cooc=cooc)
    print("\ncosine concept distances:")
    print("       " + " ".join(f"{v:>7}" for v in vocab))
    for a in vocab:
        print(f"{a:>6} " + " ".join(f"{cd(a, b):7.4f}" for b in vocab))
    for (a, b), expected in DEMO_COSINE.items():
        if abs(cd(a, b) - expected) > 1e-4:
            print(f"MISMATCH cosine({a},{b}) = {cd(a, b):.6f}, expected {expected}")
            ok = False
    sd1 = record_distance("sd1", cd, DEMO_RECORDS[0][1], DEMO_RECORDS[1][1])
    print(f"\nSD1(V1, V2) = {sd1:.4f}")
    if abs(sd1 - DEMO_SD1) > 5e-5:
        print(f"MISMATCH SD1(V1,V2) = {sd1:.6f}, expected {DEMO_SD1}")
        ok = False
    print("demo-figure3: " + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


# ---------------------------------------------------------------- parser


def _read_config(path):
    """Flat ``key = value`` config; '#' comments and blank lines ignored."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                if "=" not in stripped:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value'")
                key, _, raw = stripped.partition("=")
                key = key.strip().replace("-", "_")
                if not key:
                    raise UsageError(f"{path}:{lineno}: empty key")
                values[key] = _coerce(raw.strip())
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    return values


def _coerce(raw):
    low = raw.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def _add_common(sub):
    sub.add_argument("--config", help="flat key=value config file; flags override it")
    sub.add_argument("--out-dir", default=os.environ.get(ENV_OUT_DIR, "."),
                     help=f"artifact directory (env {ENV_OUT_DIR})")
    sub.add_argument("--threads", type=int, default=0,
                     help="cap on internal workers; outputs never depend on it")
    sub.add_argument("--format", choices=("json", "tsv"), default="json",
                     help="metric output format")


def _add_inputs(sub, *keys):
    for key in keys:
        sub.add_argument(f"--{key.replace('_', '-')}",
                         help=f"path override for {ARTIFACTS[key][0]}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="medmanifold",
        description="concept/record representation pipeline over coded corpora",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="stage", required=True)

    p = subs.add_parser("synth", help="generate a synthetic corpus, hierarchy and ground truth")
    _add_common(p)
    p.add_argument("--mode", choices=("cohorts", "chain"), default="cohorts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--branching", type=int, default=5)
    p.add_argument("--cohorts", type=int, default=3)
    p.add_argument("--cluster-size", type=int, default=25)
    p.add_argument("--records-per-cohort", type=int, default=100)
    p.add_argument("--concepts-min", type=int, default=3)
    p.add_argument("--concepts-max", type=int, default=8)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--flip-prob", type=float, default=0.0)
    p.add_argument("--chain-n", type=int, default=200, help="records in chain mode")
    p.set_defaults(func=cmd_synth)

    p = subs.add_parser("augment", help="add concept ancestors to every record")
    _add_common(p)
    _add_inputs(p, "records", "hierarchy")
    p.add_argument("--on-missing", choices=("attach", "strict"), default="attach")
    p.set_defaults(func=cmd_augment)

    p = subs.add_parser("cooccur", help="build the concept co-occurrence matrix")
    _add_common(p)
    _add_inputs(p, "records", "hierarchy")
    p.add_argument("--on-missing", choices=("attach", "strict"), default="attach")
    p.set_defaults(func=cmd_cooccur)

    p = subs.add_parser("project", help="random-project co-occurrence rows")
    _add_common(p)
    _add_inputs(p, "cooccurrence")
    p.add_argument("--proj-k", type=int, default=64)
    p.add_argument("--proj-seed", type=int, default=0)
    p.set_defaults(func=cmd_project)

    p = subs.add_parser("concept-dist", help="pairwise concept distance matrix")
    _add_common(p)
    _add_inputs(p, "cooccurrence", "hierarchy")
    p.add_argument("--cd", choices=CD_KINDS, default="cosine")
    p.add_argument("--ehdn-population", action="store_true",
                   help="use the expanded record count instead of the vocabulary size")
    p.add_argument("--pairs", action="store_true", help="also write the sparse pair list")
    p.set_defaults(func=cmd_concept_dist)

    p = subs.add_parser("record-dist", help="pairwise record distance matrix")
    _add_common(p)
    _add_inputs(p, "records", "cooccurrence", "hierarchy")
    p.add_argument("--cd", choices=CD_KINDS, default="cosine")
    p.add_argument("--sd", choices=SD_KINDS, default="sd1")
    p.add_argument("--ehdn-population", action="store_true")
    p.add_argument("--use-augmented", action="store_true",
                   help="measure augmented concept sets instead of the raw ones")
    p.add_argument("--on-missing", choices=("attach", "strict"), default="attach")
    p.set_defaults(func=cmd_record_dist)

    p = subs.add_parser("knn-graph", help="mutual-OR k-nearest-neighbor record network")
    _add_common(p)
    _add_inputs(p, "record_distances")
    p.add_argument("--k-nn", type=int, default=10)
    p.set_defaults(func=cmd_knn_graph)

    p = subs.add_parser("embed", help="manifold embedding of the record network")
    _add_common(p)
    _add_inputs(p, "edges", "record_distances")
    p.add_argument("--method", choices=("isomap", "eigenmap"), default="isomap")
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--eps", type=float, default=1e-9,
                   help="inverse-distance weight guard for identical records")
    p.add_argument("--connect", choices=("largest", "bridge"), default="largest",
                   help="how to handle a disconnected network")
    p.set_defaults(func=cmd_embed)

    p = subs.add_parser("eval-ndcg", help="code-referencing quality of concept representations")
    _add_common(p)
    _add_inputs(p, "groups", "projected", "concept_distances")
    p.add_argument("--space", choices=("projected", "distances"), default="projected")
    p.add_argument("--ndcg-k", type=int, default=100)
    p.add_argument("--ideal-mode", choices=("capped", "literal"), default="capped")
    p.add_argument("--rank-metric", choices=("cosine", "euclidean"), default="cosine")
    p.set_defaults(func=cmd_eval_ndcg)

    p = subs.add_parser("eval-cluster", help="silhouette and inter/intra ratio of an embedding")
    _add_common(p)
    _add_inputs(p, "embedding", "clusters")
    p.set_defaults(func=cmd_eval_cluster)

    p = subs.add_parser("eval-auc", help="k-NN vote AUC on held-out labelled records")
    _add_common(p)
    _add_inputs(p, "embedding", "records")
    p.add_argument("--k-vote", type=int, default=5)
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--split-seed", type=int, default=0)
    p.set_defaults(func=cmd_eval_auc)

    p = subs.add_parser("demo-figure3", help="self-checking golden worked example")
    _add_common(p)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # config file values become defaults, so explicit flags win
    if "--config" in argv:
        try:
            config_path = argv[argv.index("--config") + 1]
        except IndexError:
            parser.error("--config needs a path")
        try:
            config = _read_config(config_path)
        except UsageError as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return 2
        for sub_action in parser._subparsers._group_actions:
            for sub in sub_action.choices.values():
                known = {a.dest for a in sub._actions}
                sub.set_defaults(**{k: v for k, v in config.items() if k in known})
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except MedManifoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
