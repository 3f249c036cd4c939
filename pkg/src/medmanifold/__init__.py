"""Knowledge-driven concept/record representations and manifold embeddings.

Pipeline: load a concept hierarchy and a record corpus, augment records
with concept ancestors, build occurrence/co-occurrence matrices, derive
concept and record distances, build a k-NN record network and embed it
with classical scaling of geodesics or a Laplacian eigenmap, then score
the results (NDCG code referencing, silhouette, inter/intra ratio, k-NN
AUC).
"""

__version__ = "0.1.0"

from .corpus import (
    CooccurrenceMatrix,
    OccurrenceMatrix,
    ProjectedConcepts,
    Record,
    RecordCorpus,
    augment_corpus,
    augment_record,
    build_cooccurrence,
    build_occurrence,
    random_projection,
    read_records_jsonl,
    write_records_jsonl,
)
from .distances import (
    CD_KINDS,
    SD_KINDS,
    ConceptDistances,
    DistanceMatrix,
    concept_distance_matrix,
    pairwise_record_distances,
    record_distance,
)
from .errors import (
    ArgumentError,
    ConnectivityError,
    DataError,
    DegenerateInputError,
    FormatError,
    MedManifoldError,
    NumericError,
    StructuralError,
    UnknownConceptError,
)
from .evaluation import auc, cluster_ratio, knn_auc, ndcg_at_k, silhouette
from .graph import GeodesicMatrix, KnnGraph, build_knn_graph, geodesics, largest_component
from .hierarchy import (
    VIRTUAL_ROOT,
    ConceptHierarchy,
    infer_icd9_edges,
    load_hierarchy,
    load_hierarchy_tsv,
)
from .spectral import Embedding, EigenResult, isomap, laplacian_eigenmap, sym_eigs
from .synthgen import SynthConfig, generate, generate_chain
