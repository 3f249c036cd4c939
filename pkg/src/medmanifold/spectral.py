"""Symmetric eigensolver contract and the two manifold embeddings.

The global method applies classical scaling to squared geodesic
distances; the local method solves the generalized graph-Laplacian
problem with inverse-distance edge weights. Both are deterministic: the
eigensolver fixes each eigenvector's sign so that its largest-magnitude
component is positive.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ConnectivityError, DegenerateInputError, FormatError, NumericError
from .graph import GeodesicMatrix, KnnGraph, connected_components


@dataclass
class EigenResult:
    """Eigenpairs plus their verified residuals ``||A v - lambda v||``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray


def sym_eigs(a: np.ndarray, count: int, which: str = "largest", tol: float = 1e-8) -> EigenResult:
    """Eigenpairs of a symmetric matrix with a verified residual bound.

    Parameters
    ----------
    a : ndarray
        Symmetric matrix (within 1e-10 relative asymmetry).
    count : int
        Number of eigenpairs, 1 <= count <= n.
    which : str
        ``largest`` returns descending eigenvalues, ``smallest`` ascending.
    tol : float
        Residual bound: every returned pair satisfies
        ``||A v - lambda v|| <= tol * ||A||_inf``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ArgumentError("matrix must be square")
    n = a.shape[0]
    if not 1 <= count <= n:
        raise ArgumentError(f"count={count} must satisfy 1 <= count <= n={n}")
    if which not in ("largest", "smallest"):
        raise ArgumentError(f"which={which!r} must be 'largest' or 'smallest'")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.T).max()) > 1e-10 * scale:
        raise ArgumentError("matrix is not symmetric within 1e-10 relative")
    sym = 0.5 * (a + a.T)
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed to converge: {exc}", iterations=n) from exc
    if which == "largest":
        order = np.argsort(eigenvalues)[::-1][:count]
    else:
        order = np.argsort(eigenvalues)[:count]
    values = eigenvalues[order]
    vectors = eigenvectors[:, order].copy()
    for k in range(vectors.shape[1]):
        pivot = int(np.argmax(np.abs(vectors[:, k])))
        if vectors[pivot, k] < 0:
            vectors[:, k] = -vectors[:, k]
    residuals = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    norm_inf = float(np.abs(a).sum(axis=1).max())
    if np.any(residuals > tol * max(norm_inf, np.finfo(float).tiny)):
        raise NumericError(
            f"eigenpair residual {residuals.max():.3e} exceeds {tol:g} * ||A||_inf",
            iterations=n,
        )
    return EigenResult(eigenvalues=values, eigenvectors=vectors, residuals=residuals)


@dataclass
class Embedding:
    """Low-dimensional coordinates, one row per item id."""

    ids: list
    coords: np.ndarray
    method: str
    dim: int

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.shape != (len(self.ids), self.dim):
            raise ArgumentError("embedding shape does not match ids/dim")
        if not np.isfinite(self.coords).all():
            raise NumericError("embedding contains non-finite values")


def isomap(geo: GeodesicMatrix, dim: int) -> Embedding:
    """Classical-scaling embedding of squared geodesic distances.

    Double-centers the squared distance matrix, takes the top ``dim``
    eigenpairs and scales eigenvectors by the square roots of their
    eigenvalues. Geodesic matrices are generally non-Euclidean, so
    non-positive eigenvalues are clipped to zero (warning) and produce
    zero coordinates.
    """
    d = geo.values
    n = geo.n
    if not np.isfinite(d).all():
        raise ConnectivityError(
            "geodesic matrix has infinite entries; embed the largest component only"
        )
    if not 1 <= dim < n:
        raise ArgumentError(f"dim={dim} must satisfy 1 <= dim < n={n}")
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ (d * d) @ j
    b = 0.5 * (b + b.T)
    result = sym_eigs(b, dim, which="largest")
    values = result.eigenvalues.copy()
    negative = values <= 0
    if negative.any():
        warnings.warn(
            f"{int(negative.sum())} of {dim} requested coordinates have non-positive "
            "eigenvalues; clipping to zero"
        )
        values[negative] = 0.0
    coords = result.eigenvectors * np.sqrt(values)
    return Embedding(ids=geo.ids, coords=coords, method="isomap", dim=dim)


def laplacian_eigenmap(g: KnnGraph, dim: int, eps: float = 1e-9) -> Embedding:
    """Spectral embedding from the generalized graph-Laplacian problem.

    Edge weights are inverse distances 1/(length + eps); the problem
    L y = lambda Dg y is solved through the symmetrically normalized
    Laplacian, the trivial constant eigenvector is discarded and the next
    ``dim`` eigenvectors are mapped back by Dg^{-1/2}. Every returned
    column is Dg-orthogonal to the constant vector.
    """
    n = g.n
    if not 1 <= dim < n:
        raise ArgumentError(f"dim={dim} must satisfy 1 <= dim < n={n}")
    if len(connected_components(g)) != 1:
        raise ConnectivityError("graph is not connected; reduce to the largest component first")
    w = np.zeros((n, n))
    for i, j, length in g.edges():
        weight = 1.0 / (length + eps)
        w[i, j] = weight
        w[j, i] = weight
    degrees = w.sum(axis=1)
    if np.any(degrees <= 0):
        node = g.ids[int(np.argmin(degrees))]
        raise DegenerateInputError(f"node {node!r} has zero weighted degree")
    d_inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = np.diag(degrees) - w
    normalized = lap * d_inv_sqrt[:, None] * d_inv_sqrt[None, :]
    normalized = 0.5 * (normalized + normalized.T)
    result = sym_eigs(normalized, dim + 1, which="smallest")
    # first eigenpair is the trivial constant direction (lambda ~ 0)
    coords = (result.eigenvectors[:, 1:] * d_inv_sqrt[:, None])
    return Embedding(ids=g.ids, coords=coords, method="eigenmap", dim=dim)


def write_embedding_tsv(embedding: Embedding, path) -> None:
    """TSV with header ``id<TAB>y1..y{dim}`` and %.8e coordinates."""
    with open(path, "w", encoding="utf-8") as fh:
        header = ["id"] + [f"y{k + 1}" for k in range(embedding.dim)]
        fh.write("\t".join(header) + "\n")
        for item_id, row in zip(embedding.ids, embedding.coords):
            fh.write(str(item_id) + "\t" + "\t".join(f"{v:.8e}" for v in row) + "\n")


def read_embedding_tsv(path, method: str = "unknown") -> Embedding:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if not header or header[0] != "id":
            raise FormatError(f"{path}: missing 'id' header")
        dim = len(header) - 1
        ids, rows = [], []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != dim + 1:
                raise FormatError(f"{path}:{lineno}: wrong column count")
            ids.append(parts[0])
            rows.append([float(x) for x in parts[1:]])
    return Embedding(ids=ids, coords=np.array(rows), method=method, dim=dim)
