"""Concept hierarchy: a rooted prefix tree over concept codes.

The tree is loaded from a generic child->parent edge list, so any is-a
style ontology (digit-refinement code systems, grouper schemes, thesaurus
links) plugs in without bespoke code. Every parentless node is attached to
a single synthetic virtual root at depth 0; the reserved parent token
``ROOT`` names that virtual root explicitly, pinning a child at depth 1.

The hierarchy is immutable after construction and safe for concurrent
reads.
"""

from collections import deque

from .errors import ArgumentError, FormatError, StructuralError, UnknownConceptError

# Reserved parent token: an edge (child, ROOT) attaches child directly to
# the synthetic virtual root. Never a node itself.
VIRTUAL_ROOT = "ROOT"


class ConceptHierarchy:
    """Immutable rooted tree of concept codes.

    Attributes
    ----------
    nodes : frozenset[str]
        All concept codes (the virtual root is not a node).
    parent : dict[str, str]
        Child -> parent links; top-level nodes (children of the virtual
        root) are absent from the map.
    depth : dict[str, int]
        Node depths; top-level nodes have depth 1, the virtual root
        (not materialized) has depth 0.
    """

    def __init__(self, parent: dict[str, str], nodes: set[str]):
        self.parent = dict(parent)
        self.nodes = frozenset(nodes)
        self.depth = self._compute_depths()

    def _compute_depths(self) -> dict[str, int]:
        depth: dict[str, int] = {}
        for node in self.nodes:
            chain = []
            cur = node
            while cur is not None and cur not in depth:
                chain.append(cur)
                if len(chain) > len(self.nodes):
                    raise StructuralError(f"cycle detected at concept {node!r}")
                cur = self.parent.get(cur)
            base = 0 if cur is None else depth[cur]
            for i, c in enumerate(reversed(chain), start=1):
                depth[c] = base + i
        return depth

    def __contains__(self, code: str) -> bool:
        return code in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def ancestors(self, code: str) -> list[str]:
        """Proper ancestors of ``code``, nearest first, virtual root excluded."""
        if code not in self.nodes:
            raise UnknownConceptError(f"unknown concept {code!r}")
        out = []
        cur = code
        while cur in self.parent:
            cur = self.parent[cur]
            out.append(cur)
        return out

    def wu_palmer_distance(self, a: str, b: str) -> float:
        """Taxonomy-only distance 1 - 2*depth(lcs) / (depth(a) + depth(b)).

        The least common subsumer is the deepest shared ancestor (a node
        counts as its own ancestor here); concepts meeting only at the
        virtual root (depth 0) are at distance 1.
        """
        for c in (a, b):
            if c not in self.nodes:
                raise UnknownConceptError(f"unknown concept {c!r}")
        if a == b:
            return 0.0
        chain_a = {a: self.depth[a]}
        for anc in self.ancestors(a):
            chain_a[anc] = self.depth[anc]
        lcs_depth = 0
        cur = b
        while True:
            if cur in chain_a:
                lcs_depth = chain_a[cur]
                break
            nxt = self.parent.get(cur)
            if nxt is None:
                break
            cur = nxt
        return 1.0 - 2.0 * lcs_depth / (self.depth[a] + self.depth[b])


def load_hierarchy(edges) -> ConceptHierarchy:
    """Build a validated hierarchy from (child, parent) pairs.

    Parents absent from any child position become top-level nodes; the
    reserved token ``ROOT`` in parent position attaches its child to the
    virtual root without materializing a node.

    Raises
    ------
    StructuralError
        On an empty edge list, a child with two conflicting parents, or a
        parent cycle (the message names one node on the cycle).
    FormatError
        On empty/whitespace codes or a child named ``ROOT``.
    """
    edges = list(edges)
    if not edges:
        raise StructuralError("edge list is empty")
    parent: dict[str, str] = {}
    nodes: set[str] = set()
    for child, par in edges:
        for tok in (child, par):
            if not tok or any(ch.isspace() for ch in tok):
                raise FormatError(f"invalid concept code {tok!r}")
        if child == VIRTUAL_ROOT:
            raise FormatError(f"{VIRTUAL_ROOT!r} is reserved for the virtual root")
        nodes.add(child)
        if par == VIRTUAL_ROOT:
            # explicit top-level pin; recorded by absence from the parent map
            if child in parent:
                raise StructuralError(
                    f"concept {child!r} has conflicting parents "
                    f"{parent[child]!r} and {VIRTUAL_ROOT!r}"
                )
            continue
        nodes.add(par)
        if child in parent and parent[child] != par:
            raise StructuralError(
                f"concept {child!r} has conflicting parents {parent[child]!r} and {par!r}"
            )
        parent[child] = par
    # a child pinned to ROOT must not also appear with a real parent
    for child, par in edges:
        if par == VIRTUAL_ROOT and child in parent:
            raise StructuralError(
                f"concept {child!r} has conflicting parents {parent[child]!r} and {VIRTUAL_ROOT!r}"
            )
    _check_acyclic(parent, nodes)
    return ConceptHierarchy(parent, nodes)


def _check_acyclic(parent: dict[str, str], nodes: set[str]) -> None:
    state: dict[str, int] = {}  # 1 = on current chain, 2 = cleared
    for node in nodes:
        chain = []
        cur = node
        while state.get(cur) != 2:
            if state.get(cur) == 1:
                raise StructuralError(f"cycle detected at concept {cur!r}")
            state[cur] = 1
            chain.append(cur)
            nxt = parent.get(cur)
            if nxt is None:
                break
            cur = nxt
        for c in chain:
            state[c] = 2


def infer_icd9_edges(codes) -> list[tuple[str, str]]:
    """Derive digit-refinement edges for 3-5 character codes.

    A 5-char code is parented to its 4-char prefix and a 4-char code to
    its 3-char prefix; prefixes are materialized as branch nodes even when
    absent from the input. Leading letter prefixes are treated as opaque
    characters, so only the character count matters.
    """
    edges: set[tuple[str, str]] = set()
    pending = deque(codes)
    seen: set[str] = set()
    while pending:
        code = pending.popleft()
        if code in seen:
            continue
        seen.add(code)
        if not code or any(ch.isspace() for ch in code):
            raise FormatError(f"invalid concept code {code!r}")
        if len(code) < 3:
            raise FormatError(f"code {code!r} is shorter than 3 characters")
        if len(code) > 3:
            parent = code[:-1] if len(code) == 4 else code[:4]
            edges.add((code, parent))
            pending.append(parent)
    return sorted(edges)


def load_hierarchy_tsv(path) -> ConceptHierarchy:
    """Load ``child<TAB>parent`` lines (UTF-8, ``#`` comments ignored)."""
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'child<TAB>parent'")
            edges.append((parts[0], parts[1]))
    return load_hierarchy(edges)


def write_hierarchy_tsv(hierarchy: ConceptHierarchy, path) -> None:
    """Write the hierarchy as an edge list, top-level nodes pinned to ROOT."""
    with open(path, "w", encoding="utf-8") as fh:
        for node in sorted(hierarchy.nodes):
            fh.write(f"{node}\t{hierarchy.parent.get(node, VIRTUAL_ROOT)}\n")
