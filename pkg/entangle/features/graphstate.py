from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.stats import entropy

from entangle.config.constants import GRAPH_OPS
from entangle.config.settings import get_settings
from entangle.features.numcore import (
    as_matrix,
    check_dims,
    check_subset,
    hermitian_eigenvalues,
    is_psd,
    partial_trace,
    partial_transpose,
)
from entangle.models.errors import (
    DimensionError,
    GraphEditError,
    GraphKindError,
    InvalidStateError,
    NotPSDError,
)
from entangle.models.schema import PartitionSpec, WeightedGraph

logger = logging.getLogger(__name__)

PSD = "PSD"
NOT_PSD = "NotPSD"
UNKNOWN = "Unknown"


def _threshold() -> float:
    return get_settings().edge_threshold


def _same_kind(*graphs: WeightedGraph) -> str:
    kinds = {g.kind for g in graphs}
    if len(kinds) != 1:
        raise GraphKindError(f"cannot combine graph kinds {sorted(kinds)}")
    return kinds.pop()


def matrix_kind(m) -> str:
    a = as_matrix(m)
    return "complex" if a.size and np.abs(a.imag).max() > _threshold() else "real"


def laplacian(g: WeightedGraph) -> np.ndarray:
    """Generalized Laplacian Q(G, a).

    Real graphs use Q = Delta - M + Delta0, so off-diagonal entries are -a(u, v);
    complex graphs use Q = Delta + M - Delta0 with off-diagonal entries a(u, v).
    """
    off = g.off_diagonal()
    q = -off if g.kind == "real" else off
    q[np.diag_indices(g.n)] = g.degrees()
    return q


def graph_from_laplacian(q, dims: Sequence[int], kind: str | None = None) -> WeightedGraph:
    """The unique graph of the given kind whose Laplacian is ``q`` (any Hermitian matrix)."""
    m = as_matrix(q)
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != m.shape[0] or m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix of shape {m.shape} does not match dims {list(dims)}")
    kind = matrix_kind(m) if kind is None else kind
    off = m.copy()
    off[np.diag_indices(m.shape[0])] = 0
    off[np.abs(off) <= _threshold()] = 0
    if kind == "real":
        if np.abs(off.imag).max(initial=0.0) > _threshold():
            raise GraphKindError("matrix has complex off-diagonal entries; use a complex-weighted graph")
        weights = -off.real
        loops = m.diagonal().real - weights.sum(axis=1)
    elif kind == "complex":
        weights = off
        loops = m.diagonal().real - np.abs(off).sum(axis=1)
    else:
        raise GraphKindError(f"unknown graph kind '{kind}'")
    loops = np.where(np.abs(loops) <= _threshold(), 0.0, loops)
    adjacency = np.array(weights, dtype=complex)
    adjacency[np.diag_indices(m.shape[0])] = loops
    return WeightedGraph(kind=kind, dims=dims, adjacency=adjacency)


def graph_from_density(rho, dims: Sequence[int], kind: str | None = None) -> WeightedGraph:
    """Graph with sigma(G, a) = rho; the kind defaults to real when rho has no imaginary part."""
    m = as_matrix(rho)
    check_dims(dims, m.shape[0])
    return graph_from_laplacian(m, dims, kind)


def graph_from_observable(a, dims: Sequence[int], kind: str | None = None) -> WeightedGraph:
    return graph_from_laplacian(a, dims, kind)


def density_from_graph(g: WeightedGraph) -> np.ndarray:
    q = laplacian(g)
    total = g.degree_sum()
    if total <= _threshold():
        raise InvalidStateError("graph has zero degree sum and no density matrix")
    if not is_psd(q):
        raise NotPSDError("graph Laplacian is not positive semidefinite")
    return q / total


def is_pure_graph(g: WeightedGraph) -> bool:
    if not is_psd(laplacian(g)):
        raise NotPSDError("purity test needs a positive semidefinite Laplacian")
    deg = g.degrees()
    total = deg.sum()
    off = g.off_diagonal()
    lhs = float(np.dot(deg, deg) + np.sum(np.abs(off) ** 2))
    return abs(lhs - total**2) <= 1e-9 * max(total**2, 1e-300)


def projector_decomposition(g: WeightedGraph) -> list[tuple[float, np.ndarray]]:
    """Weights and vectors whose projector sum is the Laplacian Q(G, a)."""
    terms: list[tuple[float, np.ndarray]] = []
    for i, j, a in g.edges(_threshold()):
        v = np.zeros(g.n, dtype=complex)
        v[i] = 1.0
        if g.kind == "real":
            v[j] = -1.0
            weight = 2.0 * a.real
        else:
            v[j] = np.conj(a) / abs(a)
            weight = 2.0 * abs(a)
        terms.append((weight, v / np.sqrt(2.0)))
    for vertex, w in g.loops(_threshold()):
        v = np.zeros(g.n, dtype=complex)
        v[vertex] = 1.0
        terms.append((w, v))
    return terms


def observable_from_graph(g: WeightedGraph) -> np.ndarray:
    out = np.zeros((g.n, g.n), dtype=complex)
    for weight, v in projector_decomposition(g):
        out += weight * np.outer(v, v.conj())
    return out


def edge_union(g: WeightedGraph, h: WeightedGraph) -> WeightedGraph:
    """Edge union with Q(g u h) = Q(g) + Q(h).

    For edge-disjoint graphs this is the plain sum of weight functions;
    overlapping complex edges get their loops corrected so the Laplacians add.
    """
    kind = _same_kind(g, h)
    if g.dims != h.dims:
        raise DimensionError(f"vertex sets differ: {g.dims} vs {h.dims}")
    return graph_from_laplacian(laplacian(g) + laplacian(h), g.dims, kind)


def scale(g: WeightedGraph, factor: float) -> WeightedGraph:
    return g.with_adjacency(g.adjacency * float(factor))


def convex_combine(graphs: Sequence[WeightedGraph], weights: Sequence[float]) -> WeightedGraph:
    if len(graphs) != len(weights) or not graphs:
        raise DimensionError("need one weight per graph")
    p = np.asarray(weights, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise InvalidStateError(f"weights must be a probability vector, got sum {p.sum():.12g}")
    out = None
    for g, w in zip(graphs, p):
        part = scale(g, w / g.degree_sum())
        out = part if out is None else edge_union(out, part)
    return out


def trace_out(g: WeightedGraph, dims: Sequence[int], part: Sequence[int]) -> WeightedGraph:
    """Graph of the reduced state after tracing out the 1-based subsystems in ``part``."""
    dims = check_dims(dims, g.n)
    if dims != g.dims:
        raise DimensionError(f"dims {list(dims)} differ from the graph labeling {list(g.dims)}")
    traced = check_subset(part, len(dims), allow_empty=False)
    keep = [k for k in range(1, len(dims) + 1) if k not in traced]
    if not keep:
        raise DimensionError("cannot trace out every subsystem")
    reduced = partial_trace(laplacian(g), dims, keep)
    return graph_from_laplacian(reduced, tuple(dims[k - 1] for k in keep), g.kind)


def von_neumann_entropy(g: WeightedGraph) -> float:
    evals = hermitian_eigenvalues(density_from_graph(g))
    evals = np.clip(evals, 0.0, None)
    return float(entropy(evals, base=2))


def graph_op(g: WeightedGraph, which: str) -> WeightedGraph:
    """eta negates weights, L drops loops, N keeps only loops equal to the degrees,
    Omega keeps only the loops, NL is N applied after L."""
    if which == "eta":
        return g.with_adjacency(-g.adjacency)
    if which == "L":
        return g.with_adjacency(g.off_diagonal())
    if which == "N":
        return g.with_adjacency(np.diag(g.degrees()).astype(complex))
    if which == "Omega":
        return g.with_adjacency(np.diag(g.loop_weights).astype(complex))
    if which == "NL":
        return graph_op(graph_op(g, "L"), "N")
    raise ValueError(f"unknown graph operator '{which}'; expected one of {', '.join(GRAPH_OPS)}")


def tensor_product(g: WeightedGraph, h: WeightedGraph) -> WeightedGraph:
    kind = _same_kind(g, h)
    return WeightedGraph(kind=kind, dims=g.dims + h.dims, adjacency=np.kron(g.adjacency, h.adjacency))


def _union_all(parts: Sequence[WeightedGraph]) -> WeightedGraph:
    out = parts[0]
    for part in parts[1:]:
        out = edge_union(out, part)
    return out


def modified_tensor_product(g: WeightedGraph, h: WeightedGraph) -> WeightedGraph:
    """Graph product with Q(g [x] h) = Q(g) kron Q(h)."""
    kind = _same_kind(g, h)
    lg, lh = graph_op(g, "L"), graph_op(h, "L")
    ng, nh = graph_op(g, "N"), graph_op(h, "N")
    loops = tensor_product(graph_op(g, "Omega"), graph_op(h, "Omega"))
    if kind == "real":
        parts = [tensor_product(lg, graph_op(lh, "eta")), tensor_product(lg, nh), tensor_product(ng, lh), loops]
    else:
        cross = scale(tensor_product(graph_op(g, "NL"), graph_op(graph_op(h, "NL"), "eta")), 2.0)
        parts = [tensor_product(lg, lh), tensor_product(lg, nh), tensor_product(ng, lh), loops, cross]
    return _union_all(parts)


def cartesian_product(g: WeightedGraph, h: WeightedGraph) -> WeightedGraph:
    _same_kind(g, h)
    return edge_union(
        tensor_product(graph_op(g, "L"), graph_op(h, "N")),
        tensor_product(graph_op(g, "N"), graph_op(h, "L")),
    )


def relabel(g: WeightedGraph, perm: Sequence[int]) -> WeightedGraph:
    """Vertex ``perm[i]`` of ``g`` becomes vertex ``i`` of the result (0-based)."""
    p = np.asarray(perm, dtype=int)
    if sorted(p.tolist()) != list(range(g.n)):
        raise DimensionError("relabeling must be a permutation of the vertices")
    return g.with_adjacency(g.adjacency[np.ix_(p, p)])


def _partition(g: WeightedGraph, dims: Sequence[int], p: PartitionSpec | Sequence[int]) -> tuple[tuple[int, ...], PartitionSpec]:
    dims = check_dims(dims, g.n)
    partition = p if isinstance(p, PartitionSpec) else PartitionSpec.from_subset(p, len(dims))
    if partition.n_parts != len(dims):
        raise DimensionError(f"cut {partition.label()} does not match {len(dims)} subsystems")
    return dims, partition


def graph_partial_transpose(g: WeightedGraph, dims: Sequence[int], p: PartitionSpec | Sequence[int]) -> WeightedGraph:
    """T_s: edge {(v_s, v_t), (w_s, w_t)} becomes {(w_s, v_t), (v_s, w_t)}.

    Weights travel with the edge; an edge whose endpoints only swap
    orientation therefore ends up with the conjugate weight. Loops are fixed.
    """
    dims, partition = _partition(g, dims, p)
    return g.with_adjacency(partial_transpose(g.adjacency, dims, partition.s))


def degree_mismatch(g: WeightedGraph, dims: Sequence[int], p: PartitionSpec | Sequence[int]) -> float:
    gt = graph_partial_transpose(g, dims, p)
    return float(np.abs(g.degrees() - gt.degrees()).max(initial=0.0))


def degree_criterion(g: WeightedGraph, dims: Sequence[int], p: PartitionSpec | Sequence[int]) -> bool:
    return degree_mismatch(g, dims, p) <= get_settings().degree_tol


def is_edge_closed(g: WeightedGraph, dims: Sequence[int], p: PartitionSpec | Sequence[int], tol: float | None = None) -> bool:
    """Whether T_s maps the edge set onto itself with matching weight moduli (exact weights for real graphs)."""
    tol = get_settings().degree_tol if tol is None else tol
    moved = graph_partial_transpose(g, dims, p).off_diagonal()
    off = g.off_diagonal()
    if g.kind == "real":
        return float(np.abs(off - moved).max(initial=0.0)) <= tol
    return float(np.abs(np.abs(off) - np.abs(moved)).max(initial=0.0)) <= tol


def _diagonally_dominant(q: np.ndarray) -> bool:
    off = np.abs(q).sum(axis=1) - np.abs(q.diagonal())
    return bool(np.all(q.diagonal().real >= off - _threshold()))


def _is_tree(g: WeightedGraph) -> bool:
    support = (np.abs(g.off_diagonal()) > _threshold()).astype(int)
    n_edges = int(support.sum()) // 2
    n_comp, _ = connected_components(support, directed=False)
    return n_comp == 1 and n_edges == g.n - 1


def _structural_screen(g: WeightedGraph) -> str:
    thr = _threshold()
    deg = g.degrees()
    off = g.off_diagonal()
    nonisolated = np.abs(off).sum(axis=1) > thr
    if np.any(deg < -thr) or np.any(nonisolated & (np.abs(deg) <= thr)):
        return NOT_PSD
    loops = g.loops(thr)
    if g.kind == "real" and loops and sum(w for _, w in loops) < 0:
        return NOT_PSD
    if all(w >= 0 for _, w in loops) and (g.kind == "complex" or all(a.real > 0 for *_, a in g.edges(thr))):
        return PSD
    q = laplacian(g)
    if _diagonally_dominant(q):
        return PSD
    if g.kind == "real" and not loops and g.n >= 2 and _is_tree(g):
        # a loopless tree is PSD exactly when every weight is positive
        return NOT_PSD
    return UNKNOWN


def principal_subgraph(g: WeightedGraph, vertex: int) -> WeightedGraph:
    """Theta(u): delete ``vertex`` and roll its edges into loops on the neighbours."""
    keep = [v for v in range(g.n) if v != vertex]
    sub = laplacian(g)[np.ix_(keep, keep)]
    return graph_from_laplacian(sub, (len(keep),), g.kind)


def psd_screen(g: WeightedGraph) -> str:
    """Fast structural positivity verdict: PSD, NotPSD or Unknown."""
    verdict = _structural_screen(g)
    if verdict != UNKNOWN or g.n <= 2:
        return verdict
    for vertex in range(g.n):
        if _structural_screen(principal_subgraph(g, vertex)) == NOT_PSD:
            logger.debug("principal subgraph without vertex %d is not PSD", vertex)
            return NOT_PSD
    return UNKNOWN


def _compensate_negative_edges(adjacency: np.ndarray) -> np.ndarray:
    out = adjacency.copy()
    n = out.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            a = out[i, j].real
            if a < -_threshold():
                out[i, i] += 2.0 * abs(a)
                out[j, j] += 2.0 * abs(a)
    return out


def edit_edge(g: WeightedGraph, u: int, v: int, weight: complex | float = 0.0, action: str = "add") -> WeightedGraph:
    """Add or delete an edge (or a loop when ``u == v``), keeping the Laplacian PSD.

    Deleting a positive real edge removes every loop and then puts loops of
    2|a| on both ends of each remaining negative edge. Adding a negative real
    edge also adds 2|a| loops on its endpoints. Other edits need no
    compensation.
    """
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise GraphEditError(f"vertex out of range 0..{g.n - 1}")
    thr = _threshold()
    m = np.array(g.adjacency)
    current = m[u, v]
    if action == "delete":
        if abs(current) <= thr:
            raise GraphEditError(f"no edge {{{u}, {v}}} to delete")
        if u == v:
            m[u, u] = 0.0
            return g.with_adjacency(m)
        m[u, v] = m[v, u] = 0.0
        if g.kind == "real" and current.real > 0:
            m[np.diag_indices(g.n)] = 0.0
            m = _compensate_negative_edges(m)
        return g.with_adjacency(m)
    if action != "add":
        raise GraphEditError(f"unknown edit action '{action}'")
    if abs(current) > thr:
        raise GraphEditError(f"edge {{{u}, {v}}} already present")
    w = complex(weight)
    if abs(w) <= thr:
        raise GraphEditError("cannot add a zero-weight edge")
    if u == v:
        if abs(w.imag) > 0:
            raise GraphEditError("loop weights are real")
        m[u, u] = w.real
        return g.with_adjacency(m)
    if g.kind == "real" and abs(w.imag) > 0:
        raise GraphKindError("real-weighted graph cannot take a complex edge")
    m[u, v] = w
    m[v, u] = np.conj(w)
    if g.kind == "real" and w.real < 0:
        m[u, u] += 2.0 * abs(w)
        m[v, v] += 2.0 * abs(w)
    return g.with_adjacency(m)


def delete_vertex(g: WeightedGraph, vertex: int) -> WeightedGraph:
    """Delete incident edges one at a time, then drop the vertex; the result is one (n-1)-level system."""
    if not 0 <= vertex < g.n:
        raise GraphEditError(f"vertex out of range 0..{g.n - 1}")
    out = g
    for i, j, _ in g.edges(_threshold()):
        if vertex in (i, j) and abs(out.adjacency[i, j]) > _threshold():
            out = edit_edge(out, i, j, action="delete")
    if abs(out.adjacency[vertex, vertex]) > _threshold():
        out = edit_edge(out, vertex, vertex, action="delete")
    keep = [v for v in range(g.n) if v != vertex]
    return WeightedGraph(kind=g.kind, dims=(len(keep),), adjacency=out.adjacency[np.ix_(keep, keep)])


def add_vertex(g: WeightedGraph) -> WeightedGraph:
    """Append an isolated vertex; the result is one (n+1)-level system."""
    m = np.zeros((g.n + 1, g.n + 1), dtype=complex)
    m[: g.n, : g.n] = g.adjacency
    return WeightedGraph(kind=g.kind, dims=(g.n + 1,), adjacency=m)
