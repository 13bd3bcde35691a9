"""
Precisión de tomografía: fracción de ternas ordenadas (i, j, k) en las que la
comparación P(i,j) ≥ P(i,k) coincide entre el árbol recuperado y la verdad.
P es la longitud (en enlaces) del camino compartido; solo importa su orden,
así que los routers unarios de la verdad no afectan al resultado.
"""

from typing import Iterable, List, Tuple

import numpy as np

from ..errors import InputError
from ..tomography.routing_tree_model import NodeId, RoutingTree, shared_path_length
from .accuracy_model import AccuracyReport


def classify_triple(
    i: NodeId, j: NodeId, k: NodeId, recovered: RoutingTree, truth: RoutingTree
) -> int:
    """f(i, j, k): 1 si ambos árboles ordenan igual P(i,j) frente a P(i,k)."""
    recovered_says = shared_path_length(recovered, i, j) >= shared_path_length(
        recovered, i, k
    )
    truth_says = shared_path_length(truth, i, j) >= shared_path_length(truth, i, k)
    return int(recovered_says == truth_says)


def shared_path_matrix(tree: RoutingTree, leaves: List[NodeId]) -> np.ndarray:
    """Matriz P[a, b] de caminos compartidos; la diagonal es la profundidad."""
    position = {leaf: idx for idx, leaf in enumerate(leaves)}
    missing = [leaf for leaf in leaves if leaf not in tree.leaves]
    if missing:
        raise InputError(f"Hojas ausentes en el árbol: {missing}")

    # Recorrido en anchura: cada nodo interno sobrescribe a sus ancestros
    depth = {tree.root: 0}
    order = [tree.root]
    for node in order:
        for child in tree.children.get(node, []):
            depth[child] = depth[node] + 1
            order.append(child)

    below = {}
    for node in reversed(order):
        if node in tree.leaves:
            below[node] = [position[node]] if node in position else []
        else:
            below[node] = [
                idx for child in tree.children.get(node, []) for idx in below[child]
            ]

    size = len(leaves)
    matrix = np.zeros((size, size), dtype=np.int64)
    for node in order:
        if node in tree.leaves:
            continue
        members = below[node]
        if len(members) >= 2:
            matrix[np.ix_(members, members)] = depth[node]
    for leaf, idx in position.items():
        matrix[idx, idx] = depth[leaf]
    return matrix


def _count_agreements(
    truth_paths: np.ndarray, recovered_paths: np.ndarray
) -> Tuple[int, int]:
    """Ternas correctas (todas y con índices distintos) agrupando por valores de P."""
    size = truth_paths.shape[0]
    correct = 0
    correct_distinct = 0
    for anchor in range(size):
        pairs = np.stack([truth_paths[anchor], recovered_paths[anchor]], axis=1)
        keys, counts = np.unique(pairs, axis=0, return_counts=True)
        a, b = keys[:, 0], keys[:, 1]
        agree = (a[:, None] >= a[None, :]) == (b[:, None] >= b[None, :])
        correct += int(counts @ agree.astype(np.int64) @ counts)

        others = np.delete(pairs, anchor, axis=0)
        if others.shape[0] == 0:
            continue
        keys, counts = np.unique(others, axis=0, return_counts=True)
        a, b = keys[:, 0], keys[:, 1]
        agree = (a[:, None] >= a[None, :]) == (b[:, None] >= b[None, :])
        # j == k siempre coincide; se descuenta
        correct_distinct += int(counts @ agree.astype(np.int64) @ counts) - int(
            counts.sum()
        )
    return correct, correct_distinct


def _leaf_list(X: Iterable[NodeId]) -> List[NodeId]:
    leaves = sorted(set(X))
    if not leaves:
        raise InputError("El conjunto de hojas X está vacío")
    return leaves


def score_trees(
    recovered: RoutingTree, truth: RoutingTree, X: Iterable[NodeId]
) -> AccuracyReport:
    """Calcula p (cubo completo) y la variante de ternas distintas."""
    leaves = _leaf_list(X)
    truth_paths = shared_path_matrix(truth, leaves)
    recovered_paths = shared_path_matrix(recovered, leaves)
    correct, correct_distinct = _count_agreements(truth_paths, recovered_paths)

    size = len(leaves)
    total = size**3
    total_distinct = size * (size - 1) * (size - 2)
    return AccuracyReport(
        p=correct / total,
        p_distinct=correct_distinct / total_distinct if total_distinct else 1.0,
        n_leaves=size,
        correct_triples=correct,
        total_triples=total,
        correct_distinct=correct_distinct,
        total_distinct=total_distinct,
    )


def tomography_accuracy(
    recovered: RoutingTree, truth: RoutingTree, X: Iterable[NodeId]
) -> float:
    """p = (1/|X|³) Σ_i Σ_j Σ_k f(i, j, k)."""
    return score_trees(recovered, truth, X).p


def tomography_accuracy_distinct(
    recovered: RoutingTree, truth: RoutingTree, X: Iterable[NodeId]
) -> float:
    """Igual que p pero solo con ternas de índices distintos (1.0 si |X| < 3)."""
    return score_trees(recovered, truth, X).p_distinct


def tomography_accuracy_bruteforce(
    recovered: RoutingTree, truth: RoutingTree, X: Iterable[NodeId]
) -> float:
    """Enumeración directa de las |X|³ ternas; referencia para tests."""
    leaves = _leaf_list(X)
    total = sum(
        classify_triple(i, j, k, recovered, truth)
        for i in leaves
        for j in leaves
        for k in leaves
    )
    return total / len(leaves) ** 3
