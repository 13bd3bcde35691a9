"""
Orden DFS estimado de las hojas a partir de la matriz de covarianzas.
Bisección recursiva: el par con menor covarianza marca la ramificación más alta
del conjunto; cada hoja se queda del lado del pivote con el que comparte más
camino. Los empates se resuelven por id para que el resultado sea reproducible.
"""

from typing import List

import numpy as np

from ..measurement.measurement_model import CovarianceMatrix
from .routing_tree_model import NodeId


def dfs_order(cov: CovarianceMatrix, tol: float = 0.0) -> List[NodeId]:
    """
    Permutación de los receptores que, sin ruido, es un orden DFS válido.

    Args:
        cov: Matriz de covarianzas entre receptores
        tol: Margen (ms²) que debe superar σ²(x, q) sobre σ²(x, p) para que x
             se vaya con q; con ruido mantiene juntos los subárboles equidistantes

    Returns:
        List[NodeId]: Hojas en orden DFS estimado
    """
    names = sorted(cov.receivers)
    if not names:
        return []
    index = cov.index
    perm = [index[name] for name in names]
    values = cov.values[np.ix_(perm, perm)]
    order = _bisect(values, list(range(len(names))), tol)
    return [names[i] for i in order]


def _bisect(values: np.ndarray, members: List[int], tol: float) -> List[int]:
    """Recursión explícita con pila para no depender del límite de recursión."""
    result: List[int] = []
    stack = [members]
    while stack:
        group = stack.pop()
        if len(group) <= 2:
            result.extend(sorted(group))
            continue
        p, q = _pivot_pair(values, group)
        p_side, q_side = [], []
        for x in group:
            if x == p:
                p_side.append(x)
            elif x == q:
                q_side.append(x)
            elif values[x, q] > values[x, p] + tol:
                q_side.append(x)
            else:
                p_side.append(x)
        # La pila es LIFO: se apila primero el lado que va detrás
        stack.append(q_side)
        stack.append(p_side)
    return result


def _pivot_pair(values: np.ndarray, group: List[int]) -> tuple:
    """Par (p, q) de menor covarianza; empates por índice (orden de id)."""
    sub = values[np.ix_(group, group)]
    upper = np.triu_indices(len(group), k=1)
    flat = sub[upper]
    best = int(np.argmin(flat))
    return group[upper[0][best]], group[upper[1][best]]


def is_valid_dfs_order(
    order: List[NodeId], cov: CovarianceMatrix, tol: float = 0.0
) -> bool:
    """
    Propiedad del mínimo consecutivo: para todo i < j < k,
    σ²(x_i, x_k) ≤ min(σ²(x_i, x_j), σ²(x_j, x_k)) + tol.
    """
    if len(order) < 3:
        return True
    index = cov.index
    idx = [index[name] for name in order]
    values = cov.values[np.ix_(idx, idx)]
    size = len(order)
    for j in range(1, size - 1):
        left = values[:j, j]
        right = values[j, j + 1 :]
        outer = values[:j, j + 1 :]
        bound = np.minimum(left[:, None], right[None, :]) + tol
        if np.any(outer > bound):
            return False
    return True
