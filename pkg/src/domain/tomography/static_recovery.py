"""
Tomografía estática: reconstruye el árbol de enrutamiento recorriendo las hojas
en orden DFS y comparando covarianzas consecutivas contra el umbral ϱ.

Casos (x_i es la hoja actual, x_{i-1} la anterior):
    SAME_SET  → x_i cuelga del mismo router que x_{i-1}
    DEEPER    → router nuevo r_i con hijos x_{i-1}, x_i
    SHALLOWER → x_i sube hasta r* (o hasta un router oculto sobre r*)
"""

from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..errors import InputError
from ..measurement.measurement_model import CovarianceMatrix
from .routing_tree_model import NodeId, RoutingTree

DEFAULT_RHO_FLOOR = 0.01


class RecoveryConfig(BaseModel):
    """Parámetros de recuperación."""

    rho: float = Field(gt=0, description="ϱ en ms², incremento mínimo por router")


class CaseTag(str, Enum):
    """Resultado de comparar dos covarianzas de camino compartido."""

    SAME_SET = "same_set"
    DEEPER = "deeper"
    SHALLOWER = "shallower"


def classify_case(sigma_cur: float, sigma_prev: float, rho: float) -> CaseTag:
    """
    Clasifica σ²_cur frente a σ²_prev; a exactamente ϱ de distancia gana
    DEEPER y luego SHALLOWER.
    """
    if rho <= 0:
        raise InputError("rho debe ser positivo")
    if sigma_cur >= sigma_prev + rho:
        return CaseTag.DEEPER
    if sigma_cur + rho <= sigma_prev:
        return CaseTag.SHALLOWER
    return CaseTag.SAME_SET


def find_attachment_router(
    tree: RoutingTree, from_leaf: NodeId, sigma_target: float, rho: float
) -> Tuple[NodeId, bool]:
    """
    Sube desde el padre de `from_leaf` y devuelve el router r* más cercano a la
    raíz con σ²_{r*} ≥ sigma_target, junto con si la coincidencia es exacta
    (|σ²_{r*} - sigma_target| < ϱ). Sin candidato devuelve la raíz.
    """
    if from_leaf not in tree.leaves:
        raise InputError(f"{from_leaf} no es una hoja del árbol")
    r_star = None
    for node in tree.ancestors(from_leaf):
        if tree.label(node) >= sigma_target:
            r_star = node
        else:
            break
    if r_star is None:
        r_star = tree.root
    return r_star, abs(tree.label(r_star) - sigma_target) < rho


def attach_via_ancestor(
    tree: RoutingTree,
    new_leaf: NodeId,
    from_leaf: NodeId,
    sigma_target: float,
    rho: float,
) -> NodeId:
    """
    Cuelga `new_leaf` de r* o de un router oculto entre r* y f(r*).

    Returns:
        NodeId: Nodo del que cuelga la hoja nueva
    """
    r_star, exact = find_attachment_router(tree, from_leaf, sigma_target, rho)
    if exact:
        tree.add_leaf(r_star, new_leaf)
        return r_star

    if r_star != tree.root:
        upper = tree.parent[r_star]
        # Con ruido f(r*) puede quedar justo por debajo del objetivo
        if abs(tree.label(upper) - sigma_target) < rho:
            tree.add_leaf(upper, new_leaf)
            return upper
        hidden = tree.insert_router_above(r_star, sigma_target)
        tree.add_leaf(hidden, new_leaf)
        return hidden

    if sigma_target > 0:
        # Ningún ancestro alcanza el objetivo: punto de ramificación más profundo
        anchor = tree.parent[from_leaf]
    else:
        anchor = tree.root
    tree.add_leaf(anchor, new_leaf)
    return anchor


def recover_tree(
    source: NodeId,
    ordered_leaves: Sequence[NodeId],
    cov: CovarianceMatrix,
    config: RecoveryConfig,
) -> RoutingTree:
    """
    Construye el árbol de enrutamiento desde la fuente.

    Args:
        source: Host emisor (raíz)
        ordered_leaves: Hojas en orden DFS
        cov: Covarianzas estimadas entre hojas
        config: Umbral ϱ

    Returns:
        RoutingTree: Árbol con etiquetas σ²_r en cada router
    """
    leaves: List[NodeId] = list(ordered_leaves)
    if not leaves:
        raise InputError("Se necesita al menos una hoja")
    if len(set(leaves)) != len(leaves):
        raise InputError("Hojas duplicadas en el orden")
    missing = [leaf for leaf in leaves if leaf not in cov.index]
    if missing:
        raise InputError(f"Hojas ausentes en la matriz de covarianzas: {missing}")
    if source in leaves:
        raise InputError("La fuente no puede ser una hoja")

    rho = config.rho
    tree = RoutingTree(root=source)
    if len(leaves) == 1:
        tree.add_leaf(source, leaves[0])
        return tree

    first, second = leaves[0], leaves[1]
    sigma_prev = cov.get(second, first)
    if sigma_prev >= rho:
        router = tree.add_router(source, sigma_prev)
        tree.add_leaf(router, first)
        tree.add_leaf(router, second)
    else:
        tree.add_leaf(source, first)
        tree.add_leaf(source, second)

    for i in range(2, len(leaves)):
        current, previous = leaves[i], leaves[i - 1]
        sigma_cur = cov.get(current, previous)
        _place_leaf(tree, current, previous, sigma_cur, sigma_prev, rho)
        sigma_prev = sigma_cur

    tree.check_invariants()
    return tree


def _place_leaf(
    tree: RoutingTree,
    current: NodeId,
    previous: NodeId,
    sigma_cur: float,
    sigma_prev: float,
    rho: float,
) -> None:
    anchor = tree.parent[previous]
    case = classify_case(sigma_cur, sigma_prev, rho)

    if case is CaseTag.DEEPER and sigma_cur >= tree.label(anchor) + rho:
        router = tree.add_router(anchor, sigma_cur)
        tree.move(previous, router)
        tree.add_leaf(router, current)
    elif case is CaseTag.SHALLOWER:
        attach_via_ancestor(tree, current, previous, sigma_cur, rho)
    else:
        tree.add_leaf(anchor, current)


def select_rho(cov: CovarianceMatrix, floor: float = DEFAULT_RHO_FLOOR) -> float:
    """Mitad del menor hueco positivo entre covarianzas distintas, con suelo."""
    values = np.unique(np.round(cov.off_diagonal(), 9))
    gaps = np.diff(values)
    gaps = gaps[gaps > 0]
    if gaps.size == 0:
        return floor
    return max(float(gaps.min()) / 2.0, floor)
