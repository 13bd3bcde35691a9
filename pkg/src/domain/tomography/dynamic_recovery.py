"""
Tomografía dinámica: incorpora un peer nuevo al árbol existente sin repetir la
recuperación estática, y elimina los peers que abandonan la red.

Partiendo de la raíz como router base m, se compara la covarianza del peer k con
el mejor representante de los hijos de m (σ²_{k,d*}) contra la de referencia
del propio m (σ²_{d1,d2}):
    SAME_SET  → k es hijo de m
    DEEPER    → se baja a c* (o se crea el router que falta sobre una hoja)
    SHALLOWER → k sube hasta r* o hasta un router oculto sobre r*
"""

from typing import Dict, List

from pydantic import BaseModel

from ..errors import InputError
from ..measurement.delay_correlation import CovarianceOracle
from .routing_tree_model import NodeId, RoutingTree
from .static_recovery import (
    CaseTag,
    RecoveryConfig,
    attach_via_ancestor,
    classify_case,
)


class JoinContext(BaseModel):
    """Estado de una iteración del algoritmo de incorporación."""

    base_router: NodeId
    children: List[NodeId]
    representatives: Dict[NodeId, NodeId]
    joining: NodeId
    best_child: NodeId
    best_rep: NodeId
    best_sigma: float
    reference_sigma: float


def select_representatives(tree: RoutingTree, m: NodeId) -> Dict[NodeId, NodeId]:
    """Para cada hijo de m, la hoja descendiente de menor id (la propia si es hoja)."""
    if m not in tree:
        raise InputError(f"Nodo desconocido: {m}")
    if tree.is_leaf(m):
        raise InputError(f"{m} es una hoja, no un router base")
    kids = tree.children.get(m, [])
    if not kids:
        raise InputError(f"El router {m} no tiene hijos")
    representatives = {}
    for child in kids:
        leaves = tree.leaf_descendants(child)
        if leaves:
            representatives[child] = leaves[0]
    return representatives


def build_join_context(
    tree: RoutingTree, oracle: CovarianceOracle, m: NodeId, k: NodeId
) -> JoinContext:
    """Calcula d*, c* y la covarianza de referencia del router base m."""
    representatives = select_representatives(tree, m)
    kids = sorted(representatives, key=lambda c: representatives[c])
    sigmas = {c: oracle(k, representatives[c]) for c in kids}
    best_child = max(kids, key=lambda c: sigmas[c])

    if len(kids) >= 2:
        first, second = sorted(kids)[:2]
        reference = oracle(representatives[first], representatives[second])
    else:
        reference = tree.label(m)

    return JoinContext(
        base_router=m,
        children=list(tree.children[m]),
        representatives=representatives,
        joining=k,
        best_child=best_child,
        best_rep=representatives[best_child],
        best_sigma=sigmas[best_child],
        reference_sigma=reference,
    )


def attach_peer(
    tree: RoutingTree,
    cov_oracle: CovarianceOracle,
    k: NodeId,
    config: RecoveryConfig,
) -> RoutingTree:
    """
    Incorpora el peer k al árbol (mutación in situ) y devuelve el mismo árbol.

    Raises:
        InputError: Si k ya está en el árbol
        MeasurementGapError: Si el oráculo no tiene alguno de los pares necesarios
    """
    if k in tree:
        raise InputError(f"El peer {k} ya está en el árbol")
    rho = config.rho
    m = tree.root

    while True:
        if not tree.children.get(m):
            tree.add_leaf(m, k)
            break

        ctx = build_join_context(tree, cov_oracle, m, k)
        case = classify_case(ctx.best_sigma, ctx.reference_sigma, rho)

        if case is CaseTag.SAME_SET:
            tree.add_leaf(m, k)
            break

        if case is CaseTag.DEEPER:
            child = ctx.best_child
            if not tree.is_leaf(child):
                m = child
                continue
            if ctx.best_sigma >= tree.label(m) + rho:
                router = tree.insert_router_above(child, ctx.best_sigma)
                tree.add_leaf(router, k)
            else:
                tree.add_leaf(m, k)
            break

        attach_via_ancestor(tree, k, ctx.best_rep, ctx.best_sigma, rho)
        break

    tree.check_invariants()
    return tree


def remove_peer(tree: RoutingTree, k: NodeId) -> RoutingTree:
    """
    Elimina la hoja k; los routers que quedan sin hijos desaparecen y los que
    quedan con uno solo se suprimen (el hijo sube a su abuelo).
    """
    if k not in tree.leaves:
        raise InputError(f"{k} no es una hoja del árbol")
    node = tree.parent[k]
    tree.detach(k)
    while node != tree.root:
        kids = tree.children.get(node, [])
        if not kids:
            upper = tree.parent[node]
            tree.detach(node)
            node = upper
            continue
        if len(kids) == 1:
            tree.splice(node)
        break
    return tree
