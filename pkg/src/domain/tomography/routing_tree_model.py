"""
Modelo de datos del árbol de enrutamiento (fuente → routers → hosts hoja).
El árbol es el resultado de la tomografía estática/dinámica y también la verdad
de referencia del simulador. Los routers inferidos reciben identificadores
sintéticos con prefijo `rtr-`, que nunca colisionan con los de los hosts.
"""

from typing import Dict, Iterable, List, Optional, Set, Tuple

from pydantic import BaseModel, Field

from ..errors import InputError, InvariantViolationError

NodeId = str

ROUTER_PREFIX = "rtr-"

# Tolerancia numérica al comprobar la monotonía de las etiquetas σ²_r
LABEL_TOLERANCE = 1e-9


class RoutingTree(BaseModel):
    """Árbol con raíz en la fuente; las hojas son hosts y los nodos internos routers."""

    root: NodeId
    children: Dict[NodeId, List[NodeId]] = Field(default_factory=dict)
    parent: Dict[NodeId, NodeId] = Field(default_factory=dict)
    router_cov: Dict[NodeId, float] = Field(default_factory=dict)
    leaves: Set[NodeId] = Field(default_factory=set)
    next_router: int = 0

    def model_post_init(self, __context) -> None:
        """Garantiza que la raíz exista como nodo interno con covarianza 0."""
        self.children.setdefault(self.root, [])
        self.router_cov.setdefault(self.root, 0.0)

    # ------------------------------------------------------------------
    # Consultas
    # ------------------------------------------------------------------
    def __contains__(self, node: NodeId) -> bool:
        return node == self.root or node in self.parent

    def nodes(self) -> List[NodeId]:
        """Todos los nodos, raíz incluida."""
        return [self.root, *self.parent.keys()]

    def routers(self) -> List[NodeId]:
        """Nodos internos distintos de la raíz."""
        return [n for n in self.parent if n not in self.leaves]

    def is_leaf(self, node: NodeId) -> bool:
        """True para los hosts receptores."""
        return node in self.leaves

    def is_router(self, node: NodeId) -> bool:
        """True para los nodos internos distintos de la raíz."""
        return node in self.parent and node not in self.leaves

    def label(self, node: NodeId) -> float:
        """Covarianza acumulada σ²_r registrada para un router (0 en la raíz)."""
        return self.router_cov.get(node, 0.0)

    def ancestors(self, node: NodeId) -> List[NodeId]:
        """Ancestros desde el padre hasta la raíz (inclusive)."""
        self._require(node)
        chain = []
        current = node
        while current != self.root:
            current = self.parent[current]
            chain.append(current)
        return chain

    def depth(self, node: NodeId) -> int:
        """Número de enlaces entre la raíz y el nodo."""
        return len(self.ancestors(node))

    def lca(self, a: NodeId, b: NodeId) -> NodeId:
        """Ancestro común más bajo de dos nodos."""
        if a == b:
            return a
        seen = {a, *self.ancestors(a)}
        if b in seen:
            return b
        for node in self.ancestors(b):
            if node in seen:
                return node
        raise InvariantViolationError(f"{a} y {b} no comparten raíz")

    def leaf_descendants(self, node: NodeId) -> List[NodeId]:
        """Hojas bajo un nodo, ordenadas por id."""
        self._require(node)
        if node in self.leaves:
            return [node]
        found = []
        stack = [node]
        while stack:
            current = stack.pop()
            if current in self.leaves:
                found.append(current)
            else:
                stack.extend(self.children.get(current, []))
        return sorted(found)

    def path_links(self, node: NodeId) -> List[Tuple[NodeId, NodeId]]:
        """Enlaces (padre, hijo) desde la raíz hasta el nodo."""
        chain = [node, *self.ancestors(node)]
        return [(chain[i + 1], chain[i]) for i in range(len(chain) - 2, -1, -1)]

    # ------------------------------------------------------------------
    # Mutación (un único escritor)
    # ------------------------------------------------------------------
    def new_router_id(self) -> NodeId:
        """Genera un id sintético de router que no existe todavía."""
        while True:
            router_id = f"{ROUTER_PREFIX}{self.next_router:04d}"
            self.next_router += 1
            if router_id not in self:
                return router_id

    def add_leaf(self, parent: NodeId, leaf: NodeId) -> None:
        """Cuelga un host nuevo de un nodo interno."""
        if leaf in self:
            raise InputError(f"El nodo {leaf} ya está en el árbol")
        if leaf.startswith(ROUTER_PREFIX):
            raise InputError(f"El id de host {leaf} usa el prefijo reservado")
        self._require_internal(parent)
        self.children[parent].append(leaf)
        self.parent[leaf] = parent
        self.leaves.add(leaf)

    def add_router(
        self, parent: NodeId, label: float, router_id: Optional[NodeId] = None
    ) -> NodeId:
        """Crea un router vacío bajo `parent` con etiqueta σ²_r."""
        self._require_internal(parent)
        router_id = router_id or self.new_router_id()
        if router_id in self:
            raise InputError(f"El router {router_id} ya existe")
        self.children[parent].append(router_id)
        self.children[router_id] = []
        self.parent[router_id] = parent
        self.router_cov[router_id] = float(label)
        return router_id

    def move(self, node: NodeId, new_parent: NodeId) -> None:
        """Reengancha un subárbol bajo otro nodo interno."""
        self._require_internal(new_parent)
        old_parent = self.parent[node]
        self.children[old_parent].remove(node)
        self.children[new_parent].append(node)
        self.parent[node] = new_parent

    def insert_router_above(self, node: NodeId, label: float) -> NodeId:
        """Inserta un router oculto entre `node` y su padre, en la misma posición."""
        if node == self.root:
            raise InputError("No se puede insertar un router por encima de la raíz")
        old_parent = self.parent[node]
        router_id = self.new_router_id()
        siblings = self.children[old_parent]
        siblings[siblings.index(node)] = router_id
        self.children[router_id] = [node]
        self.parent[router_id] = old_parent
        self.parent[node] = router_id
        self.router_cov[router_id] = float(label)
        return router_id

    def detach(self, node: NodeId) -> None:
        """Elimina un nodo sin hijos (hoja o router vacío)."""
        if node == self.root:
            raise InputError("No se puede eliminar la raíz")
        if self.children.get(node):
            raise InputError(f"El nodo {node} todavía tiene hijos")
        self.children[self.parent[node]].remove(node)
        del self.parent[node]
        self.children.pop(node, None)
        self.router_cov.pop(node, None)
        self.leaves.discard(node)

    def splice(self, router: NodeId) -> None:
        """Suprime un router con un solo hijo; el hijo ocupa su lugar."""
        (child,) = self.children[router]
        grandparent = self.parent[router]
        siblings = self.children[grandparent]
        siblings[siblings.index(router)] = child
        self.parent[child] = grandparent
        del self.parent[router]
        del self.children[router]
        self.router_cov.pop(router, None)

    def copy(self) -> "RoutingTree":
        """Copia profunda e independiente del árbol."""
        return self.model_copy(deep=True)

    # ------------------------------------------------------------------
    # Invariantes
    # ------------------------------------------------------------------
    def check_invariants(self) -> None:
        """Verifica conexión, consistencia padre/hijo y monotonía de etiquetas."""
        visited = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node in visited:
                raise InvariantViolationError(f"Ciclo detectado en {node}")
            visited.add(node)
            for child in self.children.get(node, []):
                if self.parent.get(child) != node:
                    raise InvariantViolationError(
                        f"{child} aparece bajo {node} pero su padre es "
                        f"{self.parent.get(child)}"
                    )
                if node != self.root and not self.is_leaf(child):
                    if self.label(child) + LABEL_TOLERANCE < self.label(node):
                        raise InvariantViolationError(
                            f"Etiqueta no monótona: {node}={self.label(node)} > "
                            f"{child}={self.label(child)}"
                        )
                stack.append(child)
        if visited != set(self.nodes()):
            raise InvariantViolationError("El árbol no es conexo")
        for leaf in self.leaves:
            if self.children.get(leaf):
                raise InvariantViolationError(f"La hoja {leaf} tiene hijos")

    def _require(self, node: NodeId) -> None:
        if node not in self:
            raise InputError(f"Nodo desconocido: {node}")

    def _require_internal(self, node: NodeId) -> None:
        self._require(node)
        if node in self.leaves:
            raise InputError(f"{node} es una hoja, no puede tener hijos")
        self.children.setdefault(node, [])


def shared_path_length(tree: RoutingTree, i: NodeId, j: NodeId) -> int:
    """
    Número de enlaces del camino compartido raíz→LCA(i, j).

    Con i == j devuelve la profundidad de la hoja: una hoja comparte consigo
    misma todo su camino.
    """
    for leaf in (i, j):
        if leaf not in tree.leaves:
            raise InputError(f"Hoja desconocida: {leaf}")
    return tree.depth(tree.lca(i, j))


def _skeleton_signature(tree: RoutingTree) -> Optional[str]:
    """Forma canónica del esqueleto de ramificación (routers unarios suprimidos)."""
    order = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(tree.children.get(node, []))

    signature: Dict[NodeId, Optional[str]] = {}
    for node in reversed(order):
        if node in tree.leaves:
            signature[node] = node
            continue
        parts = sorted(
            s
            for s in (signature[c] for c in tree.children.get(node, []))
            if s is not None
        )
        if node == tree.root:
            signature[node] = "(" + ",".join(parts) + ")"
        elif not parts:
            signature[node] = None
        elif len(parts) == 1:
            signature[node] = parts[0]
        else:
            signature[node] = "(" + ",".join(parts) + ")"
    return signature[tree.root]


def trees_topologically_equal(t1: RoutingTree, t2: RoutingTree) -> bool:
    """
    Igualdad salvo renombrado de routers, tras suprimir los routers unarios.
    """
    if t1.leaves != t2.leaves:
        raise InputError("Los árboles no tienen el mismo conjunto de hojas")
    if t1.root != t2.root:
        return False
    return _skeleton_signature(t1) == _skeleton_signature(t2)


def tree_from_edges(
    root: NodeId,
    edges: Iterable[Tuple[NodeId, NodeId]],
    leaves: Iterable[NodeId],
    labels: Optional[Dict[NodeId, float]] = None,
) -> RoutingTree:
    """Construye un árbol a partir de aristas (padre, hijo) en orden topológico."""
    labels = labels or {}
    leaf_set = set(leaves)
    tree = RoutingTree(root=root)
    for parent, child in edges:
        if child in leaf_set:
            tree.add_leaf(parent, child)
        else:
            tree.add_router(parent, labels.get(child, 0.0), router_id=child)
    return tree
