"""
Serialización JSON de árboles, matrices de covarianza y reportes.
Los reportes se escriben con claves ordenadas y sangría fija, de modo que una
misma configuración con las mismas semillas produce un fichero idéntico byte
a byte.
"""

import json
import os
from typing import Any, Dict

import numpy as np
from pydantic import ValidationError

from src.domain.errors import InputError
from src.domain.measurement.measurement_model import CovarianceMatrix
from src.domain.tomography.routing_tree_model import RoutingTree


def tree_to_dict(tree: RoutingTree) -> Dict[str, Any]:
    """Árbol anidado: {"id", "kind", "cov", "children"}; las hojas sin hijos."""

    def encode(node: str) -> Dict[str, Any]:
        """Nodo y su subárbol."""
        if tree.is_leaf(node):
            return {"id": node, "kind": "host"}
        return {
            "id": node,
            "kind": "root" if node == tree.root else "router",
            "cov": round(tree.label(node), 12),
            "children": [encode(c) for c in tree.children.get(node, [])],
        }

    return encode(tree.root)


def tree_from_dict(data: Dict[str, Any]) -> RoutingTree:
    """Reconstruye un RoutingTree desde su forma anidada."""
    if not isinstance(data, dict) or "id" not in data:
        raise InputError("Árbol JSON sin campo 'id' en la raíz")
    tree = RoutingTree(root=data["id"])
    pending = [(data["id"], child) for child in data.get("children", [])]
    while pending:
        parent, node = pending.pop(0)
        if node.get("kind") == "host":
            tree.add_leaf(parent, node["id"])
            continue
        tree.add_router(parent, float(node.get("cov", 0.0)), router_id=node["id"])
        pending.extend((node["id"], child) for child in node.get("children", []))
    tree.check_invariants()
    return tree


def covariance_to_dict(cov: CovarianceMatrix) -> Dict[str, Any]:
    """{"receivers", "values"} con la matriz como listas anidadas."""
    return {"receivers": list(cov.receivers), "values": cov.values.tolist()}


def covariance_from_dict(data: Dict[str, Any]) -> CovarianceMatrix:
    """
    Reconstruye la matriz guardada por `estimate` (el reporte completo o solo
    su clave "covariance").

    Raises:
        InputError: Faltan campos o la matriz no es cuadrada y simétrica
    """
    data = data.get("covariance", data)
    if "receivers" not in data or "values" not in data:
        raise InputError("La matriz necesita 'receivers' y 'values'")
    try:
        return CovarianceMatrix(receivers=tuple(data["receivers"]), values=data["values"])
    except ValidationError as e:
        raise InputError(f"Matriz de covarianzas inválida: {e}") from e


def covariance_summary(cov: CovarianceMatrix) -> Dict[str, Any]:
    """Resumen compacto para los reportes de escenario."""
    off = cov.off_diagonal()
    if off.size == 0:
        return {"n_receivers": len(cov.receivers)}
    return {
        "n_receivers": len(cov.receivers),
        "mean_off_diagonal": float(np.mean(off)),
        "min_off_diagonal": float(np.min(off)),
        "max_off_diagonal": float(np.max(off)),
        "negative_fraction": float(np.mean(off < 0)),
        "mean_variance": float(np.mean(np.diag(cov.values))),
    }


def write_json_report(report: Dict[str, Any], file_path: str) -> str:
    """
    Guarda un reporte JSON determinista.

    Returns:
        str: Ruta del fichero escrito
    """
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    return file_path


def read_json(file_path: str) -> Dict[str, Any]:
    """Lee un JSON; un contenido mal formado es InputError."""
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"JSON inválido en {file_path}: {e.msg}") from e
