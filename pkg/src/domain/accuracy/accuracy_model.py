"""Modelo de resultado de la comparación árbol recuperado vs. verdad."""

from pydantic import BaseModel


class AccuracyReport(BaseModel):
    """Precisión de tomografía p sobre ternas ordenadas de hojas."""

    p: float
    p_distinct: float
    n_leaves: int
    correct_triples: int
    total_triples: int
    correct_distinct: int
    total_distinct: int
