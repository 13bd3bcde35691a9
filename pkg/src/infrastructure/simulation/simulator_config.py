"""
Configuración del simulador de red de referencia.
Los valores por defecto reproducen la evaluación a escala de escritorio:
150 hosts, 50 routers, Waxman, enlaces de 100 Mbps, 70 % de clientes y tráfico
de fondo de Poisson de intensidad media.
"""

from typing import Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.framework.config import Config


class SimulatorConfig(BaseModel):
    """Parámetros de topología, enlaces, sesión y tráfico de fondo."""

    model_config = ConfigDict(extra="forbid")

    # Topología
    n_hosts: int = Field(150, ge=2)
    n_routers: int = Field(50, ge=1)
    topology_model: Literal["waxman", "waxman_flat", "random_lary"] = "waxman"
    waxman_alpha: float = Field(Config.WAXMAN_ALPHA, gt=0)
    waxman_beta: float = Field(Config.WAXMAN_BETA, gt=0, le=1)
    waxman_links: int = Field(2, ge=1, description="Enlaces por router nuevo")
    lary_degree: int = Field(3, ge=1, description="Máximo de routers hijo")
    client_fraction: float = Field(0.7, gt=0, le=1)
    seed: int = 0

    # Enlaces
    link_base_delay_us: Tuple[int, int] = (5_000, 20_000)
    link_delay_var_ms2: Tuple[float, float] = (0.0, 0.05)
    bandwidth_bps: float = Field(100e6, gt=0)
    link_loss_prob: float = Field(0.0, ge=0, lt=1)

    # Sesión de pares de paquetes
    packet_size_bytes: int = Field(200, gt=0)
    pair_interval_us: int = Field(30_000, gt=0)
    interval_mode: Literal["fixed", "timestamped"] = "fixed"
    n_pairs: int = Field(2_000, ge=2)
    jitter_correlation_us: float = Field(0.0, ge=0, description="τ del AR(1)")
    clock_offset_max_us: int = Field(0, ge=0)

    # Tráfico de fondo
    bg_rate: float = Field(4e6, ge=0, description="Bytes/s medios (Poisson)")
    bg_var_per_mbps: float = Field(0.4, ge=0, description="ms² por MBps y enlace")
    bg_load_factor: Tuple[float, float] = (0.8, 1.2)
    congestion_threshold: float = Field(0.8, gt=0, lt=1)
    congestion_jitter_var_ms2: float = Field(80.0, ge=0)
    congestion_loss_prob: float = Field(0.05, ge=0, le=1)

    @model_validator(mode="after")
    def _check_ranges(self) -> "SimulatorConfig":
        """Los rangos deben ser no negativos y ordenados."""
        for name in ("link_base_delay_us", "link_delay_var_ms2", "bg_load_factor"):
            low, high = getattr(self, name)
            if low < 0 or high < low:
                raise ValueError(f"{name} debe cumplir 0 <= min <= max")
        return self

    @property
    def bg_rate_mbps(self) -> float:
        """Tasa de fondo en MBps."""
        return self.bg_rate / 1e6

    @property
    def session_bps_per_client(self) -> float:
        """Bits/s que la sesión añade a un enlace por cada cliente aguas abajo."""
        return self.packet_size_bytes * 8 / (self.pair_interval_us / 1e6)

    @property
    def transmission_us(self) -> float:
        """Tiempo de serialización de un paquete en un enlace."""
        return self.packet_size_bytes * 8 / self.bandwidth_bps * 1e6
