"""Request/response models for the analysis service.

Spec, metric and potential payloads travel as the JSON wire formats of
the serialization module and are validated there; the models here pin
the envelope shapes the CLI and service share.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class PressureRequest(BaseModel):
    spec: Optional[dict] = None
    gallery: Optional[str] = None
    potential: dict = Field(default_factory=lambda: {
        "kind": "locally_constant", "depth": 1, "table": {}, "default": 0.0,
        "boundary_limits": {"default": 0.0}})
    method: str = "interior"
    schedule: Optional[list[int]] = None      # interior
    N: Optional[int] = None                   # spectral / compactified base
    n: Optional[int] = None                   # separated
    eps: Optional[float] = None               # separated
    theta: float = 0.5                        # separated
    metric: Optional[dict] = None             # separated
    base: Optional[Any] = None                # gurevich
    n_max: Optional[int] = None               # gurevich
    N_max: Optional[int] = None               # gurevich
    p_seq: Optional[list[int]] = None         # loop_gf
    cutoff: Optional[int] = None              # loop_gf
    boundary: Optional[dict] = None           # compactified
    seed: int = 0


class PressureRow(BaseModel):
    N: Optional[int] = None
    n: Optional[int] = None
    value: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    increment: Optional[float] = None


class PressureResponse(BaseModel):
    method: str
    value: float
    lower: float
    upper: Optional[float] = None
    params: dict = Field(default_factory=dict)
    rows: list[PressureRow] = Field(default_factory=list)
    seed: int = 0


class SectorsRequest(BaseModel):
    spec: Optional[dict] = None
    gallery: Optional[str] = None
    metric: Optional[dict] = None
    cutoffs: list[int] = Field(default_factory=lambda: [4, 16, 64])
    nmax: int = 256
    seed: int = 0


class SectorInfo(BaseModel):
    key: str
    size: int
    labels_head: list[str]
    diameter: float
    infinite: Optional[bool]
    connectivity: str
    note: str = ""


class SectorLevelInfo(BaseModel):
    k: int
    cutoff: int
    effective_cutoff: int
    absorbed: int
    delta_k: float
    sectors: list[SectorInfo]


class SectorsResponse(BaseModel):
    mode: str
    levels: list[SectorLevelInfo]
    nesting: dict[str, list[int]]
    verdict: str
    witness: Optional[dict] = None
    checks: list[dict]
    chains: Optional[list[dict]] = None
    seed: int = 0


class BoundaryRequest(BaseModel):
    gallery: Optional[str] = None
    spec: Optional[dict] = None
    metric: Optional[dict] = None
    cutoffs: Optional[list[int]] = None
    nmax: int = 128
    m_max: Optional[int] = None
    seed: int = 0


class BoundaryResponse(BaseModel):
    mode: str
    model: dict
    no_excursion: dict
    within_nonempty: bool
    within_is_identity: bool
    boundary_entropy: Optional[float] = None
    finite_entropy_probe: dict
    seed: int = 0


class DiffScanRequest(BaseModel):
    spec: Optional[dict] = None
    N: Optional[int] = None
    phi: dict
    psi: dict
    grid: list[float]  # [start, stop, step]
    tol: float = 1e-6
    seed: int = 0


class DiffScanResponse(BaseModel):
    rows: list[dict]   # t, P, d2P
    kinks: list[dict]
    tol: float
    seed: int = 0


class ClassifyRequest(BaseModel):
    metric: dict
    n_max: int = 256
    eps_grid: list[float] = Field(default_factory=lambda: [0.5, 1.0 / 3.0, 0.25])
    seed: int = 0


class ClassifyResponse(BaseModel):
    vanishing: dict
    totally_bounded: dict
    net_sizes: dict[str, int]
    seed: int = 0


class ConjectureRequest(BaseModel):
    name: str
    potential: Optional[dict] = None
    schedule: Optional[list[int]] = None
    seed: int = 0


class ConjectureResponse(BaseModel):
    name: str
    sectorial_verdict: str
    interior: PressureResponse
    compactified: PressureResponse
    difference: float
    note: str
    seed: int = 0


class GalleryItem(BaseModel):
    name: str
    oracles: dict
    notes: str = ""


class GalleryListResponse(BaseModel):
    entries: list[GalleryItem]
