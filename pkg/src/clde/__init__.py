"""Chaotic search with topological basin decoding for multimodal and
multi-objective optimization."""

from .config import RunConfig
from .engine import RunResult, run, score_result

__all__ = ["RunConfig", "RunResult", "run", "score_result"]
__version__ = "0.1.0"
