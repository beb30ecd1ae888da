"""btlint: a requirements-defect linter for Behavior Tree models."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Attribute,
    BehavioralModel,
    BehavioralUnit,
    Edge,
    ModelSet,
    Triple,
    build_model,
    downward_paths,
    position_of,
)
from .similarity import (  # noqa: F401
    Strategy,
    default_strategy,
    equivalent,
    load_strategy,
    unit_similarity,
)
