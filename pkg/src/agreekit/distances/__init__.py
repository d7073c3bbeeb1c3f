"""Distance functions grouped by payload family.

Everything here is a plain function from two payloads to a float; the
registry module wires them to names, parameters, and metric-property flags.
"""

from .vector_text import (
    TokenEmbeddingTable,
    levenshtein_raw,
    translation_distance,
    vector_distance,
)
from .geometry import GeometryConfig, box_distance, keypoint_distance
from .multiobject import count_diff, multi_object_distance, ner_distance
from .structured import (
    RankingConfig,
    TedConfig,
    ranking_distance,
    tree_distance,
    tree_edit_distance,
)

__all__ = [
    "GeometryConfig",
    "RankingConfig",
    "TedConfig",
    "TokenEmbeddingTable",
    "box_distance",
    "count_diff",
    "keypoint_distance",
    "levenshtein_raw",
    "multi_object_distance",
    "ner_distance",
    "ranking_distance",
    "translation_distance",
    "tree_distance",
    "tree_edit_distance",
    "vector_distance",
]
