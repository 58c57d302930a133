from .ops import cosine, merge_graph_relational, similarity_join, topk
from .pattern import (Condition, EdgePattern, NodePattern, PatternQuery, ReturnItem,
                      eval_pattern, parse_pattern, unparse)
from .templates import (ComputedCache, QueryEngine, QueryTemplate, TemplateParameter,
                        load_catalog, validate_bindings)

__all__ = [
    "cosine", "merge_graph_relational", "similarity_join", "topk",
    "Condition", "EdgePattern", "NodePattern", "PatternQuery", "ReturnItem",
    "eval_pattern", "parse_pattern", "unparse",
    "ComputedCache", "QueryEngine", "QueryTemplate", "TemplateParameter",
    "load_catalog", "validate_bindings",
]
