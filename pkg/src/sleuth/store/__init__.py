from .base import DEFAULT_VIEW_DEFS, Store, register_default_views
from .graph import Edge, Node, PropertyGraph
from .graphmap import EdgeRule, GraphMappingSpec, NodeRule, build_graph_from_relation, node_key
from .tables import NUMERIC_CLASSES, SEMANTIC_CLASSES, Table
from .textindex import InvertedIndex, text_search
from .timeseries import TimeSeries, bucket_counts, bucket_start
from .views import Matrix, MaterializedViewDef, RefreshReport

__all__ = [
    "DEFAULT_VIEW_DEFS", "Store", "register_default_views",
    "Edge", "Node", "PropertyGraph",
    "EdgeRule", "GraphMappingSpec", "NodeRule", "build_graph_from_relation", "node_key",
    "NUMERIC_CLASSES", "SEMANTIC_CLASSES", "Table",
    "InvertedIndex", "text_search",
    "TimeSeries", "bucket_counts", "bucket_start",
    "Matrix", "MaterializedViewDef", "RefreshReport",
]
