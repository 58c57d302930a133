from .scoring import (ColumnProfile, DatasetDescription, TIE_ORDER, V_TYPES,
                      score_representations)
from .session import Annotation, BindingProposal, Session, corpus_summary_table
from .visuals import (ANNOTATION_RELATIONS, COMPATIBLE_DTYPES, INTERACTIONS, TopicBundle,
                      VisualObject, apply_interaction, build_graphic, describe_dataset,
                      model_of)

__all__ = [
    "ColumnProfile", "DatasetDescription", "TIE_ORDER", "V_TYPES",
    "score_representations",
    "Annotation", "BindingProposal", "Session", "corpus_summary_table",
    "ANNOTATION_RELATIONS", "COMPATIBLE_DTYPES", "INTERACTIONS", "TopicBundle",
    "VisualObject", "apply_interaction", "build_graphic", "describe_dataset", "model_of",
]
