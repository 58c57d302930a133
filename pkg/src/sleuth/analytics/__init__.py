from .bursts import BurstInterval, bursty_hashtags, detect_bursts, local_peakyness
from .centrality import (CentralityScores, InfluencerReport, betweenness, influencers,
                         pagerank)
from .compare import ks_statistic
from .expand import cooccurrence_expand
from .topics import TopicModel, lda_fit, topic_correlation, topic_divergence, topic_outputs

__all__ = [
    "BurstInterval", "bursty_hashtags", "detect_bursts", "local_peakyness",
    "CentralityScores", "InfluencerReport", "betweenness", "influencers", "pagerank",
    "ks_statistic",
    "cooccurrence_expand",
    "TopicModel", "lda_fit", "topic_correlation", "topic_divergence", "topic_outputs",
]
