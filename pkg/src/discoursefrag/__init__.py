"""Discourse-fragmentation analytics for labeled social-media post streams.

The package turns post streams into per-day interaction graphs, extracts
and tracks same-category communities across event windows, and computes a
fourteen-element fragmentation metric suite with deterministic SVG/DOT/
JSON/CSV outputs. See README.md for the pipeline walkthrough.
"""

from .classify import (CategorySet, Category, EvalConfig, LabeledPost,
                       LexiconClassifier, assign_label, default_category_set,
                       default_classifier, default_lexicon, evaluate,
                       label_posts, score)
from .community import (Community, CommunityChain, LifespanStats,
                        extract_communities, jaccard, jaccard_matrix,
                        lifespan_stats, track_communities)
from .graph import (DailyGraph, InteractionEdge, PersonaNode, Projection,
                    UnionFind, build_day_graph, co_engagement_projection,
                    connected_components, filter_graph)
from .ingest import (AreaSpec, CorpusSummary, EventPartition, EventWindow,
                     ParseReport, Post, build_query, parse_records, partition,
                     serialize_posts, summarize_corpus)
from .metrics import (CategoryDistribution, FragmentationReport,
                      build_report, cohesiveness, compare_distributions,
                      diversity_fraction, dominance_series, ei_index,
                      influencers_and_degrees, modularity_by_category,
                      reaction_index, scatter_ratio, segmentation)
from .pipeline import PartitionAnalysis, analyze_partition
from .render import LayoutResult, SnapshotStyle, emit_snapshot, layout, montage, snapshot
from .synth import PlantedCommunity, PlantedTruth, SynthConfig, generate
from .textprep import preprocess, stem, stopwords

__version__ = "0.1.0"
