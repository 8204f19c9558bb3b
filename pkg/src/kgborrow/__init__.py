"""Text-enhanced knowledge graph embeddings with borrowed textual relations.

The toolkit augments a knowledge graph with lexicalised dependency paths
(LDPs) extracted from a corpus, learns to borrow suitable LDPs for entity
pairs that never co-occur in text, trains standard embedding models
(TransE, DistMult, ComplEx, RotatE) on the augmented graph, and evaluates
link and relation prediction under filtered and type-constraint settings.
"""

from .borrowing import (
    BorrowTrainSet,
    PairEncoder,
    SuperBorrowConfig,
    SuperBorrowResult,
    borrow_topk,
    build_borrow_train_set,
    build_negative_pool,
    cooccurrence_augment,
    grid_search_superborrow,
    linkall_augment,
    neighb_borrow,
    pair_features,
    pair_similarity,
    score_ldps,
    train_superborrow,
    TextualIndex,
    OPTIMAL_K,
)
from .evaluation import (
    EvalReport,
    EvalSettings,
    MetricBundle,
    aggregate,
    evaluate,
    prior_work_compat,
    rank_candidates,
)
from .kg import (
    KnowledgeGraph,
    MentionSplit,
    RelationCategory,
    TextualTriple,
    TextualTriples,
    Triple,
    TsvFormatError,
    Vocabulary,
    augment,
    load_knowledge_graph,
    load_textual_triples,
    load_triples,
    relation_categories,
    relation_category,
    save_textual_triples,
    save_triples,
    split_mentions,
)
from .ldpspace import LdpVectorStore, build_fallback_store, fallback_encode, load_vectors
from .losses import compute_loss
from .optim import AdaGradState, NonFiniteGradientError, adagrad_step
from .pipeline import RunConfig, RunOutcome, StageError, export_embeddings, load_embeddings, run
from .scores import (
    EmbeddingTable,
    init_embeddings,
    score,
    score_all_heads,
    score_all_relations,
    score_all_tails,
    score_batch,
)
from .training import (
    PAPER_HYPERPARAMETERS,
    TrainConfig,
    TrainingError,
    TrainResult,
    sample_negatives,
    train,
)

__version__ = "0.1.0"
