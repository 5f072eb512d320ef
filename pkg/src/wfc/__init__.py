"""Workflow completion toolkit.

Turns a corpus of GitHub workflow files into completion-model training data
via a canonical representation and a five-category token abstraction,
provides an n-gram statistical completion baseline, and evaluates any
model's predictions with exact match, BLEU-4, ROUGE-LCS, confidence
bucketing, and paired statistical tests.
"""

from .workflow import (  # noqa: F401
    Job,
    Step,
    Token,
    TokenStream,
    WorkflowDoc,
    canonicalize,
    parse_workflow,
    tokenize,
    tokenize_texts,
)
from .abstraction import (  # noqa: F401
    CoverageReport,
    PlaceholderCategory,
    abstract_stream,
    abstract_text,
    abstraction_stats,
    classify_token,
)
from .dataset import (  # noqa: F401
    Instance,
    MaskedInstance,
    SplitAssignment,
    build_jc_instances,
    build_ns_instances,
    build_pretrain_instances,
    filter_corpus,
    split_by_project,
)
from .ngram import NgramModel, complete, next_token, select_best_n, train  # noqa: F401
from .metrics import (  # noqa: F401
    ConfidenceBucketReport,
    MetricReport,
    PredictionRecord,
    bleu4,
    bucket_by_confidence,
    exact_match,
    rouge_l,
    score_pairs,
)
from .stats import (  # noqa: F401
    StatResult,
    cliffs_delta,
    holm_adjust,
    mcnemar,
    wilcoxon_signed_rank,
)

__version__ = "0.1.0"
