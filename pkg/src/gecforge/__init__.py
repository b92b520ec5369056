"""gecforge: error-tag annotation, tag-conditioned corruption, and evaluation
for Arabic grammatical error correction data."""

from .align import Alignment, CharEditScript, EditOp, align, char_edit_script
from .annotate import AnnotatedPair, RuleTable, annotate, annotate_corpus
from .codec import (
    TrainingLine,
    decode_mask,
    encode_mask,
    format_training_line,
    parse_training_line,
)
from .core import (
    ALL_TAGS,
    EMPTY_TAGSET,
    ErrorTag,
    LabelMatrix,
    NUM_TAGS,
    ParallelExample,
    Sentence,
    TAG_CODES,
    TagSet,
    join_tokens,
    tag_category,
    tag_index,
    tokenize,
)
from .corrupt import (
    CorruptionPlan,
    CorruptionReport,
    CorruptionStep,
    INJECTABLE_TAGS,
    LEXICON_ONLY_TAGS,
    apply,
    corrupt,
    plan,
)
from .metrics import (
    BleuScore,
    BleuStats,
    ClassWeightTable,
    ConfusionCounts,
    GecScore,
    MetricsReport,
    ThresholdSweepResult,
    aggregate,
    bleu4,
    bleu4_corpus,
    class_weights,
    confusion,
    evaluate_labels,
    f05_variant,
    fbeta,
    gec_score,
    gec_score_corpus,
    hamming_loss,
    prf,
    sweep_threshold,
)

__version__ = "0.1.0"
