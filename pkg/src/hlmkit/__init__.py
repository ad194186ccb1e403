"""hlmkit: text difficulty criteria, stratified splits, and human-likeness analysis.

The package is organized around a small pipeline:

* :mod:`hlmkit.textstat` counts sentences/words/syllables and computes the
  Flesch reading-ease score.
* :mod:`hlmkit.surprisal` trains an interpolated Kneser-Ney n-gram model and
  produces per-token surprisal sequences (or imports them from JSONL).
* :mod:`hlmkit.uid` turns surprisal sequences into the two
  uniform-information-density difficulty scores.
* :mod:`hlmkit.splitkit` scores a corpus under one criterion and splits it
  into easy/medium/hard tertiles.
* :mod:`hlmkit.hlm` computes logical ordering scores and the per-model,
  per-task and per-criterion human-likeness indices over a performance cube.
* :mod:`hlmkit.experiment` builds curriculum schedules and measures
  convergence ratios and difficulty-transfer matrices.
* :mod:`hlmkit.cli` is the command-line driver tying it together.
"""

from .errors import (
    DegenerateStats,
    EmptyCorpus,
    EmptyDocument,
    HlmkitError,
    IncompleteDataWarning,
    MissingKey,
    MissingScore,
    MissingSurprisal,
    ParseError,
    TooSmall,
    ValidationError,
)
from .experiment import (
    Schedule,
    TrainingLog,
    TransferMatrix,
    convergence_ratio,
    make_schedule,
    seeded_shuffle,
    transfer_scores,
)
from .hlm import (
    HlmReport,
    PerformanceCube,
    PerformanceTriplet,
    cell_value,
    compute_report,
    index,
    load_cube_csv,
    logical_score,
)
from .splitkit import (
    DifficultyScore,
    DifficultySplit,
    Providers,
    score_corpus,
    tertile_split,
)
from .surprisal import (
    NgramModel,
    SurprisalSequence,
    import_surprisals,
    load_model,
    save_model,
    sentence_surprisals,
    token_surprisals,
    train_lm,
)
from .textstat import (
    Document,
    FleschConfig,
    TextStats,
    count_syllables,
    flesch_score,
    segment_sentences,
    text_stats,
    tokenize_words,
)
from .uid import UidSlConfig, UidVarConfig, uid_superlinear, uid_variance

__version__ = "0.1.0"

__all__ = [
    "DegenerateStats", "EmptyCorpus", "EmptyDocument", "HlmkitError",
    "IncompleteDataWarning", "MissingKey", "MissingScore", "MissingSurprisal",
    "ParseError", "TooSmall", "ValidationError",
    "Schedule", "TrainingLog", "TransferMatrix", "convergence_ratio",
    "make_schedule", "seeded_shuffle", "transfer_scores",
    "HlmReport", "PerformanceCube", "PerformanceTriplet", "cell_value",
    "compute_report", "index", "load_cube_csv", "logical_score",
    "DifficultyScore", "DifficultySplit", "Providers", "score_corpus", "tertile_split",
    "NgramModel", "SurprisalSequence", "import_surprisals", "load_model",
    "save_model", "sentence_surprisals", "token_surprisals", "train_lm",
    "Document", "FleschConfig", "TextStats", "count_syllables", "flesch_score",
    "segment_sentences", "text_stats", "tokenize_words",
    "UidSlConfig", "UidVarConfig", "uid_superlinear", "uid_variance",
    "__version__",
]
