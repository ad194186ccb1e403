"""Score a corpus under a difficulty criterion and split it into tertiles.

Four criteria are supported: ``flesch`` (computed from text statistics,
higher = easier), ``uid_sl`` and ``uid_var`` (computed from surprisal
sequences, higher = harder), and ``neural`` (ingested from a score file,
direction declared per row). Splitting normalizes every criterion to
"higher = harder" internally, sorts easiest-first with doc id as the tie
break, and cuts the ordering into three near-equal blocks, giving any
remainder to easy first and then medium.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import uid
from .errors import (
    EmptyCorpus,
    MissingScore,
    MissingSurprisal,
    ParseError,
    TooSmall,
    ValidationError,
)
from .surprisal import NgramModel, SurprisalSequence, sentence_surprisals, token_surprisals
from .textstat import Document, FleschConfig, flesch_score, text_stats

CRITERIA = ("flesch", "uid_sl", "uid_var", "neural")

# Whether a larger criterion value means harder text. Neural scores carry
# their own per-file flag instead.
HIGHER_IS_HARDER = {"flesch": False, "uid_sl": True, "uid_var": True}


@dataclass(frozen=True)
class DifficultyScore:
    doc_id: str
    criterion: str
    value: float
    higher_is_harder: bool

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValidationError(f"unknown criterion {self.criterion!r}")
        if not math.isfinite(self.value):
            raise ValidationError(f"non-finite score for document {self.doc_id!r}")
        expected = HIGHER_IS_HARDER.get(self.criterion)
        if expected is not None and self.higher_is_harder != expected:
            raise ValidationError(
                f"criterion {self.criterion!r} must have higher_is_harder={expected}"
            )

    @property
    def difficulty(self) -> float:
        """Direction-normalized value: higher always means harder."""
        return self.value if self.higher_is_harder else -self.value


@dataclass(frozen=True)
class NeuralScore:
    """One row of an imported neural difficulty score file."""

    doc_id: str
    value: float
    higher_is_harder: bool


@dataclass
class Providers:
    """External inputs score_corpus may need, depending on the criterion.

    ``lm`` computes surprisals on the fly; ``surprisals`` supplies imported
    sequences keyed by doc id (several per id are treated as sentence
    sequences). ``per_sentence`` averages UID scores over sentences instead
    of scoring the document-level concatenation.
    """

    lm: NgramModel | None = None
    surprisals: Mapping[str, Sequence[SurprisalSequence]] | None = None
    neural: Mapping[str, NeuralScore] | None = None
    base: str = "2"
    uid_sl: uid.UidSlConfig = field(default_factory=uid.UidSlConfig)
    uid_var: uid.UidVarConfig = field(default_factory=uid.UidVarConfig)
    flesch: FleschConfig = field(default_factory=FleschConfig)
    per_sentence: bool = False


@dataclass(frozen=True)
class DifficultySplit:
    criterion: str
    easy: tuple[str, ...]
    medium: tuple[str, ...]
    hard: tuple[str, ...]
    boundaries: tuple[float, float]


def index_surprisals(seqs: Sequence[SurprisalSequence]) -> dict[str, list[SurprisalSequence]]:
    """Group imported sequences by document id, preserving file order."""
    out: dict[str, list[SurprisalSequence]] = {}
    for s in seqs:
        out.setdefault(s.doc_id, []).append(s)
    return out


def _doc_sequences(doc: Document, providers: Providers) -> list[SurprisalSequence]:
    if providers.lm is not None:
        if providers.per_sentence:
            return sentence_surprisals(providers.lm, doc, providers.base)
        return [token_surprisals(providers.lm, doc, providers.base)]
    if providers.surprisals is not None:
        seqs = providers.surprisals.get(doc.id)
        if seqs:
            return list(seqs)
    raise MissingSurprisal(doc.id)


def _uid_value(doc: Document, criterion: str, providers: Providers) -> float:
    if criterion == "uid_sl":
        score = lambda s: uid.uid_superlinear(s, providers.uid_sl)
    else:
        score = lambda s: uid.uid_variance(s, providers.uid_var)
    seqs = _doc_sequences(doc, providers)
    if providers.per_sentence:
        return uid.sentence_averaged(score, seqs)
    if len(seqs) == 1:
        return score(seqs[0])
    bases = {s.base for s in seqs}
    if len(bases) > 1:
        raise ValidationError(f"mixed surprisal bases for document {doc.id!r}: {sorted(bases)}")
    merged = SurprisalSequence(
        doc_id=doc.id,
        values=tuple(v for s in seqs for v in s.values),
        base=seqs[0].base,
    )
    return score(merged)


def score_corpus(
    corpus: Sequence[Document],
    criterion: str,
    providers: Providers | None = None,
) -> list[DifficultyScore]:
    """Score every document under one criterion. Deterministic in its inputs."""
    if criterion not in CRITERIA:
        raise ValidationError(f"unknown criterion {criterion!r}")
    if not corpus:
        raise EmptyCorpus("corpus is empty")
    ids = [d.id for d in corpus]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValidationError(f"duplicate document ids: {dupes}")
    providers = providers or Providers()

    scores = []
    for doc in corpus:
        if criterion == "flesch":
            value = flesch_score(text_stats(doc.text), providers.flesch)
            harder = False
        elif criterion in ("uid_sl", "uid_var"):
            value = _uid_value(doc, criterion, providers)
            harder = True
        else:
            if providers.neural is None or doc.id not in providers.neural:
                raise MissingScore(doc.id)
            row = providers.neural[doc.id]
            value = row.value
            harder = row.higher_is_harder
        scores.append(DifficultyScore(doc.id, criterion, value, harder))
    return scores


def tertile_split(scores: Sequence[DifficultyScore]) -> DifficultySplit:
    """Partition scored documents into easy/medium/hard thirds.

    Documents are sorted easiest-first by direction-normalized difficulty
    with doc id breaking ties, so identical inputs always produce identical
    splits. For n = 3q + r the block sizes are (q+r>=1, q+r>=2, q), i.e.
    extras go to easy, then medium. Boundaries record the raw criterion
    value of the last easy and last medium document.
    """
    if len(scores) < 3:
        raise TooSmall(f"need at least 3 scored documents, got {len(scores)}")
    criteria = {s.criterion for s in scores}
    if len(criteria) > 1:
        raise ValidationError(f"mixed criteria in one split: {sorted(criteria)}")
    flags = {s.higher_is_harder for s in scores}
    if len(flags) > 1:
        raise ValidationError("mixed higher_is_harder flags in one split")
    ids = [s.doc_id for s in scores]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate document ids in scores")

    ordered = sorted(scores, key=lambda s: (s.difficulty, s.doc_id))
    q, r = divmod(len(ordered), 3)
    n_easy = q + (1 if r >= 1 else 0)
    n_medium = q + (1 if r >= 2 else 0)
    easy = ordered[:n_easy]
    medium = ordered[n_easy:n_easy + n_medium]
    hard = ordered[n_easy + n_medium:]
    return DifficultySplit(
        criterion=next(iter(criteria)),
        easy=tuple(s.doc_id for s in easy),
        medium=tuple(s.doc_id for s in medium),
        hard=tuple(s.doc_id for s in hard),
        boundaries=(easy[-1].value, medium[-1].value),
    )


# ---------------------------------------------------------------------------
# file formats

def load_corpus_jsonl(path: str | Path) -> list[Document]:
    """Corpus JSONL: one {"id": str, "text": str} object per line."""
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=lineno) from e
            if not isinstance(obj, dict) or not {"id", "text"} <= obj.keys():
                raise ParseError("expected object with 'id' and 'text'", line=lineno)
            if not isinstance(obj["id"], str) or not isinstance(obj["text"], str):
                raise ParseError("'id' and 'text' must be strings", line=lineno)
            if obj["id"] in seen:
                raise ValidationError(f"line {lineno}: duplicate document id {obj['id']!r}")
            seen.add(obj["id"])
            docs.append(Document(id=obj["id"], text=obj["text"]))
    if not docs:
        raise EmptyCorpus(f"no documents in {path}")
    return docs


def load_neural_scores(path: str | Path) -> dict[str, NeuralScore]:
    """Neural score JSONL: {"id": str, "score": float, "higher_is_harder": bool}."""
    out: dict[str, NeuralScore] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=lineno) from e
            if not isinstance(obj, dict) or not {"id", "score", "higher_is_harder"} <= obj.keys():
                raise ParseError(
                    "expected object with 'id', 'score' and 'higher_is_harder'", line=lineno
                )
            if not isinstance(obj["score"], (int, float)) or isinstance(obj["score"], bool):
                raise ParseError(f"'score' must be a number, got {obj['score']!r}", line=lineno)
            if not isinstance(obj["higher_is_harder"], bool):
                raise ParseError("'higher_is_harder' must be a boolean", line=lineno)
            if not math.isfinite(obj["score"]):
                raise ValidationError(f"line {lineno}: non-finite score")
            if obj["id"] in out:
                raise ValidationError(f"line {lineno}: duplicate id {obj['id']!r}")
            out[obj["id"]] = NeuralScore(obj["id"], float(obj["score"]), obj["higher_is_harder"])
    return out


def scores_to_jsonl(scores: Sequence[DifficultyScore], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in scores:
            fh.write(json.dumps(
                {"id": s.doc_id, "criterion": s.criterion, "value": s.value,
                 "higher_is_harder": s.higher_is_harder},
                ensure_ascii=False,
            ) + "\n")


def scores_from_jsonl(path: str | Path) -> list[DifficultyScore]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=lineno) from e
            required = {"id", "criterion", "value", "higher_is_harder"}
            if not isinstance(obj, dict) or not required <= obj.keys():
                raise ParseError(f"expected object with {sorted(required)}", line=lineno)
            out.append(DifficultyScore(
                obj["id"], obj["criterion"], float(obj["value"]), bool(obj["higher_is_harder"])
            ))
    return out


def split_to_dict(split: DifficultySplit) -> dict:
    return {
        "criterion": split.criterion,
        "boundaries": list(split.boundaries),
        "easy": list(split.easy),
        "medium": list(split.medium),
        "hard": list(split.hard),
    }


def split_from_dict(data: dict) -> DifficultySplit:
    required = {"criterion", "boundaries", "easy", "medium", "hard"}
    if not isinstance(data, dict) or not required <= data.keys():
        raise ValidationError(f"split object must contain {sorted(required)}")
    if len(data["boundaries"]) != 2:
        raise ValidationError("split must have exactly two boundaries")
    return DifficultySplit(
        criterion=data["criterion"],
        easy=tuple(data["easy"]),
        medium=tuple(data["medium"]),
        hard=tuple(data["hard"]),
        boundaries=(float(data["boundaries"][0]), float(data["boundaries"][1])),
    )
