"""Per-token surprisal from an interpolated Kneser-Ney n-gram model.

Surprisal of a token is -log p(token | preceding context). The built-in model
is a single-discount interpolated Kneser-Ney estimator of order 1 to 3:
the top order uses raw counts, lower orders use continuation counts (number
of distinct left extensions observed one order up), and the recursion bottoms
out in a uniform distribution over the predictable vocabulary. Because the
discount is below 1 and the uniform floor is always reachable, every
conditional probability is strictly positive and every surprisal finite.

Sequences produced elsewhere (e.g. by a neural LM scored offline) can be
ingested from JSONL instead; see :func:`import_surprisals`.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EmptyCorpus, EmptyDocument, ParseError, ValidationError
from .textstat import Document, segment_sentences, tokenize_words

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

MODEL_FORMAT = "hlmkit-ngram"
MODEL_VERSION = 1

_LOG = {"2": math.log2, "e": math.log}


@dataclass(frozen=True)
class SurprisalSequence:
    """Per-token surprisals for one document, in the given log base."""

    doc_id: str
    values: tuple[float, ...]
    base: str = "2"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise EmptyDocument(f"surprisal sequence for {self.doc_id!r} is empty")
        if self.base not in _LOG:
            raise ValidationError(f"base must be '2' or 'e', got {self.base!r}")
        for v in self.values:
            if not math.isfinite(v) or v < 0:
                raise ValidationError(
                    f"surprisal values must be finite and >= 0, got {v!r} "
                    f"in document {self.doc_id!r}"
                )


def _tokenize_sentences(text: str) -> list[list[str]]:
    """Lowercased word tokens per sentence; empty sentences dropped."""
    out = []
    for sent in segment_sentences(text):
        toks = [t.lower() for t in tokenize_words(sent)]
        if toks:
            out.append(toks)
    return out


class NgramModel:
    """Immutable Kneser-Ney smoothed n-gram model.

    ``counts`` maps each order k to {history tuple: {word: count}} of raw
    k-gram counts from the padded training stream. Windows whose last token
    is the start pad are never counted, so each history's distribution
    normalizes exactly over the predictable vocabulary.

    The predictable vocabulary excludes the start pad, and excludes the end
    pad for unigram models (order 1 trains on unpadded token streams so that
    its low-discount limit matches raw relative frequencies).
    """

    def __init__(self, order: int, discount: float, vocab: Iterable[str],
                 counts: Mapping[int, Mapping[tuple[str, ...], Mapping[str, int]]]):
        if not 1 <= order <= 3:
            raise ValidationError(f"order must be in [1, 3], got {order}")
        if not 0 < discount < 1:
            raise ValidationError(f"discount must be in (0, 1), got {discount}")
        self.order = order
        self.discount = discount
        self.vocab = frozenset(vocab) | {BOS, EOS, UNK}
        if set(counts) != set(range(1, order + 1)):
            raise ValidationError(
                f"count tables must cover orders 1..{order}, got {sorted(counts)}"
            )
        self.counts = {
            k: {tuple(h): dict(ws) for h, ws in tbl.items()}
            for k, tbl in counts.items()
        }
        excluded = {BOS} | ({EOS} if order == 1 else set())
        self._events: tuple[str, ...] = tuple(sorted(self.vocab - excluded))
        self._tables = self._build_tables()
        self._totals = {
            k: {h: sum(ws.values()) for h, ws in tbl.items()}
            for k, tbl in self._tables.items()
        }

    def _build_tables(self) -> dict[int, dict[tuple[str, ...], dict[str, int]]]:
        tables = {self.order: self.counts[self.order]}
        for k in range(self.order - 1, 0, -1):
            left: dict[tuple, dict[str, set]] = defaultdict(lambda: defaultdict(set))
            for hist, words in self.counts[k + 1].items():
                for w in words:
                    full = hist + (w,)
                    left[full[1:-1]][full[-1]].add(full[0])
            tables[k] = {
                h: {w: len(vs) for w, vs in ws.items()} for h, ws in left.items()
            }
        return tables

    @property
    def event_vocab(self) -> tuple[str, ...]:
        """Sorted tokens the model assigns probability to."""
        return self._events

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        """p(word | context). Unknown words and context tokens map to <unk>."""
        if word == BOS:
            raise ValidationError("the start pad is not a predictable token")
        w = word if word in self.vocab else UNK
        ctx = tuple(t if t in self.vocab else UNK for t in context)
        k = min(self.order, len(ctx) + 1)
        hist = ctx[len(ctx) - (k - 1):] if k > 1 else ()
        return self._p(k, hist, w)

    def _p(self, k: int, hist: tuple[str, ...], w: str) -> float:
        if k == 0:
            return 1.0 / len(self._events)
        words = self._tables[k].get(hist)
        if not words:
            return self._p(k - 1, hist[1:], w)
        total = self._totals[k][hist]
        discounted = max(words.get(w, 0) - self.discount, 0.0)
        backoff_mass = self.discount * len(words) / total
        return discounted / total + backoff_mass * self._p(k - 1, hist[1:], w)

    def distribution(self, context: Sequence[str] = ()) -> dict[str, float]:
        """Full conditional distribution over the predictable vocabulary."""
        return {w: self.prob(w, context) for w in self._events}


def train_lm(corpus: Sequence[Document], order: int = 2, discount: float = 0.75) -> NgramModel:
    """Train an interpolated Kneser-Ney model on a corpus.

    Sentences are lowercased and, for order >= 2, padded with ``order - 1``
    start symbols and one end symbol. Every training token is kept in the
    vocabulary (no minimum count); tokens unseen at scoring time map to
    ``<unk>``, which receives probability through the uniform floor.
    """
    if not corpus:
        raise EmptyCorpus("corpus is empty")
    if not 1 <= order <= 3:
        raise ValidationError(f"order must be in [1, 3], got {order}")
    if not 0 < discount < 1:
        raise ValidationError(f"discount must be in (0, 1), got {discount}")

    sents = [s for doc in corpus for s in _tokenize_sentences(doc.text)]
    if not sents:
        raise EmptyCorpus("corpus contains no tokens")

    vocab = {t for s in sents for t in s}
    counts: dict[int, dict[tuple[str, ...], Counter]] = {
        k: defaultdict(Counter) for k in range(1, order + 1)
    }
    for s in sents:
        padded = [BOS] * (order - 1) + s + ([EOS] if order >= 2 else [])
        for k in range(1, order + 1):
            for i in range(len(padded) - k + 1):
                gram = tuple(padded[i:i + k])
                if gram[-1] == BOS:
                    continue
                counts[k][gram[:-1]][gram[-1]] += 1
    return NgramModel(order, discount, vocab, counts)


def token_surprisals(model: NgramModel, doc: Document, base: str = "2") -> SurprisalSequence:
    """Surprisal of every real token in the document, sentences concatenated.

    Start/end pads condition and absorb probability mass but are never scored
    themselves, so the output has exactly one value per word token.
    """
    seqs = sentence_surprisals(model, doc, base)
    values = tuple(v for s in seqs for v in s.values)
    return SurprisalSequence(doc_id=doc.id, values=values, base=base)


def sentence_surprisals(model: NgramModel, doc: Document, base: str = "2") -> list[SurprisalSequence]:
    """Per-sentence surprisal sequences for one document."""
    if base not in _LOG:
        raise ValidationError(f"base must be '2' or 'e', got {base!r}")
    log = _LOG[base]
    sents = _tokenize_sentences(doc.text)
    if not sents:
        raise EmptyDocument(f"document {doc.id!r} has no tokens")
    out = []
    for s in sents:
        ctx: tuple[str, ...] = (BOS,) * (model.order - 1)
        values = []
        for tok in s:
            p = model.prob(tok, ctx)
            # max() guards float round-off when p is within an ulp of 1
            values.append(max(0.0, -log(p)))
            ctx = ctx + (tok,)
        out.append(SurprisalSequence(doc_id=doc.id, values=tuple(values), base=base))
    return out


def import_surprisals(path: str | Path) -> list[SurprisalSequence]:
    """Read surprisal sequences from JSONL.

    One object per line: {"id": str, "surprisals": [float, ...], "base": "2"|"e"}.
    Several lines may share an id (e.g. one line per sentence); consumers
    decide whether to concatenate or average them.
    """
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=lineno) from e
            if not isinstance(obj, dict) or not {"id", "surprisals", "base"} <= obj.keys():
                raise ParseError("expected object with 'id', 'surprisals' and 'base'", line=lineno)
            doc_id = obj["id"]
            values = obj["surprisals"]
            if not isinstance(doc_id, str) or not isinstance(values, list):
                raise ParseError("'id' must be a string and 'surprisals' a list", line=lineno)
            for v in values:
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ParseError(f"non-numeric surprisal {v!r}", line=lineno)
                if v < 0:
                    raise ValidationError(f"line {lineno}: negative surprisal {v!r}")
            out.append(SurprisalSequence(
                doc_id=doc_id, values=tuple(values), base=str(obj["base"])
            ))
    return out


def export_surprisals(seqs: Iterable[SurprisalSequence], path: str | Path) -> None:
    """Write sequences as JSONL, one object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for s in seqs:
            fh.write(json.dumps(
                {"id": s.doc_id, "surprisals": list(s.values), "base": s.base},
                ensure_ascii=False,
            ) + "\n")


def model_to_dict(model: NgramModel) -> dict:
    """Versioned, fully sorted JSON-safe dump of the raw count tables."""
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "order": model.order,
        "discount": model.discount,
        "vocab": sorted(model.vocab),
        "counts": [
            [k, [
                [list(h), sorted(ws.items())]
                for h, ws in sorted(model.counts[k].items())
            ]]
            for k in sorted(model.counts)
        ],
    }


def model_from_dict(data: dict) -> NgramModel:
    if not isinstance(data, dict) or data.get("format") != MODEL_FORMAT:
        raise ValidationError("not a hlmkit n-gram model dump")
    if data.get("version") != MODEL_VERSION:
        raise ValidationError(f"unsupported model version {data.get('version')!r}")
    counts = {
        int(k): {tuple(h): {w: int(c) for w, c in ws} for h, ws in entries}
        for k, entries in data["counts"]
    }
    return NgramModel(
        order=int(data["order"]),
        discount=float(data["discount"]),
        vocab=data["vocab"],
        counts=counts,
    )


def save_model(model: NgramModel, path: str | Path) -> None:
    """Serialize a model to JSON. Round-trips bit-exactly (counts are ints)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path: str | Path) -> NgramModel:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid model JSON: {e.msg}", line=e.lineno) from e
    return model_from_dict(data)
