"""Corpus ingestion: vocabulary, windowed co-occurrence counting, PPMI
weighting, dataset selection, and noun/compound distributional vectors.

Corpus format: UTF-8 text, one sentence per line, tokens separated by
spaces, optionally tagged as ``word|POS``.  A corpus counts as tagged if
any token carries a tag; content words are those whose tag starts with
N, V, J or R.  For untagged corpora, content means "not in the stopword
list".  Argument pairs arrive from a tab-separated
``head<TAB>argument<TAB>count`` file (dependency analysis is upstream of
this package); lines starting with '#' are comments.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .matrix_core import read_manifest, read_vector, slug, write_vector


class CorpusError(ValueError):
    pass


CONTENT_TAG_PREFIXES = ("N", "V", "J", "R")

DEFAULT_WINDOW = 5


@dataclass(frozen=True, eq=False)
class TokenizedCorpus:
    """Sentences of (surface, tag) tokens with an exact total token count."""

    sentences: tuple
    n_total: int
    tagged: bool

    @classmethod
    def from_sentences(cls, sentences) -> "TokenizedCorpus":
        sents = tuple(tuple(s) for s in sentences if s)
        n = sum(len(s) for s in sents)
        tagged = any(tok[1] is not None for s in sents for tok in s)
        return cls(sentences=sents, n_total=n, tagged=tagged)


def _parse_token(raw: str):
    if "|" in raw:
        word, _, tag = raw.rpartition("|")
        if word:
            return (word, tag or None)
    return (raw, None)


def read_corpus(path) -> TokenizedCorpus:
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            toks = line.split()
            if toks:
                sentences.append([_parse_token(t) for t in toks])
    if not sentences:
        raise CorpusError(f"{path}: corpus is empty")
    return TokenizedCorpus.from_sentences(sentences)


def build_vocab(corpus: TokenizedCorpus) -> dict[str, int]:
    """Exact surface-form frequencies; sums to the total token count."""
    if corpus.n_total == 0:
        raise CorpusError("cannot build a vocabulary from an empty corpus")
    vocab: dict[str, int] = {}
    for sent in corpus.sentences:
        for word, _tag in sent:
            vocab[word] = vocab.get(word, 0) + 1
    return vocab


def _content_words(corpus: TokenizedCorpus, stopwords) -> set[str]:
    if corpus.tagged:
        out = set()
        for sent in corpus.sentences:
            for word, tag in sent:
                if tag is not None and tag[:1].upper() in CONTENT_TAG_PREFIXES:
                    out.add(word)
        return out
    return {w for sent in corpus.sentences for w, _ in sent if w not in stopwords}


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """The ordered context words; index i everywhere refers to words[i]."""

    words: tuple[str, ...]

    def __post_init__(self):
        words = tuple(self.words)
        if len(set(words)) != len(words):
            raise ValueError("basis words must be distinct")
        if not words:
            raise ValueError("basis must be nonempty")
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(words)})

    @property
    def size(self) -> int:
        return len(self.words)

    def index(self, word: str) -> int:
        return self._index[word]

    def head(self, size: int) -> "BasisSpec":
        """The first `size` words; valid because the order is by frequency."""
        if size > self.size:
            raise ValueError(f"cannot take {size} words from a basis of {self.size}")
        return BasisSpec(self.words[:size])


def select_basis(vocab: dict[str, int], corpus: TokenizedCorpus, size: int,
                 stopwords=frozenset()) -> BasisSpec:
    """Top-`size` content words by frequency, ties broken lexicographically."""
    content = _content_words(corpus, stopwords)
    if len(content) < size:
        raise CorpusError(
            f"need {size} content words for the basis but only {len(content)} are available"
        )
    ranked = sorted(content, key=lambda w: (-vocab[w], w))
    return BasisSpec(tuple(ranked[:size]))


def write_basis(basis: BasisSpec, path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(header if header.endswith("\n") else header + "\n")
        for w in basis.words:
            fh.write(w + "\n")


def read_basis(path) -> BasisSpec:
    with open(path, encoding="utf-8") as fh:
        words = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    return BasisSpec(tuple(words))


@dataclass(frozen=True, eq=False)
class CoocTable:
    """Sparse windowed co-occurrence counts plus the unigram totals.

    counts[target][context] holds the number of position pairs at distance
    <= window inside one sentence; rows exist for the requested targets,
    columns for the requested contexts.
    """

    counts: dict[str, dict[str, int]]
    totals: dict[str, int]
    n_total: int
    window: int

    def count(self, target: str, context: str) -> int:
        return self.counts.get(target, {}).get(context, 0)


def _encode_corpus(corpus, target_index, context_index):
    n = corpus.n_total
    tid = np.full(n, -1, dtype=np.int64)
    cid = np.full(n, -1, dtype=np.int64)
    offsets = np.zeros(len(corpus.sentences) + 1, dtype=np.int64)
    pos = 0
    for k, sent in enumerate(corpus.sentences):
        for word, _tag in sent:
            t = target_index.get(word)
            if t is not None:
                tid[pos] = t
            c = context_index.get(word)
            if c is not None:
                cid[pos] = c
            pos += 1
        offsets[k + 1] = pos
    return tid, cid, offsets


def count_cooccurrence(corpus: TokenizedCorpus, targets, basis: BasisSpec,
                       window: int = DEFAULT_WINDOW) -> CoocTable:
    """Windowed target-context pair counts, not crossing sentence
    boundaries; a position never pairs with itself."""
    if window < 1:
        raise ValueError("window must be >= 1")
    targets = tuple(dict.fromkeys(targets))  # dedupe, keep order
    t_index = {w: i for i, w in enumerate(targets)}
    c_index = {w: i for i, w in enumerate(basis.words)}
    tid, cid, offsets = _encode_corpus(corpus, t_index, c_index)
    dense = _kernels.window_pair_counts(tid, cid, offsets, window,
                                        len(targets), basis.size)
    counts: dict[str, dict[str, int]] = {}
    for t, word in enumerate(targets):
        row = dense[t]
        nz = np.nonzero(row)[0]
        counts[word] = {basis.words[c]: int(row[c]) for c in nz}
    totals = build_vocab(corpus)
    return CoocTable(counts=counts, totals=totals, n_total=corpus.n_total,
                     window=window)


def ppmi(table: CoocTable, target: str, context: str) -> float:
    """Positive pointwise mutual information, natural log, clamped at 0."""
    ct = table.totals.get(target, 0)
    cc = table.totals.get(context, 0)
    if ct <= 0:
        raise CorpusError(f"target word {target!r} does not occur in the corpus")
    if cc <= 0:
        raise CorpusError(f"context word {context!r} does not occur in the corpus")
    joint = table.count(target, context)
    if joint == 0:
        return 0.0
    val = np.log(joint * table.n_total / (ct * cc))
    return float(max(0.0, val))


@dataclass(frozen=True, eq=False)
class DistVector:
    """PPMI-weighted distributional vector over a fixed basis."""

    word: str
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("vector must be one-dimensional")
        if not np.isfinite(v).all() or (v < 0).any():
            raise ValueError(f"vector for {self.word!r} must be finite and non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.size


def _ppmi_row(joint_row, target_total, table, basis) -> np.ndarray:
    out = np.zeros(basis.size)
    n = table.n_total
    for i, c in enumerate(basis.words):
        joint = joint_row.get(c, 0)
        if joint > 0:
            cc = table.totals.get(c, 0)
            if cc <= 0:
                raise CorpusError(f"context word {c!r} does not occur in the corpus")
            out[i] = max(0.0, np.log(joint * n / (target_total * cc)))
    return out


def build_noun_vectors(table: CoocTable, basis: BasisSpec, nouns) -> list[DistVector]:
    """PPMI vectors over the basis for each noun, in the given order."""
    out = []
    for noun in nouns:
        total = table.totals.get(noun, 0)
        if total <= 0:
            raise CorpusError(f"noun {noun!r} does not occur in the corpus")
        if noun not in table.counts:
            raise CorpusError(f"noun {noun!r} was not counted as a target")
        out.append(DistVector(noun, _ppmi_row(table.counts[noun], total, table, basis)))
    return out


def _reach_of(pos_class: str, window: int) -> int:
    if pos_class not in ("adjective", "verb", "unknown"):
        raise ValueError(f"unknown part-of-speech class {pos_class!r}")
    return 1 if pos_class in ("adjective", "unknown") else window


def _spans_by_noun(corpus, target, nouns, reach):
    """One corpus pass: per noun, the (sentence, start, end) compound spans.

    For each target occurrence, each distinct noun takes its nearest
    occurrence within reach to the right as the compound span.
    """
    noun_set = set(nouns)
    spans: dict[str, list] = {n: [] for n in noun_set}
    for k, sent in enumerate(corpus.sentences):
        for i, (word, _tag) in enumerate(sent):
            if word != target:
                continue
            seen = set()
            for q in range(1, reach + 1):
                if i + q >= len(sent):
                    break
                w2 = sent[i + q][0]
                if w2 in noun_set and w2 not in seen:
                    spans[w2].append((k, i, i + q))
                    seen.add(w2)
    return spans


def compound_spans(corpus: TokenizedCorpus, target: str, noun: str,
                   pos_class: str = "adjective",
                   window: int = DEFAULT_WINDOW) -> list[tuple[int, int, int]]:
    """Corpus positions of the compound, as (sentence, start, end) spans.

    Adjective compounds are the positions where the target immediately
    precedes the noun; verb compounds allow the noun anywhere within
    `window` tokens to the right of the verb.  The span covers every
    token from target to noun inclusive.
    """
    reach = _reach_of(pos_class, window)
    return _spans_by_noun(corpus, target, [noun], reach)[noun]


def build_compound_vectors(corpus: TokenizedCorpus, table: CoocTable,
                           basis: BasisSpec, target: str, nouns,
                           pos_class: str = "adjective",
                           window: int | None = None
                           ) -> tuple[list[DistVector], list[str]]:
    """PPMI vectors for target-noun compounds, treating each compound
    occurrence as one token spanning its positions.

    Context is every token within `window` of the span on either side,
    excluding the span itself.  Nouns whose compound never occurs are
    skipped and returned in the second list.
    """
    if window is None:
        window = table.window
    c_index = {w: i for i, w in enumerate(basis.words)}
    reach = _reach_of(pos_class, window)
    all_spans = _spans_by_noun(corpus, target, nouns, reach)
    vectors = []
    skipped = []
    for noun in nouns:
        spans = all_spans[noun]
        if not spans:
            skipped.append(noun)
            continue
        joint = np.zeros(basis.size, dtype=np.int64)
        for k, start, end in spans:
            sent = corpus.sentences[k]
            lo = max(0, start - window)
            hi = min(len(sent) - 1, end + window)
            for p in range(lo, hi + 1):
                if start <= p <= end:
                    continue
                c = c_index.get(sent[p][0])
                if c is not None:
                    joint[c] += 1
        total = len(spans)
        values = np.zeros(basis.size)
        for i in np.nonzero(joint)[0]:
            cc = table.totals.get(basis.words[i], 0)
            if cc <= 0:
                raise CorpusError(f"context word {basis.words[i]!r} missing from totals")
            values[i] = max(0.0, np.log(joint[i] * table.n_total / (total * cc)))
        vectors.append(DistVector(f"{target} {noun}", values))
    return vectors, skipped


# ---------------------------------------------------------------------------
# dataset selection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Thresholds:
    """Selection thresholds; defaults are the full-scale study's values."""

    min_target_freq: int = 1000
    drop_top: int = 100
    min_pair_count: int = 100
    min_args: int = 100

    def to_json_dict(self) -> dict:
        return {"min_target_freq": self.min_target_freq, "drop_top": self.drop_top,
                "min_pair_count": self.min_pair_count, "min_args": self.min_args}

    @classmethod
    def from_json_dict(cls, obj) -> "Thresholds":
        clean = {k: int(v) for k, v in obj.items()}
        return cls(**clean)


@dataclass(frozen=True)
class SelectionEntry:
    word: str
    pos_class: str           # adjective | verb | unknown
    freq: int
    args: tuple[tuple[str, int], ...]  # (noun, pair count), count order then lex


@dataclass(frozen=True, eq=False)
class DatasetSelection:
    entries: tuple[SelectionEntry, ...]

    def words(self) -> list[str]:
        return [e.word for e in self.entries]

    def entry(self, word: str) -> SelectionEntry:
        for e in self.entries:
            if e.word == word:
                return e
        raise KeyError(word)

    def to_json_dict(self) -> dict:
        return {"targets": [
            {"word": e.word, "pos_class": e.pos_class, "freq": e.freq,
             "args": [[n, c] for n, c in e.args]}
            for e in self.entries
        ]}

    @classmethod
    def from_json_dict(cls, obj) -> "DatasetSelection":
        entries = tuple(
            SelectionEntry(word=t["word"], pos_class=t["pos_class"],
                           freq=int(t["freq"]),
                           args=tuple((n, int(c)) for n, c in t["args"]))
            for t in obj["targets"]
        )
        return cls(entries=entries)


def read_pairs(path) -> dict[str, dict[str, int]]:
    """head<TAB>argument<TAB>count, aggregated per (head, argument)."""
    pairs: dict[str, dict[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise CorpusError(f"{path}:{lineno}: expected head<TAB>argument<TAB>count")
            head, arg, raw = fields
            try:
                count = int(raw)
            except ValueError:
                raise CorpusError(f"{path}:{lineno}: count {raw!r} is not an integer") from None
            if count < 0:
                raise CorpusError(f"{path}:{lineno}: negative count")
            pairs.setdefault(head, {})
            pairs[head][arg] = pairs[head].get(arg, 0) + count
    if not pairs:
        raise CorpusError(f"{path}: no argument pairs found")
    return pairs


def write_pairs(pairs: dict[str, dict[str, int]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for head in sorted(pairs):
            for arg in sorted(pairs[head]):
                fh.write(f"{head}\t{arg}\t{pairs[head][arg]}\n")


def pos_class_of(word: str, corpus: TokenizedCorpus) -> str:
    if not corpus.tagged:
        return "unknown"
    votes: dict[str, int] = {}
    for sent in corpus.sentences:
        for w, tag in sent:
            if w == word and tag:
                votes[tag[:1].upper()] = votes.get(tag[:1].upper(), 0) + 1
    if not votes:
        return "unknown"
    top = max(sorted(votes), key=lambda k: votes[k])
    return {"J": "adjective", "V": "verb"}.get(top, "unknown")


def select_dataset(corpus: TokenizedCorpus, pairs: dict[str, dict[str, int]],
                   thresholds: Thresholds = Thresholds()) -> DatasetSelection:
    """Targets passing all thresholds, with their surviving argument lists.

    Candidates are the pair-file heads with corpus frequency at least
    min_target_freq; after sorting by frequency (ties lexicographic) the
    drop_top most frequent are discarded as uninformative.  Arguments
    below min_pair_count are dropped, then targets keeping fewer than
    min_args arguments are dropped.  Raising any threshold never adds a
    target.
    """
    vocab = build_vocab(corpus)
    candidates = [h for h in pairs if vocab.get(h, 0) >= thresholds.min_target_freq]
    candidates.sort(key=lambda w: (-vocab.get(w, 0), w))
    candidates = candidates[thresholds.drop_top:]
    entries = []
    for head in candidates:
        args = [(noun, cnt) for noun, cnt in pairs[head].items()
                if cnt >= thresholds.min_pair_count]
        if len(args) < max(thresholds.min_args, 1):
            continue
        args.sort(key=lambda nc: (-nc[1], nc[0]))
        entries.append(SelectionEntry(word=head, pos_class=pos_class_of(head, corpus),
                                      freq=vocab.get(head, 0), args=tuple(args)))
    entries.sort(key=lambda e: e.word)
    return DatasetSelection(entries=tuple(entries))


# ---------------------------------------------------------------------------
# vector directory: one file per vector, in the single-row text format,
# with an ordered manifest (same layout as ensemble directories)
# ---------------------------------------------------------------------------

def write_vectors_dir(vectors, dirpath) -> list[str]:
    os.makedirs(dirpath, exist_ok=True)
    names = []
    seen = set()
    for v in vectors:
        base = slug(v.word)
        name = f"{base}.txt"
        k = 1
        while name in seen:
            name = f"{base}.{k}.txt"
            k += 1
        seen.add(name)
        write_vector(v.word, v.values, os.path.join(dirpath, name))
        names.append(name)
    with open(os.path.join(dirpath, "manifest.txt"), "w", encoding="utf-8") as fh:
        for name in names:
            fh.write(name + "\n")
    return names


def read_vectors_dir(dirpath) -> dict[str, DistVector]:
    out: dict[str, DistVector] = {}
    for name in read_manifest(dirpath):
        label, values = read_vector(os.path.join(dirpath, name))
        out[label] = DistVector(label, values)
    return out
