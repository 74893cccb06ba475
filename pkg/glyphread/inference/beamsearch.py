"""
Top-N beam search over any step scorer, with optional character language
model fusion and lexicon constraints.

A hypothesis score is the sum over its steps of log P(symbol) from the scorer
plus alpha * log P_lm(symbol | emitted prefix) when a language model is set.
Hypotheses ending in END are moved to a closed list; the search stops once no
open hypothesis can beat the N-th closed one.
"""

from dataclasses import dataclass, field, replace
from typing import Any, List, Optional, Protocol, Sequence, Tuple, TypeVar
import math

import numpy as np
from dataclasses_json import dataclass_json

from glyphread.alphabet import END, Alphabet
from glyphread.errors import InputError
from glyphread.inference.lexicon import LexiconTrie, TrieNode, nearest_word
from glyphread.inference.ngram import NgramModel
from glyphread.model.encoder import FeatureGrid
from glyphread.model.recognizer import Recognizer
from glyphread.model.decoder import DecoderState
from glyphread.model.tensor import Tensor

State = TypeVar("State")

LEXICON_MODES = ("prune", "edit")


class StepScorer(Protocol[State]):
    def initial_state(self) -> State:
        ...

    def step(self, state: State) -> Tuple[Tensor, State]:
        """Log-probabilities of the next symbol and the advanced state."""
        ...

    def feed(self, state: State, symbol: int) -> State:
        ...


class RecognizerScorer:
    """Steps the recognizer over one image, encoding it only once."""

    def __init__(self, model: Recognizer, image: Tensor) -> None:
        self.model = model
        self.features: FeatureGrid = model.encode(image)

    def initial_state(self) -> DecoderState:
        return self.model.initial_state(self.features)

    def step(self, state: DecoderState) -> Tuple[Tensor, DecoderState]:
        result = self.model.decode_step(self.features, state)
        return result.log_probs, result.state

    def feed(self, state: DecoderState, symbol: int) -> DecoderState:
        return self.model.feed(state, symbol)


@dataclass
class DecodeConfig:
    beam_width: int = 16
    alpha: float = 0.25
    lm: Optional[NgramModel] = None
    trie: Optional[LexiconTrie] = None
    max_length: int = 32
    lexicon_mode: str = "prune"
    lexicon_words: Optional[Sequence[str]] = None
    lm_scores_end: bool = True
    top: Optional[int] = None

    def __post_init__(self) -> None:
        if self.beam_width < 1:
            raise InputError(f"beam width must be at least 1, got {self.beam_width}")
        if self.alpha < 0:
            raise InputError(f"language model weight must be non-negative, got {self.alpha}")
        if self.max_length < 1:
            raise InputError(f"max length must be at least 1, got {self.max_length}")
        if self.lexicon_mode not in LEXICON_MODES:
            raise InputError(
                f"unknown lexicon mode '{self.lexicon_mode}', expected one of {', '.join(LEXICON_MODES)}"
            )
        if self.trie is not None and len(self.trie) == 0:
            raise InputError("lexicon is empty")
        if self.lexicon_words is not None and len(self.lexicon_words) == 0:
            raise InputError("lexicon is empty")

    @property
    def uses_lm(self) -> bool:
        return self.lm is not None and self.alpha > 0

    @property
    def pruning_trie(self) -> Optional[LexiconTrie]:
        return self.trie if self.lexicon_mode == "prune" else None

    def edit_words(self) -> Optional[List[str]]:
        if self.lexicon_mode != "edit":
            return None
        if self.lexicon_words is not None:
            return sorted(set(self.lexicon_words))
        if self.trie is not None:
            return list(self.trie.words())
        return None


@dataclass
class Hypothesis:
    symbols: Tuple[int, ...]
    score: float
    model_score: float
    lm_score: float
    state: Any
    node: Optional[TrieNode] = None
    complete: bool = False
    terms: Tuple[Tuple[float, float], ...] = ()

    def key(self) -> Tuple[float, Tuple[int, ...]]:
        return -self.score, self.symbols


@dataclass_json
@dataclass
class DecodeResult:
    word: str
    score: float
    complete: bool
    model_score: float
    lm_score: float
    raw: Optional[str] = field(default=None)


def step_score(log_prob: float, lm_log_prob: Optional[float], alpha: float) -> float:
    if lm_log_prob is None:
        return log_prob
    return log_prob + alpha * lm_log_prob


def hypothesis_extend(
    hyp: Hypothesis,
    log_probs: Tensor,
    successor: Any,
    alphabet: Alphabet,
    config: DecodeConfig,
    last_step: bool = False,
) -> List[Hypothesis]:
    """
    Children of ``hyp`` for every allowed symbol. Children carry the unfed
    ``successor`` state; the caller feeds the symbol to the ones it keeps.
    """
    if hyp.complete:
        return []
    if log_probs.shape != (len(alphabet),):
        raise InputError(f"scorer returned {log_probs.shape} log-probabilities for {len(alphabet)} symbols")

    trie = config.pruning_trie
    prefix = alphabet.decode(hyp.symbols)
    children = []
    for symbol in range(len(alphabet)):
        is_end = symbol == alphabet.end
        if last_step and not is_end:
            continue

        node = None
        if trie is not None:
            current = hyp.node if hyp.node is not None else trie.root
            if is_end:
                if not current.is_word:
                    continue
            else:
                node = trie.child(current, alphabet.symbol(symbol))
                if node is None:
                    continue

        log_prob = float(log_probs[symbol])
        lm_log_prob = None
        if config.uses_lm:
            lm_log_prob = 0.0 if is_end and not config.lm_scores_end else config.lm.logprob(
                prefix, END if is_end else alphabet.symbol(symbol)
            )
        gain = step_score(log_prob, lm_log_prob, config.alpha)
        if not math.isfinite(gain):
            continue

        children.append(Hypothesis(
            symbols=hyp.symbols + (symbol,),
            score=hyp.score + gain,
            model_score=hyp.model_score + log_prob,
            lm_score=hyp.lm_score + (lm_log_prob or 0.0),
            state=successor,
            node=node,
            complete=is_end,
            terms=hyp.terms + ((log_prob, lm_log_prob or 0.0),),
        ))
    return children


def _result(hyp: Hypothesis, alphabet: Alphabet) -> DecodeResult:
    return DecodeResult(alphabet.decode(hyp.symbols), hyp.score, hyp.complete, hyp.model_score, hyp.lm_score)


def beam_search(scorer: StepScorer, alphabet: Alphabet, config: DecodeConfig) -> List[DecodeResult]:
    """
    Ranked results, best first. When nothing reaches END within
    ``config.max_length`` steps, the best open hypotheses are returned with
    ``complete`` set to False.
    """
    width = config.beam_width
    trie = config.pruning_trie
    root = Hypothesis((), 0.0, 0.0, 0.0, scorer.initial_state(), trie.root if trie is not None else None)
    open_beam: List[Hypothesis] = [root]
    closed: List[Hypothesis] = []
    last_open = open_beam

    for t in range(config.max_length):
        candidates: List[Hypothesis] = []
        for hyp in open_beam:
            log_probs, successor = scorer.step(hyp.state)
            candidates.extend(hypothesis_extend(
                hyp, np.asarray(log_probs, dtype=np.float64), successor, alphabet, config,
                last_step=t == config.max_length - 1,
            ))

        candidates.sort(key=Hypothesis.key)
        selected = candidates[:width]
        closed = sorted(closed + [h for h in selected if h.complete], key=Hypothesis.key)[:width]
        open_beam = [
            replace(h, state=scorer.feed(h.state, h.symbols[-1])) for h in selected if not h.complete
        ]
        if open_beam:
            last_open = open_beam
        if not open_beam:
            break
        if len(closed) >= width and open_beam[0].score < closed[width - 1].score:
            break

    if closed:
        results = [_result(h, alphabet) for h in closed]
    else:
        results = [_result(h, alphabet) for h in last_open if h.symbols]

    words = config.edit_words()
    if words is not None:
        results = _snap_to_lexicon(results, words)
    if config.top is not None:
        results = results[: config.top]
    return results


def _snap_to_lexicon(results: List[DecodeResult], words: Sequence[str]) -> List[DecodeResult]:
    snapped, seen = [], set()
    for result in results:
        word = nearest_word(words, result.word)
        if word in seen:
            continue
        seen.add(word)
        snapped.append(replace(result, word=word, raw=result.word))
    return snapped


def greedy_search(scorer: StepScorer, alphabet: Alphabet, max_length: int = 32) -> DecodeResult:
    state = scorer.initial_state()
    symbols: List[int] = []
    score = 0.0
    for t in range(max_length):
        log_probs, successor = scorer.step(state)
        symbol = alphabet.end if t == max_length - 1 else int(np.argmax(log_probs))
        score += float(log_probs[symbol])
        if symbol == alphabet.end:
            return DecodeResult(alphabet.decode(symbols), score, True, score, 0.0)
        symbols.append(symbol)
        state = scorer.feed(successor, symbol)
    return DecodeResult(alphabet.decode(symbols), score, False, score, 0.0)


def beam_decode(model: Recognizer, image: Tensor, config: DecodeConfig) -> List[DecodeResult]:
    return beam_search(RecognizerScorer(model, image), model.alphabet, config)
