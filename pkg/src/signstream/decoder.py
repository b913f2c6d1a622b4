"""Streaming post-processor: confidence gating, CTC-style greedy collapse,
and single-pass collocation merging.

Sign id 0 doubles as the blank: a window whose top probability falls below
the confidence threshold observes blank, as does an explicit class 0
prediction when the model was trained with one. A class must persist for
min_run consecutive windows to emit, and a class equal to the last emitted
token stays silent until a blank or another emission intervenes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class DecoderConfig:
    confidence_threshold: float = 0.5
    # About 0.6 s of agreement at the 5 fps target rate.
    min_run: int = 3
    blank_id: int = 0

    def __post_init__(self):
        if not 0.0 < self.confidence_threshold < 1.0:
            raise ValueError(
                f"confidence_threshold must be in (0, 1), got {self.confidence_threshold}"
            )
        if not isinstance(self.min_run, int) or self.min_run < 1:
            raise ValueError(f"min_run must be an integer >= 1, got {self.min_run!r}")
        if self.blank_id < 0:
            raise ValueError(f"blank_id must be a valid class id, got {self.blank_id}")

    def to_dict(self) -> dict:
        return {
            "confidence_threshold": self.confidence_threshold,
            "min_run": self.min_run,
            "blank_id": self.blank_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecoderConfig":
        known = {"confidence_threshold", "min_run", "blank_id"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown DecoderConfig keys: {sorted(unknown)}")
        kwargs = dict(data)
        for key in ("min_run", "blank_id"):
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class DecoderState:
    """Progress of one stream; a fresh default instance starts a stream."""

    candidate: int | None = None
    run_length: int = 0
    last_emitted: int | None = None
    emitted: tuple[int, ...] = ()


def step(
    state: DecoderState, probs: np.ndarray, cfg: DecoderConfig, class_ids=None
) -> tuple[DecoderState, int | None]:
    """Advance one window; returns (new state, emitted sign id or None).

    class_ids maps model output index to sign id; None means indices are
    already sign ids.
    """
    probs = np.asarray(probs)
    if probs.ndim != 1 or probs.shape[0] == 0:
        raise ValueError("probs must be a non-empty 1-D distribution")
    idx = int(np.argmax(probs))
    if float(probs[idx]) < cfg.confidence_threshold:
        observed = cfg.blank_id
    else:
        observed = int(class_ids[idx]) if class_ids is not None else idx

    if observed == cfg.blank_id:
        # Blank ends any run and clears the repeat guard.
        return replace(state, candidate=None, run_length=0, last_emitted=None), None

    run = state.run_length + 1 if observed == state.candidate else 1
    if run == cfg.min_run and observed != state.last_emitted:
        return (
            DecoderState(
                candidate=observed,
                run_length=run,
                last_emitted=observed,
                emitted=state.emitted + (observed,),
            ),
            observed,
        )
    return replace(state, candidate=observed, run_length=run), None


def collapse(sequence, blank_id: int = 0) -> list[int]:
    """Offline CTC greedy rule: drop consecutive duplicates, then blanks."""
    out = []
    prev = None
    for s in sequence:
        if s != prev:
            out.append(s)
        prev = s
    return [s for s in out if s != blank_id]


class CollocationLexicon:
    """Sign-id sequences that merge into a single compound id."""

    def __init__(self, entries: dict | None = None):
        self._entries: dict[tuple[int, ...], int] = {}
        self.max_len = 0
        for key, merged in (entries or {}).items():
            self.add(key, merged)

    def add(self, key, merged: int) -> None:
        key = tuple(int(t) for t in key)
        if len(key) < 2:
            raise ValueError(f"collocation keys need at least 2 sign ids, got {key}")
        merged = int(merged)
        if merged < 0 or any(t < 0 for t in key):
            raise ValueError("sign ids must be non-negative")
        if all(t == merged for t in key):
            raise ValueError(f"collocation {key} -> {merged} merges to itself")
        self._entries[key] = merged
        self.max_len = max(self.max_len, len(key))

    def __contains__(self, key) -> bool:
        return tuple(key) in self._entries

    def __getitem__(self, key) -> int:
        return self._entries[tuple(key)]

    def __len__(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    @classmethod
    def from_json(cls, text: str) -> "CollocationLexicon":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("lexicon JSON must be an array of entries")
        lex = cls()
        for entry in data:
            if not isinstance(entry, dict) or set(entry) != {"sequence", "merged"}:
                raise ValueError(
                    f"lexicon entries need exactly 'sequence' and 'merged', got {entry!r}"
                )
            lex.add(entry["sequence"], entry["merged"])
        return lex

    @classmethod
    def load(cls, path) -> "CollocationLexicon":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_json(self) -> str:
        entries = [
            {"sequence": list(key), "merged": merged} for key, merged in self._entries.items()
        ]
        return json.dumps(entries, indent=2)


def ngram_merge(tokens, lexicon: CollocationLexicon | None) -> list[int]:
    """Left-to-right greedy longest-match merge, single pass.

    The merged output is not re-matched, so every lexicon terminates.
    """
    tokens = list(tokens)
    if lexicon is None or len(lexicon) == 0:
        return tokens
    out = []
    i = 0
    n = len(tokens)
    while i < n:
        matched = None
        for length in range(min(lexicon.max_len, n - i), 1, -1):
            key = tuple(tokens[i : i + length])
            if key in lexicon:
                matched = key
                break
        if matched is not None:
            out.append(lexicon[matched])
            i += len(matched)
        else:
            out.append(tokens[i])
            i += 1
    return out


def flush(
    state: DecoderState, lexicon: CollocationLexicon | None = None
) -> tuple[DecoderState, list[int]]:
    """End of stream: return (fresh state, merged final tokens).

    Runs that reached min_run already emitted at that moment, so pending
    sub-threshold candidates are simply discarded.
    """
    return DecoderState(), ngram_merge(state.emitted, lexicon)


class StreamDecoder:
    """Stateful convenience wrapper around step/flush for one stream."""

    def __init__(
        self,
        cfg: DecoderConfig | None = None,
        lexicon: CollocationLexicon | None = None,
        class_ids=None,
    ):
        self.cfg = cfg if cfg is not None else DecoderConfig()
        self.lexicon = lexicon
        self.class_ids = class_ids
        self.state = DecoderState()

    def push(self, probs) -> int | None:
        self.state, emitted = step(self.state, probs, self.cfg, self.class_ids)
        return emitted

    def flush(self) -> list[int]:
        self.state, tokens = flush(self.state, self.lexicon)
        return tokens

    @property
    def emitted(self) -> tuple[int, ...]:
        return self.state.emitted
