"""Corpus loading, token-bag clone similarity, and method-level dedup."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .graphs import (
    Eaug,
    EaugContext,
    InvalidGraphError,
    SchemaError,
    _reject_unknown,
    apply_eaug_extensions,
    validate_graph,
)

DEFAULT_CLONE_THRESHOLD = 0.7

TokenBag = Counter


@dataclass(frozen=True)
class UsageExample:
    id: str
    project: str
    method_name: str
    source_text: str
    graph: Eaug
    context: EaugContext
    label: Optional[str] = None  # "C", "M", or None until annotated

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "project": self.project,
            "method_name": self.method_name,
            "source_text": self.source_text,
            "graph": self.graph.to_dict(),
            "context": self.context.to_dict(),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UsageExample":
        _reject_unknown(
            d,
            {"id", "project", "method_name", "source_text", "graph", "context", "label"},
            "example",
        )
        label = d.get("label")
        if label not in (None, "C", "M"):
            raise SchemaError(f"bad label {label!r}")
        return cls(
            id=str(d["id"]),
            project=str(d.get("project", "")),
            method_name=str(d.get("method_name", "")),
            source_text=str(d.get("source_text", "")),
            graph=Eaug.from_dict(d["graph"]),
            context=EaugContext.from_dict(d.get("context", {})),
            label=label,
        )


@dataclass(frozen=True)
class Corpus:
    api: str
    examples: tuple[UsageExample, ...]

    def __post_init__(self):
        ids = [ex.id for ex in self.examples]
        if len(ids) != len(set(ids)):
            raise SchemaError("duplicate example ids in corpus")

    def by_id(self, example_id: str) -> UsageExample:
        for ex in self.examples:
            if ex.id == example_id:
                return ex
        raise KeyError(example_id)

    def __len__(self) -> int:
        return len(self.examples)


_COMMENT_RE = re.compile(r"//[^\n]*|/\*.*?\*/", re.DOTALL)
_STRING_RE = re.compile(r'"(?:\\.|[^"\\])*"|\'(?:\\.|[^\'\\])*\'')
_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]")


def token_bag(source_text: str) -> TokenBag:
    """Tokenize code into a bag: identifier/number runs plus single
    punctuation characters; comments and string contents contribute nothing.
    """
    text = _COMMENT_RE.sub(" ", source_text)
    text = _STRING_RE.sub('""', text)
    return Counter(_TOKEN_RE.findall(text))


def clone_similarity(b1: TokenBag, b2: TokenBag) -> float:
    """Multiset overlap normalized by the larger bag; in [0, 1]."""
    if not b1 or not b2:
        return 0.0
    inter = sum((b1 & b2).values())
    return inter / max(sum(b1.values()), sum(b2.values()))


def deduplicate(corpus: Corpus, threshold: float = DEFAULT_CLONE_THRESHOLD) -> Corpus:
    """Greedy first-wins clone removal in input order."""
    if not (0 < threshold <= 1):
        raise ValueError("threshold must be in (0, 1]")
    kept: list[UsageExample] = []
    kept_bags: list[TokenBag] = []
    for ex in corpus.examples:
        bag = token_bag(ex.source_text)
        if any(clone_similarity(bag, kb) > threshold for kb in kept_bags):
            continue
        kept.append(ex)
        kept_bags.append(bag)
    return Corpus(api=corpus.api, examples=tuple(kept))


def load_corpus(path: str) -> Corpus:
    """Load a line-delimited corpus file, validating and extending each graph.

    An optional first line of the form {"api": "..."} names the API type.
    """
    api = "unknown"
    examples: list[UsageExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    start = 0
    if lines:
        try:
            first = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line 1: invalid record: {exc}") from exc
        if isinstance(first, dict) and set(first) == {"api"}:
            api = str(first["api"])
            start = 1
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {lineno}: invalid record: {exc}") from exc
        try:
            ex = UsageExample.from_dict(record)
        except (SchemaError, ValueError, KeyError) as exc:
            raise SchemaError(f"line {lineno}: {exc}") from exc
        violations = validate_graph(ex.graph)
        if violations:
            raise InvalidGraphError(
                [f"example {ex.id!r}: {v}" for v in violations]
            )
        extended = apply_eaug_extensions(ex.graph, ex.context)
        examples.append(replace(ex, graph=extended))
    return Corpus(api=api, examples=tuple(examples))


def save_corpus(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"api": corpus.api}, sort_keys=True) + "\n")
        for ex in corpus.examples:
            fh.write(json.dumps(ex.to_dict(), sort_keys=True) + "\n")
