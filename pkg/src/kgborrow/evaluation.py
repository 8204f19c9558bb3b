"""Link-prediction and relation-prediction evaluation.

Every test triple yields one query per missing slot; the ground truth is
ranked against all candidates with the optimistic convention (rank = 1 +
number of strictly higher scores), so exact ties never worsen the rank.
The filtered setting drops candidates that complete a triple already in
train/valid/test; the type-constraint setting keeps only entities seen in
the queried argument slot of the relation during training. The ground
truth itself always stays in the candidate set.
"""

import json
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .kg import KnowledgeGraph, MentionSplit, RelationCategory, Triple, relation_categories
from .scores import EmbeddingTable, score_all_heads, score_all_relations, score_all_tails

TASKS = ("link-head", "link-tail", "link-both", "relation")
SLICES = ("overall", "with-mention", "without-mention", "category")


@dataclass(frozen=True)
class EvalSettings:
    task: str = "link-both"
    filtered: bool = True
    type_constraint: bool = False
    slices: tuple[str, ...] = ("overall", "with-mention", "without-mention")

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        unknown = set(self.slices) - set(SLICES)
        if unknown:
            raise ValueError(f"unknown slices {sorted(unknown)}")


def prior_work_compat() -> EvalSettings:
    """Tail prediction without the type constraint, for comparability with
    systems evaluated that way."""
    return EvalSettings(task="link-tail", filtered=True, type_constraint=False)


@dataclass
class MetricBundle:
    mrr: float
    mr: float
    hits1: float
    hits3: float
    hits10: float
    count: int

    def as_dict(self) -> dict:
        return {
            "mrr": self.mrr, "mr": self.mr, "hits1": self.hits1,
            "hits3": self.hits3, "hits10": self.hits10, "count": self.count,
        }


def aggregate(ranks) -> MetricBundle:
    """MRR / MR / Hits@{1,3,10} of a nonempty list of ranks (all >= 1)."""
    ranks = np.asarray(list(ranks), dtype=np.float64)
    if ranks.size == 0:
        raise ValueError("cannot aggregate an empty rank list")
    if np.any(ranks < 1):
        raise ValueError("ranks must be >= 1")
    return MetricBundle(
        mrr=float(np.mean(1.0 / ranks)),
        mr=float(np.mean(ranks)),
        hits1=float(np.mean(ranks <= 1)),
        hits3=float(np.mean(ranks <= 3)),
        hits10=float(np.mean(ranks <= 10)),
        count=int(ranks.size),
    )


class RankingContext:
    """Filter and type-constraint lookups precomputed from a graph."""

    def __init__(self, kg: KnowledgeGraph):
        self.kg = kg
        self.known_tails: dict[tuple[int, int], set[int]] = defaultdict(set)
        self.known_heads: dict[tuple[int, int], set[int]] = defaultdict(set)
        self.known_relations: dict[tuple[int, int], set[int]] = defaultdict(set)
        for split in (kg.train, kg.valid, kg.test):
            for h, r, t in split:
                self.known_tails[(h, r)].add(t)
                self.known_heads[(r, t)].add(h)
                self.known_relations[(h, t)].add(r)
        heads_of: dict[int, set[int]] = defaultdict(set)
        tails_of: dict[int, set[int]] = defaultdict(set)
        for h, r, t in kg.train:
            heads_of[r].add(h)
            tails_of[r].add(t)
        self.train_heads_of = {r: np.fromiter(sorted(v), dtype=np.int64) for r, v in heads_of.items()}
        self.train_tails_of = {r: np.fromiter(sorted(v), dtype=np.int64) for r, v in tails_of.items()}


def rank_candidates(
    table: EmbeddingTable,
    triple: Triple,
    missing_slot: str,
    settings: EvalSettings,
    kg_or_context: "KnowledgeGraph | RankingContext",
) -> int:
    """Optimistic rank of the ground truth for a one-missing-slot query.

    ``triple`` is the complete test triple and ``missing_slot`` names the
    slot being predicted; the triple's value in that slot is the ground
    truth, ranked against all entities (or all KG relations for the
    relation slot) after the settings' candidate narrowing. The truth is
    force-included even when the type constraint would drop it. Passing a
    prebuilt :class:`RankingContext` avoids rebuilding the filter indexes
    per query.
    """
    ctx = kg_or_context if isinstance(kg_or_context, RankingContext) else RankingContext(kg_or_context)
    h, r, t = triple
    if missing_slot == "tail":
        return _rank_missing_tail(table, h, r, t, settings, ctx)
    if missing_slot == "head":
        return _rank_missing_head(table, r, t, h, settings, ctx)
    if missing_slot == "relation":
        return _rank_missing_relation(table, h, t, r, settings, ctx)
    raise ValueError(f"unknown slot {missing_slot!r}; expected head, relation or tail")


def _optimistic_rank(scores: np.ndarray, keep: np.ndarray, truth: int) -> int:
    truth_score = scores[truth]
    keep = keep.copy()
    keep[truth] = True
    return 1 + int(np.count_nonzero(scores[keep] > truth_score))


def _rank_missing_tail(table, h: int, r: int, truth: int, settings, ctx) -> int:
    scores = score_all_tails(table, h, r)
    keep = _candidate_mask(ctx, settings, table.num_entities,
                           constrained=ctx.train_tails_of.get(r),
                           known=ctx.known_tails.get((h, r)), truth=truth)
    return _optimistic_rank(scores, keep, truth)


def _rank_missing_head(table, r: int, t: int, truth: int, settings, ctx) -> int:
    scores = score_all_heads(table, r, t)
    keep = _candidate_mask(ctx, settings, table.num_entities,
                           constrained=ctx.train_heads_of.get(r),
                           known=ctx.known_heads.get((r, t)), truth=truth)
    return _optimistic_rank(scores, keep, truth)


def _rank_missing_relation(table, h: int, t: int, truth: int, settings, ctx) -> int:
    num_kg = ctx.kg.num_kg_relations
    scores = np.full(table.num_relations, -np.inf)
    scores[:num_kg] = score_all_relations(table, h, t, np.arange(num_kg))
    keep = np.zeros(table.num_relations, dtype=bool)
    keep[:num_kg] = True
    if settings.filtered:
        for other in ctx.known_relations.get((h, t), ()):
            if other != truth:
                keep[other] = False
    keep[truth] = True
    return _optimistic_rank(scores, keep, truth)


def _candidate_mask(ctx, settings, size, constrained, known, truth) -> np.ndarray:
    if settings.type_constraint:
        keep = np.zeros(size, dtype=bool)
        if constrained is not None:
            keep[constrained] = True
    else:
        keep = np.ones(size, dtype=bool)
    if settings.filtered and known:
        for other in known:
            if other != truth:
                keep[other] = False
    keep[truth] = True
    return keep


@dataclass
class EvalReport:
    """Per-slice metric bundles plus bookkeeping notes."""

    settings: EvalSettings
    slices: dict[str, MetricBundle]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "settings": {
                "task": self.settings.task,
                "filtered": self.settings.filtered,
                "type_constraint": self.settings.type_constraint,
                "slices": list(self.settings.slices),
            },
            "slices": {name: bundle.as_dict() for name, bundle in self.slices.items()},
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_markdown(self) -> str:
        header = ["slice", "MRR", "MR", "H@10", "H@3", "H@1", "queries"]
        rows = [header, ["---"] * len(header)]
        for name, b in self.slices.items():
            rows.append([
                name, f"{b.mrr:.3f}", f"{b.mr:.1f}", f"{b.hits10:.3f}",
                f"{b.hits3:.3f}", f"{b.hits1:.3f}", str(b.count),
            ])
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        lines = []
        for row in rows:
            cells = [cell.ljust(width) for cell, width in zip(row, widths)]
            lines.append("| " + " | ".join(cells) + " |")
        for note in self.notes:
            lines.append("")
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"


def _query_ranks(table, triple: Triple, settings, ctx) -> list[int]:
    h, r, t = triple
    ranks = []
    if settings.task in ("link-tail", "link-both"):
        ranks.append(_rank_missing_tail(table, h, r, t, settings, ctx))
    if settings.task in ("link-head", "link-both"):
        ranks.append(_rank_missing_head(table, r, t, h, settings, ctx))
    if settings.task == "relation":
        ranks.append(_rank_missing_relation(table, h, t, r, settings, ctx))
    return ranks


def evaluate(
    table: EmbeddingTable,
    kg: KnowledgeGraph,
    split: MentionSplit | None,
    settings: EvalSettings,
) -> EvalReport:
    """Rank every test triple's queries and aggregate the requested slices.

    Link prediction micro-averages head- and tail-side queries; the
    overall numbers therefore equal the query-count-weighted mean of the
    mention slices. Empty slices are omitted with a note.
    """
    if not kg.test:
        raise ValueError("the graph has no test triples")
    ctx = RankingContext(kg)
    per_triple: list[list[int]] = [_query_ranks(table, triple, settings, ctx) for triple in kg.test]

    notes: list[str] = []
    slices: dict[str, MetricBundle] = {}

    def add_slice(name: str, indices) -> None:
        ranks = [rank for i in indices for rank in per_triple[i]]
        if not ranks:
            notes.append(f"slice {name!r} is empty and was omitted")
            return
        slices[name] = aggregate(ranks)

    all_indices = range(len(kg.test))
    if "overall" in settings.slices:
        add_slice("overall", all_indices)
    if split is not None and ("with-mention" in settings.slices or "without-mention" in settings.slices):
        with_set = set(split.with_mention)
        if "with-mention" in settings.slices:
            add_slice("with-mention", [i for i in all_indices if kg.test[i] in with_set])
        if "without-mention" in settings.slices:
            add_slice("without-mention", [i for i in all_indices if kg.test[i] not in with_set])
    if "category" in settings.slices:
        categories = relation_categories(kg)
        for category in RelationCategory:
            indices = [
                i for i in all_indices
                if categories.get(kg.test[i].relation) == category
            ]
            add_slice(f"category:{category.value}", indices)
    return EvalReport(settings, slices, notes)
