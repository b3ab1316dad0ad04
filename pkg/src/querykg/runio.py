"""Read and write ranked runs in the 6-column TREC format.

Input ranks are advisory: entries are re-sorted by (score desc, item_id asc)
and ranks rewritten 1..n, so runs from external tools with inconsistent rank
conventions still load. Scores serialize with 6 decimal places so written
files are byte-stable.
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping

from .model import RunList


class RunFormatError(Exception):
    pass


class RunSet:
    """All topics' RunLists for one system; members share kind and tag."""

    __slots__ = ("runs", "tag", "kind")

    def __init__(self, runs: Mapping[str, RunList], tag: str = "", kind: str = "document"):
        for topic_id, run in runs.items():
            if run.topic_id != topic_id:
                raise ValueError(f"run keyed {topic_id!r} has topic_id {run.topic_id!r}")
            if run.kind != kind:
                raise ValueError(f"run for {topic_id!r} has kind {run.kind!r}, expected {kind!r}")
        self.runs = dict(runs)
        self.tag = tag
        self.kind = kind

    def topics(self) -> list[str]:
        return sorted(self.runs)

    def __getitem__(self, topic_id: str) -> RunList:
        return self.runs[topic_id]

    def __contains__(self, topic_id: str) -> bool:
        return topic_id in self.runs

    def __len__(self) -> int:
        return len(self.runs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RunSet)
            and self.tag == other.tag
            and self.kind == other.kind
            and self.runs == other.runs
        )


def read_run(path: str | Path, kind: str = "document") -> RunSet:
    """Parse lines ``topic_id Q0 item_id rank score tag`` into a RunSet."""
    per_topic: dict[str, dict[str, float]] = {}
    tag = ""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cols = line.split()
            if len(cols) != 6:
                raise RunFormatError(
                    f"{path}: line {lineno}: expected 6 columns, got {len(cols)}"
                )
            topic_id, _, item_id, rank_s, score_s, tag = cols
            try:
                int(rank_s)
                score = float(score_s)
            except ValueError as e:
                raise RunFormatError(f"{path}: line {lineno}: non-numeric rank/score") from e
            topic = per_topic.setdefault(topic_id, {})
            if item_id in topic:
                raise RunFormatError(
                    f"{path}: line {lineno}: duplicate item {item_id!r} for topic {topic_id!r}"
                )
            topic[item_id] = score
    runs = {
        topic_id: RunList.from_scores(topic_id, kind, scores.items(), tag=tag)
        for topic_id, scores in per_topic.items()
    }
    return RunSet(runs, tag=tag, kind=kind)


def write_run(runset: RunSet, path: str | Path, tag: str | None = None):
    """Emit 6-column TREC lines, topics in ascending id order, ranks 1-based."""
    out_tag = runset.tag if tag is None else tag
    with open(path, "w", encoding="utf-8") as fh:
        for topic_id in sorted(runset.runs):
            for item_id, rank, score in runset.runs[topic_id].items:
                fh.write(f"{topic_id} Q0 {item_id} {rank} {score:.6f} {out_tag}\n")
