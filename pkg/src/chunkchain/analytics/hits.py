"""Hub/authority weighting of a topic dependency graph.

Content topics point at the prerequisite topics they depend on. Iterating
authority <- H^T h and hub <- H a with L1 normalization each round ranks
content topics as hubs and prerequisite topics as authorities; the final
scores each sum to one across all nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid topic graph input."""


class ConvergenceError(ArithmeticError):
    """Score iteration did not reach the tolerance within max_iter."""


@dataclass(frozen=True)
class TopicGraph:
    """Directed dependency edges from content topic to prerequisite topic."""

    labels: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple[str, str]], extra_labels: Iterable[str] = ()
    ) -> "TopicGraph":
        unique_edges: list[tuple[str, str]] = []
        seen: set[tuple[str, str]] = set()
        labels: dict[str, None] = {}
        for content, prerequisite in edges:
            if content == prerequisite:
                raise GraphError(f"self-loop on {content!r}")
            labels.setdefault(content)
            labels.setdefault(prerequisite)
            if (content, prerequisite) not in seen:
                seen.add((content, prerequisite))
                unique_edges.append((content, prerequisite))
        for label in extra_labels:
            labels.setdefault(label)
        return cls(tuple(labels), tuple(unique_edges))


@dataclass(frozen=True)
class TopicScore:
    label: str
    hub: float
    authority: float


def hits(graph: TopicGraph, tol: float = 1e-9, max_iter: int = 10_000) -> list[TopicScore]:
    """Hub and authority scores for every node, sorted by hub score descending.

    Starts from uniform vectors and stops once the largest per-component
    change of both vectors drops below ``tol``. Raises GraphError on an
    empty graph and ConvergenceError past ``max_iter``.
    """
    if not graph.edges:
        raise GraphError("graph has no edges")
    index = {label: i for i, label in enumerate(graph.labels)}
    n = len(graph.labels)
    adjacency = np.zeros((n, n))
    for content, prerequisite in graph.edges:
        adjacency[index[content], index[prerequisite]] = 1.0

    h = np.full(n, 1.0 / n)
    a = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        a_next = adjacency.T @ h
        a_next /= a_next.sum()
        h_next = adjacency @ a_next
        h_next /= h_next.sum()
        delta = max(np.max(np.abs(h_next - h)), np.max(np.abs(a_next - a)))
        h, a = h_next, a_next
        if delta < tol:
            break
    else:
        raise ConvergenceError(f"no convergence after {max_iter} iterations")

    scores = [
        TopicScore(label, float(h[i]), float(a[i])) for label, i in index.items()
    ]
    scores.sort(key=lambda s: (-s.hub, s.label))
    return scores


def ranked_columns(
    scores: Sequence[TopicScore],
) -> tuple[list[tuple[str, float]], list[tuple[str, float]]]:
    """The two-column ranking view: hubs and authorities, each descending."""
    hubs = sorted(((s.label, s.hub) for s in scores), key=lambda kv: (-kv[1], kv[0]))
    authorities = sorted(
        ((s.label, s.authority) for s in scores), key=lambda kv: (-kv[1], kv[0])
    )
    return hubs, authorities
