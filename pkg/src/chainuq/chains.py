"""Model-indicator chains, transition counting, and chain-file parsing.

Model labels are opaque symbols (strings or integers). Internal indices are
assigned by order of first appearance in the chain, never by the label
values, so every downstream computation is invariant under relabeling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    ChainFileError,
    EmptyChainError,
    EmptyMergeError,
    InsufficientTransitionsError,
)


@dataclass(frozen=True)
class LabeledChain:
    """One run of a discrete model-indexing variable.

    Attributes
    ----------
    labels : tuple
        Distinct model labels in order of first appearance; position is the
        internal index.
    indices : ndarray of int, shape (T,)
        The chain expressed as internal indices.
    """

    labels: tuple
    indices: np.ndarray

    def __post_init__(self):
        self.indices.flags.writeable = False

    @property
    def length(self) -> int:
        return int(self.indices.size)

    @property
    def n_models(self) -> int:
        return len(self.labels)

    @cached_property
    def label_to_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def visit_counts(self) -> np.ndarray:
        """Occupancy count of each observed model over all iterations."""
        return np.bincount(self.indices, minlength=self.n_models)


@dataclass(frozen=True)
class TransitionCounts:
    """Observed one-step transition frequencies over the models seen in a chain.

    Attributes
    ----------
    counts : ndarray of int, shape (I, I)
        counts[i, j] is the number of observed moves from model i to model j.
    labels : tuple
        Internal index -> model label.
    visits : ndarray of int, shape (I,)
        Occupancy counts over all iterations (including the final state).
    total_transitions : int
        Sum of all count entries; equals sum of (T_c - 1) over chains.
    n_chains : int
        Number of independent chains that contributed.
    """

    counts: np.ndarray
    labels: tuple
    visits: np.ndarray
    total_transitions: int
    n_chains: int = 1

    def __post_init__(self):
        self.counts.flags.writeable = False
        self.visits.flags.writeable = False

    @property
    def n_models(self) -> int:
        return len(self.labels)

    @property
    def total_iterations(self) -> int:
        return int(self.visits.sum())

    @cached_property
    def label_to_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}


def index_chain(raw) -> LabeledChain:
    """Index a raw label sequence by first appearance.

    ``["B", "A", "B"]`` maps B -> 0 and A -> 1 because B is seen first.

    Raises
    ------
    EmptyChainError
        If the sequence contains no labels.
    """
    seq = list(raw)
    if not seq:
        raise EmptyChainError("cannot index an empty chain")
    order: dict = {}
    for lab in seq:
        if lab not in order:
            order[lab] = len(order)
    indices = np.fromiter((order[lab] for lab in seq), dtype=np.intp, count=len(seq))
    return LabeledChain(labels=tuple(order), indices=indices)


def count_transitions(chain: LabeledChain) -> TransitionCounts:
    """Tally the one-step transition frequencies of a chain.

    Raises
    ------
    InsufficientTransitionsError
        If the chain holds fewer than two iterations.
    """
    if chain.length < 2:
        raise InsufficientTransitionsError(
            f"chain of length {chain.length} contains no transition"
        )
    n = chain.n_models
    flat = chain.indices[:-1] * n + chain.indices[1:]
    counts = np.bincount(flat, minlength=n * n).reshape(n, n)
    return TransitionCounts(
        counts=counts,
        labels=chain.labels,
        visits=chain.visit_counts(),
        total_transitions=chain.length - 1,
        n_chains=1,
    )


def merge_counts(parts) -> TransitionCounts:
    """Sum transition counts from independent chains over the union label set.

    Labels missing from a part contribute zero rows/columns. No transition is
    ever inserted between the end of one chain and the start of the next; the
    merged total is the plain sum of the parts' totals.

    The union is indexed by first appearance across ``parts`` in the given
    order; the label-indexed content is independent of that order.

    Raises
    ------
    EmptyMergeError
        If ``parts`` is empty.
    """
    parts = list(parts)
    if not parts:
        raise EmptyMergeError("cannot merge an empty list of count matrices")
    order: dict = {}
    for part in parts:
        for lab in part.labels:
            if lab not in order:
                order[lab] = len(order)
    labels = tuple(order)
    n = len(labels)
    counts = np.zeros((n, n), dtype=np.int64)
    visits = np.zeros(n, dtype=np.int64)
    for part in parts:
        pos = np.fromiter((order[lab] for lab in part.labels), dtype=np.intp)
        counts[np.ix_(pos, pos)] += part.counts
        visits[pos] += part.visits
    return TransitionCounts(
        counts=counts,
        labels=labels,
        visits=visits,
        total_transitions=int(sum(p.total_transitions for p in parts)),
        n_chains=int(sum(p.n_chains for p in parts)),
    )


def read_chain_file(path, fmt: str | None = None) -> list[LabeledChain]:
    """Read one or more chains from a text or CSV file.

    Plain text ("lines") holds one label per line and yields a single chain.
    CSV requires a header with a ``label`` column and may carry ``chain_id``
    (several chains per file) and ``iteration`` (validated to be consecutive
    integers within each chain; gaps are rejected rather than guessed over).

    Parameters
    ----------
    path : str or Path
    fmt : {"lines", "csv"}, optional
        Inferred from the file extension when omitted.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "lines"
    if fmt == "lines":
        return [_read_lines(path)]
    if fmt == "csv":
        return _read_csv(path)
    raise ChainFileError(f"unknown chain file format {fmt!r}")


def _read_lines(path: Path) -> LabeledChain:
    with open(path, encoding="utf-8") as fh:
        labels = [line.strip() for line in fh]
    labels = [lab for lab in labels if lab]
    if not labels:
        raise EmptyChainError(f"{path}: no labels found")
    return index_chain(labels)


def _read_csv(path: Path) -> list[LabeledChain]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "label" not in reader.fieldnames:
            raise ChainFileError(f"{path}: CSV must have a 'label' column")
        has_chain = "chain_id" in reader.fieldnames
        has_iter = "iteration" in reader.fieldnames
        sequences: dict = {}
        last_iter: dict = {}
        for lineno, row in enumerate(reader, start=2):
            label = row["label"]
            if label is None or label.strip() == "":
                raise ChainFileError(f"{path}:{lineno}: empty label")
            cid = row["chain_id"] if has_chain else ""
            if has_iter:
                try:
                    it = int(row["iteration"])
                except (TypeError, ValueError):
                    raise ChainFileError(
                        f"{path}:{lineno}: iteration is not an integer"
                    ) from None
                prev = last_iter.get(cid)
                if prev is not None and it != prev + 1:
                    raise ChainFileError(
                        f"{path}:{lineno}: iteration {it} does not follow "
                        f"{prev} consecutively in chain {cid!r}"
                    )
                last_iter[cid] = it
            sequences.setdefault(cid, []).append(label.strip())
    if not sequences:
        raise EmptyChainError(f"{path}: no rows found")
    return [index_chain(seq) for seq in sequences.values()]
