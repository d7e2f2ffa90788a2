"""Pooling several labeled source domains into one category inventory.

Every (domain, category) pair becomes its own pooled category, so the same
object class contributed by two domains yields two competing variants. The
greedy ordering then decides which domain's version of a category suits the
target best. An optional cover pass guarantees that every requested
category is represented at least once in the final selection, pulling in
the earliest variant from the ordering for anything the stopping point
left out.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .dataio import Dataset
from .evolution import EvolutionTrace, evolve
from .exceptions import (
    DimensionError,
    EmptyPoolError,
    UncoverableLabelError,
    UnknownCategoryError,
)
from .scoring import ErrorKind


@dataclass(frozen=True)
class SourcePool:
    """Pooled source domains with bookkeeping to undo the relabeling.

    ``origins[p]`` gives the (domain index, original label) pair behind
    pooled category ``p`` and ``base_names[p]`` its display name within that
    domain. A pool over a single domain keeps the domain's own labels and
    names untouched; with several domains, labels are renumbered densely
    and names qualified as ``domain/name``.
    """

    dataset: Dataset
    origins: Mapping[int, tuple[int, int]]
    base_names: Mapping[int, str]
    domain_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "origins", MappingProxyType(dict(self.origins)))
        object.__setattr__(self, "base_names", MappingProxyType(dict(self.base_names)))
        if set(self.origins) != set(self.base_names):
            raise ValueError("origins and base_names must cover the same pooled ids")

    @property
    def num_variants(self) -> int:
        return len(self.origins)

    def variants_of(self, name: str) -> tuple[int, ...]:
        """Pooled ids of every domain's variant of a category name."""
        return tuple(sorted(p for p, base in self.base_names.items() if base == name))


def pool_sources(
    sources: Sequence[Dataset], domain_names: Sequence[str] | None = None
) -> SourcePool:
    """Merge labeled domains into a single dataset with fresh dense labels.

    Pooled ids run over domains in the given order and over each domain's
    categories in ascending label order. Rows keep their within-domain
    order, so unpooling recovers the original samples exactly. A pool over
    one domain is the identity: same labels, same names.
    """
    if len(sources) == 0:
        raise EmptyPoolError("at least one source domain is required")
    if domain_names is None:
        domain_names = tuple(f"s{i}" for i in range(len(sources)))
    else:
        domain_names = tuple(domain_names)
        if len(domain_names) != len(sources):
            raise ValueError(
                f"{len(domain_names)} domain names for {len(sources)} domains"
            )
        if len(set(domain_names)) != len(domain_names):
            raise ValueError("domain names must be unique")
    dim = sources[0].dim
    single = len(sources) == 1
    origins: dict[int, tuple[int, int]] = {}
    base_names: dict[int, str] = {}
    pooled_names: dict[int, str] = {}
    blocks: list[np.ndarray] = []
    label_blocks: list[np.ndarray] = []
    for index, domain in enumerate(sources):
        if domain.labels is None:
            raise ValueError(f"source domain {index} has no labels")
        if domain.dim != dim:
            raise DimensionError(
                f"domain {index} has {domain.dim} features, expected {dim}"
            )
        relabeled = np.full(domain.n_samples, -1, dtype=np.int64)
        for original in domain.label_set():
            pooled = original if single else len(origins)
            base = domain.category_names.get(original, str(original))
            origins[pooled] = (index, original)
            base_names[pooled] = base
            pooled_names[pooled] = base if single else f"{domain_names[index]}/{base}"
            relabeled[domain.labels == original] = pooled
        blocks.append(domain.features)
        label_blocks.append(relabeled)
    pooled_dataset = Dataset(
        features=np.vstack(blocks),
        labels=np.concatenate(label_blocks),
        category_names=pooled_names,
    )
    return SourcePool(
        dataset=pooled_dataset,
        origins=origins,
        base_names=base_names,
        domain_names=domain_names,
    )


def unpool(pool: SourcePool, pooled_ids: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """Map pooled category ids back to (domain index, original label) pairs."""
    out = []
    for ident in pooled_ids:
        ident = int(ident)
        if ident not in pool.origins:
            raise UnknownCategoryError(f"pooled category {ident} does not exist")
        out.append(pool.origins[ident])
    return tuple(out)


def evolve_multi(
    pool: SourcePool,
    target: Dataset,
    kind: ErrorKind,
    d: int,
    *,
    threads: int = 1,
) -> EvolutionTrace:
    """Run the greedy ordering over the pooled categories."""
    return evolve(pool.dataset, target, kind, d, threads=threads)


def enforce_cover(
    pool: SourcePool,
    trace: EvolutionTrace,
    k: int,
    target_labels: Sequence | None = None,
) -> tuple[int, ...]:
    """Extend the k-prefix so every requested category is present.

    Categories are matched by display name, the only identifier that stays
    stable across independently labeled domains; integer entries in
    ``target_labels`` are matched against their decimal name. With
    ``target_labels`` omitted, every name in the pool must be covered.
    Missing names are filled with their earliest variant in the ordering,
    appended in ordering position order, so the result is still a
    prefix-plus-patches of the trace. Asking for a name no domain provides
    is an error.
    """
    if not 1 <= k <= trace.num_categories:
        raise IndexError(f"k={k} out of range 1..{trace.num_categories}")
    available = set(pool.base_names.values())
    if target_labels is None:
        required = available
    else:
        required = {v if isinstance(v, str) else str(int(v)) for v in target_labels}
        missing = required - available
        if missing:
            raise UncoverableLabelError(f"no source domain provides: {sorted(missing)}")
    selected = list(trace.ordering[:k])
    covered = {pool.base_names[p] for p in selected}
    for ident in trace.ordering[k:]:
        if required <= covered:
            break
        base = pool.base_names[ident]
        if base in required and base not in covered:
            selected.append(ident)
            covered.add(base)
    return tuple(selected)


def write_pooled_trace_csv(pool: SourcePool, trace: EvolutionTrace, path) -> None:
    """Trace CSV with the per-domain provenance of every pooled category.

    Columns: step, category_id, category_name, error, domain_name,
    original_label.
    """
    names = pool.dataset.category_names
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["step", "category_id", "category_name", "error", "domain_name", "original_label"]
        )
        for step, (ident, error) in enumerate(zip(trace.ordering, trace.errors), start=1):
            domain_index, original = pool.origins[ident]
            writer.writerow(
                [
                    step,
                    ident,
                    names.get(ident, str(ident)),
                    repr(error),
                    pool.domain_names[domain_index],
                    original,
                ]
            )
