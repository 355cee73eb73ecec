"""Labeled domain corpora: CSV ingestion, dedup, stratified splitting."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Iterator, Mapping

from .errors import DataError

# Textual class names used by the public Alexa+Cryptolocker corpus, plus the
# numeric encodings so pre-encoded files load without a custom map.
DEFAULT_LABEL_MAP: Mapping[str, int] = {"legit": 0, "dga": 1, "0": 0, "1": 1}


@dataclass(frozen=True)
class DomainRecord:
    """One labeled domain. ``label`` is 1 for DGA/malicious, 0 for legit."""

    domain: str
    label: int
    host: str | None = None


@dataclass(frozen=True)
class DomainCorpus:
    """An ordered, immutable collection of labeled domains.

    ``skipped_rows`` counts rows dropped during a lenient load and
    ``label_conflicts`` counts duplicates dropped with a disagreeing label;
    both are 0 for corpora that were not produced by those operations.
    """

    records: tuple[DomainRecord, ...]
    provenance: str = ""
    skipped_rows: int = 0
    label_conflicts: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[DomainRecord]:
        return iter(self.records)

    def __getitem__(self, i: int) -> DomainRecord:
        return self.records[i]


@dataclass(frozen=True)
class CorpusSummary:
    total: int
    positives: int
    negatives: int


def load_labeled_csv(
    source: str | Path | IO[str],
    *,
    domain_col: str = "domain",
    label_col: str = "class",
    host_col: str = "host",
    label_map: Mapping[str, int] | None = None,
    strict: bool = True,
) -> DomainCorpus:
    """Read a labeled domain CSV (UTF-8, header row, RFC 4180 quoting).

    Domains are lowercased; DNS names are case-insensitive. Label cells are
    matched case-insensitively against ``label_map``. In strict mode a
    malformed row (empty domain, missing cell, unmappable label) aborts the
    load with its line number; in lenient mode it is skipped and counted.
    """
    label_map = {k.lower(): v for k, v in (label_map or DEFAULT_LABEL_MAP).items()}
    if hasattr(source, "read"):
        provenance = getattr(source, "name", "<stream>")
        corpus = _read_rows(source, provenance, domain_col, label_col, host_col, label_map, strict)
    else:
        path = Path(source)
        try:
            with open(path, encoding="utf-8", newline="") as fh:
                corpus = _read_rows(fh, str(path), domain_col, label_col, host_col, label_map, strict)
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
    if not corpus.records:
        raise DataError(f"{corpus.provenance}: no data rows")
    return corpus


def _read_rows(fh, provenance, domain_col, label_col, host_col, label_map, strict) -> DomainCorpus:
    reader = csv.DictReader(fh)
    header = reader.fieldnames
    if header is None:
        raise DataError(f"{provenance}: empty file")
    for required in (domain_col, label_col):
        if required not in header:
            raise DataError(f"{provenance}: missing column '{required}' (found {header})")
    has_host = host_col in header

    records: list[DomainRecord] = []
    skipped = 0
    for row in reader:
        line = reader.line_num
        domain = (row.get(domain_col) or "").strip().lower()
        raw_label = (row.get(label_col) or "").strip().lower()
        label = label_map.get(raw_label)
        problem = None
        if not domain:
            problem = "empty domain"
        elif label is None:
            problem = f"unmappable label {row.get(label_col)!r}"
        if problem is not None:
            if strict:
                raise DataError(f"{provenance}: line {line}: {problem}")
            skipped += 1
            continue
        host = (row.get(host_col) or "").strip() or None if has_host else None
        records.append(DomainRecord(domain=domain, label=label, host=host))
    return DomainCorpus(records=tuple(records), provenance=provenance, skipped_rows=skipped)


def deduplicate(corpus: DomainCorpus) -> DomainCorpus:
    """Keep the first occurrence of each domain, preserving order.

    Dropped duplicates whose label disagrees with the kept record are counted
    in ``label_conflicts``.
    """
    seen: dict[str, int] = {}
    kept: list[DomainRecord] = []
    conflicts = 0
    for rec in corpus.records:
        first_label = seen.get(rec.domain)
        if first_label is None:
            seen[rec.domain] = rec.label
            kept.append(rec)
        elif rec.label != first_label:
            conflicts += 1
    return replace(corpus, records=tuple(kept), label_conflicts=conflicts)


def stratified_split(
    corpus: DomainCorpus, test_fraction: float, seed: int
) -> tuple[DomainCorpus, DomainCorpus]:
    """Split into (train, test) preserving class proportions.

    Deterministic for a fixed seed; each output keeps the input's record
    order. Both classes must be present and the fraction must leave at least
    one train and one test record per class.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0,1), got {test_fraction}")
    by_class: dict[int, list[int]] = {0: [], 1: []}
    for i, rec in enumerate(corpus.records):
        by_class[rec.label].append(i)
    if not by_class[0] or not by_class[1]:
        raise DataError(f"{corpus.provenance}: both classes required for a stratified split")

    rng = random.Random(seed)
    test_idx: set[int] = set()
    for label in (0, 1):
        indices = by_class[label]
        n_test = int(test_fraction * len(indices) + 0.5)
        if n_test < 1 or n_test >= len(indices):
            raise ValueError(
                f"test_fraction {test_fraction} leaves no {'test' if n_test < 1 else 'train'} "
                f"records for class {label} ({len(indices)} available)"
            )
        shuffled = indices[:]
        rng.shuffle(shuffled)
        test_idx.update(shuffled[:n_test])

    train_records = tuple(r for i, r in enumerate(corpus.records) if i not in test_idx)
    test_records = tuple(r for i, r in enumerate(corpus.records) if i in test_idx)
    train = DomainCorpus(records=train_records, provenance=f"{corpus.provenance}[train]")
    test = DomainCorpus(records=test_records, provenance=f"{corpus.provenance}[test]")
    return train, test


def summarize(corpus: DomainCorpus) -> CorpusSummary:
    positives = sum(r.label for r in corpus.records)
    return CorpusSummary(total=len(corpus.records), positives=positives,
                         negatives=len(corpus.records) - positives)
