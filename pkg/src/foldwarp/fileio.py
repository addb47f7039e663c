"""File formats: replicate CSV ingestion and artifact serialization.

Formats (all text, UTF-8):

* replicate CSV: header ``entity,condition,replicate,time,value``; condition
  is 0 (control) or 1 (case); the (entity, condition, replicate, time) key must
  be unique.
* estimator-set directory: ``means.tsv`` and ``variances.tsv`` (rows =
  entities, one column per time point, header carries the time values) plus
  ``crosscov.tsv`` (long form: entity_a, entity_b, time, value; upper triangle
  only, the diagonal being implied by the variances).
* square matrices (``owd.tsv``/``ow.tsv``): tab-separated with a leading
  header row and column of entity identifiers.

Floats are written with 17 significant digits so every round trip is
bit-faithful.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .dataset import FoldChangeSet, ReplicateDataset, TimeVector, make_fold_change_set
from .exceptions import InconsistentTimeGrid, NonPositiveValue, ParseError, SchemaError

REPLICATE_HEADER = ["entity", "condition", "replicate", "time", "value"]
FMT = "%.17g"


def _fmt(x: float) -> str:
    return FMT % float(x)


def ingest_csv(path, log_transform: bool = False) -> ReplicateDataset:
    """Parse a replicate CSV into a dataset on the global time grid.

    Entities keep their order of first appearance; replicate labels are sorted
    so that replicate slots align across entities (required for covariance
    pairing).  Missing (entity, condition, replicate, time) combinations become
    NaN cells, to be handled by dataset validation.  With ``log_transform``,
    values are replaced by their natural log and must be strictly positive.

    Raises
    ------
    SchemaError
        Missing/invalid header or no data rows.
    ParseError
        Malformed fields or duplicate keys (reported with line numbers).
    NonPositiveValue
        A non-positive value under ``log_transform``.
    InconsistentTimeGrid
        Some entity was never observed at some grid time point.
    """
    path = Path(path)
    records: dict[tuple[str, int, str, float], float] = {}
    entities: list[str] = []
    seen_entities: set[str] = set()
    times: set[float] = set()
    replicates: set[str] = set()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        if [h.strip().lower() for h in header] != REPLICATE_HEADER:
            raise SchemaError(
                f"{path}: expected header {','.join(REPLICATE_HEADER)!r}, got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 5:
                raise ParseError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            entity = row[0].strip()
            if not entity:
                raise ParseError(f"{path}:{lineno}: empty entity identifier")
            try:
                condition = int(row[1])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad condition {row[1]!r}") from exc
            if condition not in (0, 1):
                raise ParseError(f"{path}:{lineno}: condition must be 0 or 1, got {condition}")
            replicate = row[2].strip()
            try:
                time = float(row[3])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad time {row[3]!r}") from exc
            try:
                value = float(row[4])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad value {row[4]!r}") from exc
            if not math.isfinite(value):
                raise ParseError(f"{path}:{lineno}: non-finite value")
            if log_transform:
                if value <= 0:
                    raise NonPositiveValue(
                        f"{path}:{lineno}: log transform needs positive values, got {value}"
                    )
                value = math.log(value)
            key = (entity, condition, replicate, time)
            if key in records:
                raise ParseError(f"{path}:{lineno}: duplicate record for key {key}")
            records[key] = value
            if entity not in seen_entities:
                seen_entities.add(entity)
                entities.append(entity)
            times.add(time)
            replicates.add(replicate)
    if not records:
        raise SchemaError(f"{path}: no data rows")
    grid = sorted(times)
    rep_labels = sorted(replicates)
    observed_times: dict[str, set[float]] = {e: set() for e in entities}
    for (entity, _, _, time) in records:
        observed_times[entity].add(time)
    for entity in entities:
        if observed_times[entity] != set(grid):
            missing = sorted(set(grid) - observed_times[entity])
            raise InconsistentTimeGrid(
                f"entity {entity!r} has no observations at times {missing}"
            )
    n_e, n_r, p = len(entities), len(rep_labels), len(grid)
    if n_r < 2:
        raise SchemaError(f"{path}: need at least two replicates, found {n_r}")
    values = np.full((n_e, 2, n_r, p), np.nan)
    e_idx = {e: i for i, e in enumerate(entities)}
    r_idx = {r: i for i, r in enumerate(rep_labels)}
    t_idx = {t: i for i, t in enumerate(grid)}
    for (entity, condition, replicate, time), value in records.items():
        values[e_idx[entity], condition, r_idx[replicate], t_idx[time]] = value
    return ReplicateDataset(tuple(entities), values, TimeVector(tuple(grid)))


def write_replicates_csv(path, dataset: ReplicateDataset) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPLICATE_HEADER)
        for i, entity in enumerate(dataset.entities):
            for condition in (0, 1):
                for j in range(dataset.n_replicates):
                    for t, time in enumerate(dataset.time.points):
                        value = dataset.values[i, condition, j, t]
                        if math.isfinite(value):
                            writer.writerow(
                                [entity, condition, f"r{j + 1}", _fmt(time), _fmt(value)]
                            )


# -- estimator-set directory ---------------------------------------------------

def write_fold_change_set(directory, fcs: FoldChangeSet) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    header = ["entity"] + [_fmt(t) for t in fcs.time.points]
    for name, table in (("means.tsv", fcs.means), ("variances.tsv", fcs.variances)):
        with open(directory / name, "w", newline="") as fh:
            writer = csv.writer(fh, delimiter="\t")
            writer.writerow(header)
            for entity, row in zip(fcs.entities, table):
                writer.writerow([entity] + [_fmt(v) for v in row])
    with open(directory / "crosscov.tsv", "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["entity_a", "entity_b", "time", "value"])
        n_e = fcs.n_entities
        for i in range(n_e):
            for j in range(i + 1, n_e):
                for t, time in enumerate(fcs.time.points):
                    writer.writerow(
                        [fcs.entities[i], fcs.entities[j], _fmt(time), _fmt(fcs.crosscov[i, j, t])]
                    )


def read_fold_change_set(directory) -> FoldChangeSet:
    directory = Path(directory)
    entities, times, means = _read_entity_table(directory / "means.tsv")
    entities_v, times_v, variances = _read_entity_table(directory / "variances.tsv")
    if entities_v != entities or times_v != times:
        raise SchemaError(f"{directory}: means.tsv and variances.tsv disagree")
    n_e, p = means.shape
    e_idx = {e: i for i, e in enumerate(entities)}
    t_idx = {t: i for i, t in enumerate(times)}
    crosscov = np.zeros((n_e, n_e, p))
    cc_path = directory / "crosscov.tsv"
    with open(cc_path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if header != ["entity_a", "entity_b", "time", "value"]:
            raise SchemaError(f"{cc_path}: bad header")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                i, j = e_idx[row[0]], e_idx[row[1]]
                t = t_idx[float(row[2])]
                crosscov[i, j, t] = float(row[3])
            except (KeyError, ValueError, IndexError) as exc:
                raise ParseError(f"{cc_path}:{lineno}: bad record {row!r}") from exc
    return make_fold_change_set(entities, means, variances, crosscov, TimeVector(times))


def _read_entity_table(path) -> tuple[tuple[str, ...], tuple[float, ...], np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if not header or header[0] != "entity":
            raise SchemaError(f"{path}: bad header")
        try:
            times = tuple(float(t) for t in header[1:])
        except ValueError as exc:
            raise SchemaError(f"{path}: non-numeric time in header") from exc
        entities: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(times) + 1:
                raise ParseError(f"{path}:{lineno}: expected {len(times) + 1} fields")
            entities.append(row[0])
            try:
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric value") from exc
    if not entities:
        raise SchemaError(f"{path}: no data rows")
    return tuple(entities), times, np.asarray(rows)


# -- square matrices -----------------------------------------------------------

def write_matrix_tsv(path, matrix: np.ndarray, entities, integer: bool = False) -> None:
    matrix = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["entity"] + list(entities))
        for entity, row in zip(entities, matrix):
            rendered = [str(int(v)) if integer else _fmt(v) for v in row]
            writer.writerow([entity] + rendered)


def read_matrix_tsv(path) -> tuple[tuple[str, ...], np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter="\t")
        header = next(reader, None)
        if not header or header[0] != "entity":
            raise SchemaError(f"{path}: bad header")
        entities = tuple(header[1:])
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(entities) + 1:
                raise ParseError(f"{path}:{lineno}: ragged row")
            rows.append([float(v) for v in row[1:]])
    if len(rows) != len(entities):
        raise SchemaError(f"{path}: matrix is not square")
    return entities, np.asarray(rows)


# -- labels, plot data, summaries ------------------------------------------------

def write_clusters_csv(path, entities, labels, warps, centroids) -> None:
    """One row per entity: entity, 1-based label, warp step, is_centroid flag."""
    centroid_set = set(int(c) for c in centroids)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity", "label", "warp", "is_centroid"])
        for i, entity in enumerate(entities):
            writer.writerow(
                [entity, int(labels[i]) + 1, int(warps[i]), int(i in centroid_set)]
            )


def read_labels_csv(path) -> tuple[tuple[str, ...], np.ndarray]:
    """Read entity/label pairs from any CSV carrying those two columns."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"{path}: empty file")
        cols = [h.strip().lower() for h in header]
        if "entity" not in cols or "label" not in cols:
            raise SchemaError(f"{path}: need 'entity' and 'label' columns")
        e_col, l_col = cols.index("entity"), cols.index("label")
        entities, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                entities.append(row[e_col])
                labels.append(row[l_col])
            except IndexError as exc:
                raise ParseError(f"{path}:{lineno}: short row") from exc
    if not entities:
        raise SchemaError(f"{path}: no data rows")
    return tuple(entities), np.asarray(labels)


def write_truth_csv(path, entities, labels) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entity", "label"])
        for entity, label in zip(entities, labels):
            writer.writerow([entity, int(label)])


def write_plotdata(directory, fcs: FoldChangeSet, labels, warps, centroids) -> list[Path]:
    """Per-cluster tidy series for redrawing aligned/unaligned mean panels.

    Unaligned rows plot each entity's mean at its own time; aligned rows plot
    the overlapping part of the mean at the centroid's time axis, i.e. value
    ``mean[i, l]`` lands at time ``t[l + warp]``.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    points = fcs.time.points
    p = len(points)
    written = []
    n_clusters = int(np.max(labels)) + 1
    for k in range(n_clusters):
        out = directory / f"cluster_{k + 1:02d}.csv"
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["entity", "time", "value", "aligned"])
            for i in np.flatnonzero(np.asarray(labels) == k):
                s = int(warps[i])
                for l in range(p):
                    writer.writerow([fcs.entities[i], _fmt(points[l]), _fmt(fcs.means[i, l]), 0])
                for l in range(max(0, -s), p - max(0, s)):
                    writer.writerow(
                        [fcs.entities[i], _fmt(points[l + s]), _fmt(fcs.means[i, l]), 1]
                    )
        written.append(out)
    return written


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
