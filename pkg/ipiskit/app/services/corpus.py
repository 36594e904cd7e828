"""
Loading, validation and filtering of IPIS instruction records.

Files are UTF-8 JSON Lines or a single JSON array of objects using the
published field names. Unknown fields are preserved.
"""

import json
import logging
from collections import Counter
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ipiskit.app.core.exceptions import DatasetFormatError, RecordValidationError
from ipiskit.app.schemas.generation import GenerationRecord
from ipiskit.app.schemas.record import LANGUAGE_FIELDS, Direction, IpisRecord, Split, SplitStats, Task

logger = logging.getLogger(__name__)

SPLITS: tuple[Split, ...] = ("train", "dev", "test")


def _read_objects(path: Path) -> list[tuple[int, Any]]:
    """Return (line number, decoded value) pairs from a JSON array or JSONL file."""
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if not stripped:
        return []

    if stripped.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DatasetFormatError(str(path), e.lineno, e.msg) from e
        if not isinstance(data, list):
            raise DatasetFormatError(str(path), None, "top-level value is not an array")
        # Array elements have no line of their own; report the element position.
        return [(index + 1, item) for index, item in enumerate(data)]

    objects = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            objects.append((lineno, json.loads(line)))
        except json.JSONDecodeError as e:
            raise DatasetFormatError(str(path), lineno, e.msg) from e
    return objects


def _validation_reason(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "record"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_record(obj: Any, where: str, task: Task | None = None) -> IpisRecord:
    """
    Validate one decoded object.

    Args:
        obj: Decoded JSON value
        where: Location used in error messages (ipis_id or line)
        task: When given, the record must belong to this task

    Raises:
        RecordValidationError: If the object violates the record schema
    """
    if not isinstance(obj, dict):
        raise RecordValidationError(where, "expected a JSON object")
    if obj.get("ipis_id"):
        where = f"{obj['ipis_id']} ({where})"
    try:
        record = IpisRecord.model_validate(obj)
    except ValidationError as e:
        raise RecordValidationError(where, _validation_reason(e)) from e
    if task is not None and record.task != task:
        raise RecordValidationError(where, f"expected a {task} record, got {record.task}")
    return record


def load(path: str | Path, task: Task | None = None) -> list[IpisRecord]:
    """
    Load and validate a dataset file.

    Args:
        path: JSONL or JSON array file
        task: Force every record to this task (inferred per record otherwise)

    Returns:
        Records in file order

    Raises:
        DatasetFormatError: If the file is not valid JSON / JSONL
        RecordValidationError: If a record is invalid or an ipis_id repeats
    """
    path = Path(path)
    records = []
    seen: set[str] = set()
    for lineno, obj in _read_objects(path):
        record = parse_record(obj, f"{path.name}:{lineno}", task)
        if record.ipis_id in seen:
            raise RecordValidationError(record.ipis_id, "duplicate ipis_id")
        seen.add(record.ipis_id)
        records.append(record)

    logger.info(f"[CORPUS] Loaded {len(records)} records from {path}")
    return records


def infer_split(ipis_id: str) -> Split | None:
    """
    Split named by the id infix.

    Examples:
        >>> infer_split("IPIS_proofreading_dev_2143")
        'dev'
        >>> infer_split("IPIS-EN_translation_pl2en_test_7")
        'test'
    """
    for split in SPLITS:
        if f"_{split}_" in ipis_id:
            return split
    return None


def stats(
    records: Iterable[IpisRecord],
    task: Task | None = None,
    split: Split | None = None,
) -> SplitStats:
    """
    Count records.

    Task and split are inferred from the records when not given: the
    majority task, and the split shared by every id (None if they disagree).
    """
    records = list(records)
    if task is None:
        tasks = Counter(record.task for record in records)
        task = tasks.most_common(1)[0][0] if tasks else "proofreading"
    if split is None:
        splits = {infer_split(record.ipis_id) for record in records}
        split = splits.pop() if len(splits) == 1 else None
    return SplitStats(task=task, split=split, count=len(records))


def stats_by_split(records: Iterable[IpisRecord]) -> list[SplitStats]:
    """One SplitStats per (task, split) present, in task then split order."""
    counts = Counter((record.task, infer_split(record.ipis_id)) for record in records)
    order = {name: i for i, name in enumerate(SPLITS)}
    keys = sorted(counts, key=lambda k: (k[0], order.get(k[1], len(order))))
    return [SplitStats(task=t, split=s, count=counts[(t, s)]) for t, s in keys]


def serialize(record: IpisRecord) -> dict[str, Any]:
    """Record as a plain dict; absent language fields are omitted, extras kept as loaded."""
    row = record.model_dump(mode="json")
    for name in LANGUAGE_FIELDS:
        if row[name] is None:
            del row[name]
    return row


def dump_jsonl(records: Iterable[IpisRecord], path: str | Path) -> int:
    """Write records as JSON Lines; returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(serialize(record), ensure_ascii=False) + "\n")
            count += 1
    return count


def filter_direction(records: Iterable[IpisRecord], direction: Direction) -> list[IpisRecord]:
    """Translation records going pl2en or en2pl."""
    return [record for record in records if record.direction == direction]


def load_predictions(path: str | Path) -> dict[str, GenerationRecord]:
    """
    Load a predictions JSONL of ``{ipis_id, output}`` or full generation records.

    A line may carry ``error`` instead of ``output``. When an id repeats, the
    last line wins.

    Raises:
        DatasetFormatError: If a line is not JSON or lacks ipis_id
    """
    path = Path(path)
    predictions: dict[str, GenerationRecord] = {}
    for lineno, obj in _read_objects(path):
        if not isinstance(obj, dict) or not obj.get("ipis_id"):
            raise DatasetFormatError(str(path), lineno, "prediction needs an ipis_id")
        obj.setdefault("scenario", "")
        try:
            predictions[obj["ipis_id"]] = GenerationRecord.model_validate(obj)
        except ValidationError as e:
            raise DatasetFormatError(str(path), lineno, _validation_reason(e)) from e

    logger.info(f"[CORPUS] Loaded {len(predictions)} predictions from {path}")
    return predictions
