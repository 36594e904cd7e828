"""
Evaluation reports: scoring joined records/predictions and rendering results.

Reports are written as ``report.json`` (sorted keys, 2-space indent) and
``report.txt`` (aligned table in the proofreading or translation layout).
"""

import json
import logging
import os
from collections.abc import Mapping, Sequence
from datetime import datetime, timezone
from pathlib import Path

from pydantic import ValidationError

from ipiskit import __version__
from ipiskit.app.core.exceptions import PredictionMismatchError, ReportFormatError
from ipiskit.app.schemas.generation import GenerationRecord
from ipiskit.app.schemas.normalize import Stoplist
from ipiskit.app.schemas.record import IpisRecord
from ipiskit.app.schemas.report import EvalReport, InstanceScore, MtCell, RunManifest
from ipiskit.app.services.metrics import aggregate_proof, mt_scores, proof_scores
from ipiskit.app.services.normalize import default_stoplist, normalize

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_TXT = "report.txt"

DIRECTIONS = (("pl2en", "Polish->English"), ("en2pl", "English->Polish"))
PROMPT_LANGUAGES = ("PL", "EN")


def resolve_timestamp(explicit: str | None = None) -> str:
    """Explicit value, else SOURCE_DATE_EPOCH, else the current UTC time (ISO 8601)."""
    if explicit:
        return explicit
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc) if epoch else datetime.now(timezone.utc)
    return moment.replace(microsecond=0).isoformat()


def build_manifest(
    command: str,
    config: Mapping[str, str | int | float | bool | None],
    timestamp: str | None = None,
) -> RunManifest:
    return RunManifest(
        command=command,
        tool_version=__version__,
        timestamp=resolve_timestamp(timestamp),
        config=dict(config),
    )


def _join_predictions(
    records: Sequence[IpisRecord],
    predictions: Mapping[str, GenerationRecord],
) -> list[tuple[IpisRecord, str, bool]]:
    """(record, output, failed) triples; failed generations score as empty output."""
    missing = [record.ipis_id for record in records if record.ipis_id not in predictions]
    if missing:
        raise PredictionMismatchError(missing)

    joined = []
    for record in records:
        prediction = predictions[record.ipis_id]
        if prediction.ok:
            joined.append((record, prediction.output, False))
        else:
            logger.warning(f"[EVAL] {record.ipis_id} has a failed generation; scoring it as empty output")
            joined.append((record, "", True))
    return joined


def _failure_warnings(joined: list[tuple[IpisRecord, str, bool]]) -> list[str]:
    failed = [record.ipis_id for record, _, is_failed in joined if is_failed]
    if not failed:
        return []
    return [f"{len(failed)} failed generation(s) scored as empty output: {', '.join(failed)}"]


def evaluate_proofreading(
    records: Sequence[IpisRecord],
    predictions: Mapping[str, GenerationRecord],
    scenario: str,
    manifest: RunManifest,
    stoplist: Stoplist | None = None,
    lowercase: bool = False,
) -> EvalReport:
    """
    Score proofreading predictions.

    Raises:
        PredictionMismatchError: If a record has no prediction
    """
    stoplist = stoplist if stoplist is not None else default_stoplist()
    joined = _join_predictions(records, predictions)

    per_instance = []
    for record, output, failed in joined:
        scores = proof_scores(
            normalize(record.source, stoplist),
            normalize(record.target, stoplist),
            normalize(output, stoplist),
        )
        per_instance.append(InstanceScore(ipis_id=record.ipis_id, scores=scores, failed_generation=failed))

    proof = aggregate_proof(item.scores for item in per_instance)
    mt = mt_scores([output for _, output, _ in joined], [record.target for record in records], lowercase)
    logger.info(
        f"[EVAL] {scenario}: {len(records)} records, Acc={proof.accuracy:.2f} "
        f"P={proof.precision:.2f} R={proof.recall:.2f} F1={proof.f1:.2f} BLEU={mt.bleu:.2f}"
    )
    return EvalReport(
        task="proofreading",
        scenario=scenario,
        manifest=manifest,
        per_instance=tuple(per_instance),
        proof=proof,
        mt=mt,
        warnings=tuple(_failure_warnings(joined)),
    )


def evaluate_translation(
    records: Sequence[IpisRecord],
    predictions: Mapping[str, GenerationRecord],
    scenario: str,
    manifest: RunManifest,
    lowercase: bool = False,
) -> EvalReport:
    """
    Score translation predictions per (direction, user-prompt language) cell.

    Empty cells are omitted and reported as warnings.

    Raises:
        PredictionMismatchError: If a record has no prediction
    """
    joined = _join_predictions(records, predictions)
    warnings = _failure_warnings(joined)

    per_instance = [
        InstanceScore(
            ipis_id=record.ipis_id,
            scores=mt_scores([output], [record.target], lowercase),
            failed_generation=failed,
        )
        for record, output, failed in joined
    ]

    cells = []
    for direction, _ in DIRECTIONS:
        for language in PROMPT_LANGUAGES:
            group = [
                (record, output)
                for record, output, _ in joined
                if record.direction == direction and record.prompt_language == language
            ]
            if not group:
                message = f"no {direction} records with a {language} user prompt; cell omitted"
                logger.warning(f"[EVAL] {message}")
                warnings.append(message)
                continue
            scores = mt_scores([output for _, output in group], [record.target for record, _ in group], lowercase)
            cells.append(MtCell(direction=direction, prompt_language=language, count=len(group), scores=scores))

    mt = mt_scores([output for _, output, _ in joined], [record.target for record in records], lowercase)
    logger.info(f"[EVAL] {scenario}: {len(records)} records in {len(cells)} cell(s), BLEU={mt.bleu:.2f}")
    return EvalReport(
        task="translation",
        scenario=scenario,
        manifest=manifest,
        per_instance=tuple(per_instance),
        mt=mt,
        cells=tuple(cells),
        warnings=tuple(warnings),
    )


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.2f}"


def report_model(report: EvalReport) -> str | None:
    """Model id recorded in the manifest, if any."""
    model = report.manifest.config.get("model")
    return str(model) if model else None


def _labels(reports: Sequence[EvalReport]) -> tuple[str, list[str]]:
    """Header and row labels: a Model column when any report records one, then Scenario."""
    with_model = any(report_model(report) for report in reports)
    columns = [["Model"] + [report_model(r) or "-" for r in reports]] if with_model else []
    columns.append(["Scenario"] + [r.scenario for r in reports])
    widths = [max(len(cell) for cell in column) for column in columns]
    rows = [
        " ".join(f"{column[i]:<{width}}" for column, width in zip(columns, widths))
        for i in range(len(reports) + 1)
    ]
    return rows[0], rows[1:]


def _proofreading_row(label: str, values: Sequence[str]) -> str:
    # Acc | Prec Rec F1 | BLEU chrF chrF++
    return " | ".join([
        label,
        f"{values[0]:>6}",
        " ".join(f"{v:>6}" for v in values[1:4]),
        " ".join(f"{v:>6}" for v in values[4:]),
    ])


def _proofreading_table(reports: Sequence[EvalReport]) -> list[str]:
    header, labels = _labels(reports)
    header_line = _proofreading_row(header, ["Acc", "Prec", "Rec", "F1", "BLEU", "chrF", "chrF++"])
    lines = [header_line, "-" * len(header_line)]
    for report, label in zip(reports, labels):
        proof, mt = report.proof, report.mt
        values = [
            _fmt(proof.accuracy if proof else None),
            _fmt(proof.precision if proof else None),
            _fmt(proof.recall if proof else None),
            _fmt(proof.f1 if proof else None),
            _fmt(mt.bleu if mt else None),
            _fmt(mt.chrf if mt else None),
            _fmt(mt.chrf_pp if mt else None),
        ]
        lines.append(_proofreading_row(label, values))
    return lines


def _translation_row(report: EvalReport) -> str:
    cells = {(cell.direction, cell.prompt_language): cell for cell in report.cells}
    groups = []
    for direction, _ in DIRECTIONS:
        parts = []
        for language in PROMPT_LANGUAGES:
            cell = cells.get((direction, language))
            values = (cell.scores.bleu, cell.scores.chrf, cell.scores.chrf_pp) if cell else (None,) * 3
            parts.append(" ".join(f"{_fmt(v):>6}" for v in values))
        groups.append(" | ".join(parts))
    return " || ".join(groups)


def _translation_table(reports: Sequence[EvalReport]) -> list[str]:
    header, labels = _labels(reports)
    metrics = ("BLEU", "chrF", "chrF++")
    cell_width = len(metrics) * 7 - 1
    blank = " " * len(header)

    directions = blank + " || " + " || ".join(
        f"{label:^{cell_width * 2 + 3}}" for _, label in DIRECTIONS
    )
    prompts = blank + " || " + " || ".join(
        " | ".join(f"{f'{lang} user prompt':^{cell_width}}" for lang in PROMPT_LANGUAGES)
        for _ in DIRECTIONS
    )
    names = f"{header} || " + " || ".join(
        " | ".join(" ".join(f"{m:>6}" for m in metrics) for _ in PROMPT_LANGUAGES)
        for _ in DIRECTIONS
    )
    lines = [directions, prompts, names, "-" * len(names)]
    lines.extend(f"{label} || {_translation_row(report)}" for report, label in zip(reports, labels))
    return lines


def render_table(report: EvalReport) -> str:
    """Plain-text table: proofreading or translation layout, then warnings."""
    lines = _proofreading_table([report]) if report.task == "proofreading" else _translation_table([report])
    lines.append("")
    lines.append(f"records: {len(report.per_instance)}")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"


def render_combined(reports: Sequence[EvalReport]) -> str:
    """
    One table per task with a row per report, in the given order.

    Rows are labelled by scenario, and by model when a manifest records one.
    """
    blocks = []
    for task, build in (("proofreading", _proofreading_table), ("translation", _translation_table)):
        group = [report for report in reports if report.task == task]
        if group:
            blocks.append("\n".join(build(group)))
    return "\n\n".join(blocks) + "\n"


def load_report(path: str | Path) -> EvalReport:
    """
    Read a report.json back (a directory means its report.json).

    Raises:
        ReportFormatError: If the file is not a valid report
    """
    path = Path(path)
    if path.is_dir():
        path = path / REPORT_JSON
    try:
        return EvalReport.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ReportFormatError(str(path), f"{e.error_count()} validation error(s)") from e


def write_report(report: EvalReport, out_dir: str | Path) -> tuple[Path, Path]:
    """Write report.json and report.txt into ``out_dir`` (created if needed)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / REPORT_JSON
    txt_path = out_dir / REPORT_TXT
    json_path.write_text(report_to_json(report), encoding="utf-8")
    txt_path.write_text(render_table(report), encoding="utf-8")
    logger.info(f"[EVAL] Wrote {json_path} and {txt_path}")
    return json_path, txt_path
