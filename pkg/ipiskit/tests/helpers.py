"""Shared test data builders."""

import json
from pathlib import Path

from ipiskit.app.schemas.record import IpisRecord

PROOFREADING_PROMPT = (
    "Przeredaguj tekst w standardowym języku polskim, aby nie zawierał treści "
    "krzywdzących i wykluczających. Tekst źródłowy: "
)

FIXTURES_DIR = Path(__file__).parent / "fixtures"

OSCARS_SOURCE = "Tegoroczni laureaci Oscarów pozowali na czerwonym dywanie."
OSCARS_STAR = "Tegoroczn*i/e laurea*ci/tki Oscarów pozowa*li/ły na czerwonym dywanie."


def make_records(count: int, split: str = "test") -> list[IpisRecord]:
    """Synthetic proofreading records whose source carries a bracketed index."""
    return [
        IpisRecord(
            source_resource_id="fixture",
            ipis_id=f"IPIS_proofreading_{split}_{i}",
            prompt=PROOFREADING_PROMPT,
            source=f"[{i:02d}] Pracownicy przyszli na spotkanie.",
            target=f"[{i:02d}] Pracowni*cy/ce przysz*li/ły na spotkanie.",
        )
        for i in range(count)
    ]


def write_jsonl(path: Path, rows) -> Path:
    """Write dicts or records as JSON Lines."""
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            if isinstance(row, IpisRecord):
                row = row.model_dump(mode="json", exclude_none=True)
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path
