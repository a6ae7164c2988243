"""
Deterministic writers for result files (JSON, JSON Lines, CSV)
"""
import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

from config import RESULTS_DIR


def results_path(filename: str, custom_folder: str = None) -> Path:
    """Path inside the results folder, creating the folder if needed"""
    folder = Path(custom_folder or RESULTS_DIR)
    folder.mkdir(parents=True, exist_ok=True)
    return folder / filename


def _prepare(path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: Path, payload: Any) -> Path:
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


def write_jsonl(path: Path, lines: Iterable[str]) -> Path:
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for line in lines:
            f.write(line)
            f.write("\n")
    return path


def write_csv(path: Path, rows: Sequence[dict], fieldnames: Sequence[str]) -> Path:
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return path
