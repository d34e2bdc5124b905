import csv
import io
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

from pydantic import BaseModel


class FileSystemUtils:
    """Utility functions for experiment artifacts on disk"""

    @staticmethod
    def write_file(path: Path, content: str) -> None:
        """Write content to file, creating directories as needed"""
        path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps output byte-identical across platforms
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(content)

    @staticmethod
    def read_file(path: Path) -> str:
        """Read file content"""
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()

    @staticmethod
    def write_jsonl(path: Path, records: Iterable[BaseModel]) -> None:
        """One pydantic record per line, in the given order"""
        lines = [record.model_dump_json(by_alias=True) for record in records]
        FileSystemUtils.write_file(path, "".join(line + "\n" for line in lines))

    @staticmethod
    def write_csv(path: Path, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]) -> None:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        FileSystemUtils.write_file(path, buffer.getvalue())
