"""Deterministic CSV writing with ``#`` metadata headers."""

from __future__ import annotations

import csv
import os

from .. import __version__


def fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


class CsvWriter:
    """Accumulates metadata for every file written in one command run."""

    def __init__(self, directory, command, cfg_hash, units):
        self.directory = directory
        self.command = command
        self.cfg_hash = cfg_hash
        self.units = units
        self.written = []

    def _header(self, extra):
        lines = [
            f"mesodyn {__version__}",
            f"command: {self.command}",
            f"config_sha256: {self.cfg_hash}",
            f"units: {self.units}",
        ]
        lines.extend(extra)
        return "".join(f"# {line}\n" for line in lines)

    def write(self, name, columns, rows, meta=()):
        os.makedirs(self.directory, exist_ok=True)
        path = os.path.join(self.directory, name)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(self._header(meta))
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
        self.written.append(path)
        return path
