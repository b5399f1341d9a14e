"""Records what a stage read, what it wrote and with which settings."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from numforge import __version__
from numforge.common.errors import InputError
from numforge.common.io import file_digest, read_json, write_json

log = logging.getLogger(__name__)

MANIFEST_SUFFIX: str = '.manifest.json'

# fields that differ between otherwise identical runs
VOLATILE_FIELDS: tuple[str, ...] = ('started_at', 'finished_at')


def utc_now() -> str:
    """Returns the current UTC time in ISO 8601 form."""
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


def manifest_path(output: str | Path) -> Path:
    """Returns the manifest file that accompanies an output file or
    directory."""
    output = Path(output)
    return output.parent / (output.name + MANIFEST_SUFFIX)


@dataclass
class RunManifest:
    """
    The provenance of one stage run: the effective configuration, the digests
    of its inputs and outputs, the tool version, the seed and the start and
    finish times.
    """

    stage: str
    config: dict[str, Any]
    seed: int
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    tool_version: str = __version__
    started_at: str = field(default_factory=utc_now)
    finished_at: str | None = None

    def add_input(self, path: str | Path):
        """Records the digest of an input file, or of every file of an input
        directory."""
        self._digest_into(self.inputs, Path(path))

    def add_output(self, path: str | Path):
        """Records the digest of an output file or directory."""
        self._digest_into(self.outputs, Path(path))

    @staticmethod
    def _digest_into(digests: dict[str, str], path: Path):
        if path.is_dir():
            for child in sorted(path.rglob('*')):
                if child.is_file() and not child.name.endswith(
                        MANIFEST_SUFFIX):
                    digests[child.as_posix()] = file_digest(child)
        else:
            digests[path.as_posix()] = file_digest(path)

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON object of the manifest."""
        return {'stage': self.stage, 'tool_version': self.tool_version,
                'seed': self.seed, 'config': self.config,
                'inputs': self.inputs, 'outputs': self.outputs,
                'started_at': self.started_at,
                'finished_at': self.finished_at}

    def finish(self, path: str | Path) -> Path:
        """
        Stamps the finish time and writes the manifest.

        :param path: The manifest file
        :return: The manifest file
        """
        self.finished_at = utc_now()
        write_json(path, self.to_dict())
        log.debug('wrote manifest %s', path)
        return Path(path)


def verify_manifest(path: str | Path) -> list[str]:
    """
    Recomputes the digests a manifest records.

    :param path: The manifest file
    :return: The files whose content no longer matches, empty when all do
    """
    record: dict[str, Any] = read_json(path)
    if not isinstance(record, dict) or 'outputs' not in record:
        raise InputError(f'{path} is not a run manifest')

    stale: list[str] = []
    for digests in (record.get('inputs', {}), record['outputs']):
        for file, digest in digests.items():
            if not Path(file).is_file() or file_digest(file) != digest:
                stale.append(file)

    return stale
