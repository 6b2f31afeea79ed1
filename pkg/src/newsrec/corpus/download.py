"""Dataset downloading with hash verification and idempotent re-runs."""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import requests

from newsrec.errors import DownloadError, HashMismatchError, UnknownDatasetError

CHUNK_SIZE = 1 << 16
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class FileSpec:
    """One downloadable archive: filename, source URL, optional pinned hash."""

    filename: str
    url: str
    sha256: Optional[str] = None


@dataclass
class DatasetSpec:
    name: str
    files: list[FileSpec]
    notes: str = ""


# Known datasets. Hashes pinned where we distribute fixtures ourselves;
# upstream archives are verified on first download and pinned into the
# manifest so later re-runs detect corruption.
DATASETS: dict[str, DatasetSpec] = {
    "mind-small": DatasetSpec(
        name="mind-small",
        files=[
            FileSpec("MINDsmall_train.zip", "https://mind201910small.blob.core.windows.net/release/MINDsmall_train.zip"),
            FileSpec("MINDsmall_dev.zip", "https://mind201910small.blob.core.windows.net/release/MINDsmall_dev.zip"),
        ],
        notes="train/dev only; no test split is distributed",
    ),
    "mind-large": DatasetSpec(
        name="mind-large",
        files=[
            FileSpec("MINDlarge_train.zip", "https://mind201910small.blob.core.windows.net/release/MINDlarge_train.zip"),
            FileSpec("MINDlarge_dev.zip", "https://mind201910small.blob.core.windows.net/release/MINDlarge_dev.zip"),
            FileSpec("MINDlarge_test.zip", "https://mind201910small.blob.core.windows.net/release/MINDlarge_test.zip"),
        ],
    ),
    "ebnerd-demo": DatasetSpec(
        name="ebnerd-demo",
        files=[
            FileSpec("ebnerd_demo.zip", "https://ebnerd-dataset.s3.eu-west-1.amazonaws.com/ebnerd_demo.zip"),
        ],
        notes="requires conversion to the JSONL layout documented in the README",
    ),
}


@dataclass
class ManifestEntry:
    filename: str
    bytes: int
    sha256: str
    url: str
    downloaded: bool = True  # False when a verified file was already present


@dataclass
class DownloadManifest:
    dataset: str
    entries: list[ManifestEntry] = field(default_factory=list)

    @property
    def downloaded_bytes(self) -> int:
        return sum(e.bytes for e in self.entries if e.downloaded)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "files": [
                {"filename": e.filename, "bytes": e.bytes, "sha256": e.sha256, "url": e.url}
                for e in self.entries
            ],
        }


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(CHUNK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _default_fetcher(url: str, dest: Path) -> None:
    with requests.get(url, stream=True, timeout=60) as resp:
        resp.raise_for_status()
        with open(dest, "wb") as f:
            for chunk in resp.iter_content(CHUNK_SIZE):
                f.write(chunk)


def _load_manifest_hashes(target_dir: Path) -> dict[str, str]:
    path = target_dir / MANIFEST_NAME
    if not path.is_file():
        return {}
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return {f["filename"]: f["sha256"] for f in data.get("files", [])}
    except (json.JSONDecodeError, KeyError, TypeError):
        return {}


def download_dataset(
    dataset_name: str,
    target_dir: str | os.PathLike,
    mirror_url: Optional[str] = None,
    fetcher: Optional[Callable[[str, Path], None]] = None,
    retries: int = 3,
    backoff: float = 0.5,
) -> DownloadManifest:
    """Fetch every archive of ``dataset_name`` into ``target_dir``.

    Files already present with a matching hash are skipped, so re-running on a
    complete directory downloads nothing. Each file is fetched with up to
    ``retries`` attempts under exponential backoff; a hash mismatch deletes the
    partial file and fails. The manifest is persisted next to the files.

    ``mirror_url`` replaces the directory part of every file URL, e.g. a local
    mirror serving the same filenames. ``fetcher`` exists for tests.
    """
    if dataset_name not in DATASETS:
        raise UnknownDatasetError(
            f"unknown dataset {dataset_name!r}; available: {sorted(DATASETS)}"
        )
    spec = DATASETS[dataset_name]
    target_dir = Path(target_dir)
    target_dir.mkdir(parents=True, exist_ok=True)
    fetch = fetcher if fetcher is not None else _default_fetcher
    known_hashes = _load_manifest_hashes(target_dir)

    manifest = DownloadManifest(dataset=dataset_name)
    for file_spec in spec.files:
        url = file_spec.url
        if mirror_url:
            url = mirror_url.rstrip("/") + "/" + file_spec.filename
        expected = file_spec.sha256 or known_hashes.get(file_spec.filename)
        dest = target_dir / file_spec.filename

        if dest.is_file():
            actual = sha256_file(dest)
            if expected is None or actual == expected:
                manifest.entries.append(
                    ManifestEntry(file_spec.filename, dest.stat().st_size, actual, url, downloaded=False)
                )
                continue
            dest.unlink()  # stale or corrupt; re-download

        actual = _fetch_verified(url, dest, expected, fetch, retries, backoff)
        manifest.entries.append(ManifestEntry(file_spec.filename, dest.stat().st_size, actual, url))

    manifest_path = target_dir / MANIFEST_NAME
    manifest_path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    return manifest


def _fetch_verified(
    url: str,
    dest: Path,
    expected_sha256: Optional[str],
    fetch: Callable[[str, Path], None],
    retries: int,
    backoff: float,
) -> str:
    """Download ``url`` to ``dest`` atomically, verifying the hash if pinned.

    Writes go to ``<dest>.part`` first; the part file doubles as an exclusive
    marker so concurrent downloads of the same file do not interleave.
    """
    part = dest.with_name(dest.name + ".part")
    try:
        part_fd = os.open(part, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise DownloadError(f"{dest.name} is already being downloaded (found {part.name})") from None
    os.close(part_fd)

    last_error: Exception | None = None
    try:
        for attempt in range(retries):
            if attempt:
                time.sleep(backoff * (2 ** (attempt - 1)))
            try:
                fetch(url, part)
            except Exception as exc:  # network failure: retry
                last_error = exc
                continue
            actual = sha256_file(part)
            if expected_sha256 is not None and actual != expected_sha256:
                part.unlink(missing_ok=True)
                raise HashMismatchError(
                    f"{dest.name}: sha256 {actual} does not match expected {expected_sha256}; "
                    "partial file deleted"
                )
            os.replace(part, dest)
            return actual
        raise DownloadError(f"failed to download {url} after {retries} attempts: {last_error}")
    finally:
        part.unlink(missing_ok=True)
