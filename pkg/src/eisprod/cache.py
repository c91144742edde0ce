"""On-disk cache of Eisenstein families, one JSON document per (k, N, truncation)."""
from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path

from .eisenstein import FORMAT_VERSION, EisensteinFamily

ENV_VAR = "EISPROD_CACHE_DIR"

_NAME = re.compile(r"family_k(\d+)_N(\d+)_T(\d+)_v(\d+)\.json$")


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_DATA_HOME") or os.path.join(os.path.expanduser("~"), ".local", "share")
    return Path(base) / "eisprod"


class FamilyCache:
    """Atomic write-then-rename store; a family cached at a larger truncation serves smaller requests."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def path(self, k: int, N: int, T: int) -> Path:
        return self.directory / f"family_k{k}_N{N}_T{T}_v{FORMAT_VERSION}.json"

    def _candidates(self, k: int, N: int, T: int):
        if not self.directory.is_dir():
            return []
        out = []
        for p in self.directory.iterdir():
            m = _NAME.match(p.name)
            if not m:
                continue
            kk, nn, tt, vv = map(int, m.groups())
            if (kk, nn, vv) == (k, N, FORMAT_VERSION) and tt >= T:
                out.append((tt, p))
        return sorted(out)

    def load(self, k: int, N: int, T: int) -> EisensteinFamily | None:
        for tt, p in self._candidates(k, N, T):
            try:
                with open(p) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError):
                continue
            if data.get("format_version") != FORMAT_VERSION:
                continue
            fam = EisensteinFamily.from_json(data)
            if tt == T:
                return fam
            return _truncated(fam, T)
        return None

    def store(self, fam: EisensteinFamily) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        dest = self.path(fam.weight, fam.level, fam.truncation)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(fam.to_json(), fh, separators=(",", ":"))
            os.replace(tmp, dest)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return dest


def _truncated(fam: EisensteinFamily, T: int) -> EisensteinFamily:
    exps = {v: e.truncate(T) for v, e in fam.expansions.items()}
    return EisensteinFamily(fam.weight, fam.level, T, exps, dict(fam.constant_terms), fam.normalization)
