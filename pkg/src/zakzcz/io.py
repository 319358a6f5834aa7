"""
File formats: sequence families (JSON), tables (CSV) and run manifests.

Sequence files are versioned JSON.  The canonical body stores every sample
as an integer exponent ``e`` over a common denominator ``D`` (the sample is
``exp(2*pi*i*e/D)``); families whose samples are not roots of unity fall
back to ``[real, imag]`` pairs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import platform
import subprocess
import sys
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path

import numpy as np

from .zakcore import unit_roots
from .zczgen import SequenceFamily, generate_family

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "family_to_record",
    "record_to_sets",
    "write_family",
    "read_family",
    "write_csv",
    "sha256_file",
    "toolkit_version",
    "write_manifest",
]


def family_to_record(family: SequenceFamily, exact: bool = True) -> dict:
    header = {
        "N": family.N,
        "R": family.R,
        "T": family.T,
        "L": family.L,
        "M": family.M,
        "theorem": family.theorem,
        "q": family.q,
        "rows": family.rows,
        "source": family.source,
        "index_matrix": None if family.index_matrix is None else np.asarray(family.index_matrix).tolist(),
    }
    rec = {"schema_version": SCHEMA_VERSION, "kind": "sequence-family", "header": header}
    if exact:
        try:
            D, E = family.exponent_form()
        except ValueError:
            exact = False
        else:
            header["denominator"] = D
            rec["form"] = "exponent"
            rec["sets"] = E.tolist()
    if not exact:
        header["denominator"] = None
        rec["form"] = "complex"
        s = family.sequences
        rec["sets"] = np.stack([s.real, s.imag], axis=-1).tolist()
    return rec


def record_to_sets(rec: dict) -> np.ndarray:
    """Samples of a parsed record as a complex ``(M, T, N)`` array."""
    if rec.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {rec.get('schema_version')!r}")
    h = rec["header"]
    body = np.asarray(rec["sets"])
    if rec["form"] == "exponent":
        D = int(h["denominator"])
        if D % (2 * h["R"] * h["T"]):
            raise ValueError("denominator must be divisible by 2*R*T")
        sets = unit_roots(body.astype(np.int64), D)
    elif rec["form"] == "complex":
        sets = body[..., 0] + 1j * body[..., 1]
    else:
        raise ValueError(f"unknown body form {rec['form']!r}")
    if sets.ndim != 3 or sets.shape[2] != h["N"]:
        raise ValueError(f"sequence length does not match N={h['N']}")
    return sets


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def write_family(family: SequenceFamily, path, exact: bool = True) -> Path:
    path = Path(path)
    path.write_text(_dump_json(family_to_record(family, exact)))
    return path


def read_family(path) -> SequenceFamily:
    """Parse a sequence file back into a :class:`SequenceFamily`.

    Construction data (index rows, phases) is rebuilt from the header when
    it names a theorem and parameters the generator accepts; sample values
    always come from the file.
    """
    rec = json.loads(Path(path).read_text())
    if rec.get("kind") != "sequence-family":
        raise ValueError("not a sequence-family file")
    sets = record_to_sets(rec)
    h = rec["header"]
    phases, A = [], h.get("index_matrix")
    if h.get("theorem"):
        try:
            ref = generate_family(h["theorem"], h["R"], h["T"], index_matrix=A)
            phases = ref.phases
        except ValueError:
            phases = []
    return SequenceFamily(
        sets,
        None if A is None else np.asarray(A, dtype=np.int64),
        phases,
        int(h["R"]),
        int(h["T"]),
        h.get("theorem"),
        h.get("q"),
        h.get("rows"),
        h.get("source", "file"),
        {"denominator": h.get("denominator"), "form": rec["form"]},
    )


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer, np.bool_)):
        return str(x.item())
    return "" if x is None else str(x)


def write_csv(rows, columns, path=None, comment: str | None = None) -> str:
    """Write dict rows as CSV with a header; returns the text."""
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def toolkit_version() -> str:
    try:
        v = metadata.version("zakzcz")
    except metadata.PackageNotFoundError:
        v = "0+unknown"
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).resolve().parent,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"{v}+g{desc}" if desc else v


def write_manifest(path, argv, config: dict, seed, outputs, started: datetime) -> Path:
    """Run manifest: command line, config echo, seed, version, timestamps, output digests."""
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "kind": "run-manifest",
        "command": list(argv),
        "config": config,
        "master_seed": seed,
        "toolkit_version": toolkit_version(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
        "started": started.isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
    }
    path = Path(path)
    path.write_text(_dump_json(manifest))
    return path
