"""CSV trace files and JSON run manifests.

Floats are written with repr (shortest round-trip form) and manifests in
a canonical JSON layout, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .optimize import DescentTrace
from .sae import SaeTrace


def bench_header(dim: int, n_components: int) -> list[str]:
    return (
        ["iter"]
        + [f"x_{i + 1}" for i in range(dim)]
        + [f"loss_{k + 1}" for k in range(n_components)]
        + [f"alpha_{k + 1}" for k in range(n_components)]
        + ["eta", "tloss", "wloss"]
    )


SAE_HEADER = ["epoch", "mse", "l1", "alpha_mse", "alpha_l1", "tloss"]


def write_bench_trace(path: Path | str, trace: DescentTrace) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dim = trace.xs.shape[1]
    m = trace.losses.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(bench_header(dim, m))
        for i in range(trace.n_records):
            row = (
                [str(i)]
                + [repr(float(v)) for v in trace.xs[i]]
                + [repr(float(v)) for v in trace.losses[i]]
                + [repr(float(v)) for v in trace.alphas[i]]
                + [repr(float(trace.etas[i])), repr(float(trace.tloss[i])), repr(float(trace.wloss[i]))]
            )
            writer.writerow(row)


def write_sae_trace(path: Path | str, trace: SaeTrace) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SAE_HEADER)
        for i in range(trace.epochs):
            writer.writerow(
                [str(i + 1)]
                + [
                    repr(float(v))
                    for v in (
                        trace.mse[i],
                        trace.l1[i],
                        trace.alpha_mse[i],
                        trace.alpha_l1[i],
                        trace.tloss[i],
                    )
                ]
            )


def read_trace(path: Path | str) -> dict[str, list[float]]:
    """Columns of a trace CSV keyed by header name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise ValueError(f"malformed trace row in {path}: {row!r}")
            for name, cell in zip(header, row):
                columns[name].append(float(cell))
    return columns


def manifest_path_for(trace_path: Path | str) -> Path:
    p = Path(trace_path)
    return p.with_name(p.stem + ".manifest.json")


def dump_manifest(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"


def write_manifest(path: Path | str, manifest: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_manifest(manifest))


def read_manifest(path: Path | str) -> dict:
    return json.loads(Path(path).read_text())
