"""Render simulator CSV datasets into figure images.

Input is a figure spec (JSON) naming the dataset CSV, the run manifest that
recorded its checksum, the figure kind, and the output basename.  Rendering
never recomputes physics: pixel data derives only from CSV values.  A CSV
whose bytes no longer match the manifest checksum is refused, and all
validation happens before any output file is created.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402


class FigureSpecError(ValueError):
    """Malformed spec, missing files or columns, or unknown figure kind."""


class ChecksumMismatchError(ValueError):
    """CSV bytes disagree with the checksum the run manifest recorded."""


# Caption roles drive the curve styling so the identity of every line is
# auditable: (column, style, legend label).
FIGURE_KINDS = {
    "transverse-triple": {
        "x_column": "x_mm",
        "x_label": "x (mm)",
        "y_label": "transverse distribution",
        "roles": [
            ("gaussian_sq", {"color": "red", "linestyle": "-"},
             "input Gaussian profile"),
            ("reshaped_literal_sq", {"color": "black", "linestyle": "--"},
             "first-order reshaped wavepacket"),
            ("postselected_norm", {"color": "green", "linestyle": "-."},
             "normalized postselected distribution"),
        ],
    },
    "momentum-split": {
        "x_column": "k_x_per_m",
        "x_label": "k_x (1/m)",
        "y_label": "|E(k_x)|^2",
        "roles": [
            ("intensity_plus", {"color": "tab:blue", "linestyle": "-"},
             "sigma+ component"),
            ("intensity_minus", {"color": "tab:orange", "linestyle": "--"},
             "sigma- component"),
        ],
    },
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    csv_path: Path
    manifest_path: Path
    out_base: Path
    labels: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise FigureSpecError(
                f"kind must be one of {sorted(FIGURE_KINDS)}, got {self.kind!r}")


def load_spec(path: str | Path) -> FigureSpec:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FigureSpecError(f"cannot read spec {path}: {exc}") from exc
    try:
        kind = raw["kind"]
        csv_path = Path(raw["csv"])
        manifest_path = Path(raw["manifest"])
        out_base = Path(raw["out"])
    except KeyError as exc:
        raise FigureSpecError(f"spec {path} is missing required key {exc}") from exc
    base = path.parent
    return FigureSpec(
        kind=kind,
        csv_path=csv_path if csv_path.is_absolute() else base / csv_path,
        manifest_path=manifest_path if manifest_path.is_absolute() else base / manifest_path,
        out_base=out_base if out_base.is_absolute() else base / out_base,
        labels=raw.get("labels", {}),
    )


def verify_checksum(csv_path: Path, manifest_path: Path) -> None:
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FigureSpecError(f"cannot read manifest {manifest_path}: {exc}") from exc
    entry = manifest.get("files", {}).get(csv_path.name)
    if entry is None or "sha256" not in entry:
        raise FigureSpecError(
            f"manifest {manifest_path} has no checksum entry for {csv_path.name}")
    try:
        digest = hashlib.sha256(csv_path.read_bytes()).hexdigest()
    except OSError as exc:
        raise FigureSpecError(f"cannot read dataset {csv_path}: {exc}") from exc
    if digest != entry["sha256"]:
        raise ChecksumMismatchError(
            f"{csv_path.name}: sha256 {digest} does not match manifest "
            f"record {entry['sha256']}")


def load_columns(csv_path: Path, wanted: list[str]) -> dict[str, np.ndarray]:
    """Parse and fully validate the needed columns before any output exists."""
    try:
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise FigureSpecError(f"{csv_path.name} is empty")
            missing = [c for c in wanted if c not in header]
            if missing:
                raise FigureSpecError(
                    f"{csv_path.name} lacks column(s) {missing}; has {header}")
            index = {c: header.index(c) for c in wanted}
            data: dict[str, list[float]] = {c: [] for c in wanted}
            for line_no, row in enumerate(reader, start=2):
                for c in wanted:
                    try:
                        data[c].append(float(row[index[c]]))
                    except (IndexError, ValueError) as exc:
                        raise FigureSpecError(
                            f"{csv_path.name}:{line_no}: bad value for "
                            f"{c!r}") from exc
    except OSError as exc:
        raise FigureSpecError(f"cannot read dataset {csv_path}: {exc}") from exc
    if not data[wanted[0]]:
        raise FigureSpecError(f"{csv_path.name} has no data rows")
    return {c: np.asarray(v) for c, v in data.items()}


def render(spec: FigureSpec) -> tuple[Path, Path]:
    """Validate checksum and columns, then emit out.svg and out.png."""
    verify_checksum(spec.csv_path, spec.manifest_path)
    layout = FIGURE_KINDS[spec.kind]
    x_column = layout["x_column"]
    columns = [x_column] + [role[0] for role in layout["roles"]]
    data = load_columns(spec.csv_path, columns)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        for column, style, label in layout["roles"]:
            ax.plot(data[x_column], data[column], label=label, linewidth=1.4, **style)
        ax.set_xlabel(spec.labels.get("x", layout["x_label"]))
        ax.set_ylabel(spec.labels.get("y", layout["y_label"]))
        if "title" in spec.labels:
            ax.set_title(spec.labels["title"])
        ax.legend(frameon=False, fontsize=9)
        fig.tight_layout()
        spec.out_base.parent.mkdir(parents=True, exist_ok=True)
        svg = spec.out_base.with_suffix(".svg")
        png = spec.out_base.with_suffix(".png")
        fig.savefig(svg)
        fig.savefig(png, dpi=150)
    finally:
        plt.close(fig)
    return svg, png
