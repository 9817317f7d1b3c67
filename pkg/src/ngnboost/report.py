"""Report artifacts: result tables, confusion matrices and figures.

Every file name carries the config hash. CSVs are written with a fixed float
format and SVGs with a fixed hash salt and no date, so identical inputs give
identical files.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
import yaml  # noqa: E402

from .config import ExperimentConfig  # noqa: E402
from .exceptions import ReportError  # noqa: E402
from .fuzzifier import FuzzyThresholds  # noqa: E402
from .metrics import CellStats, ConfusionMatrix, ResultsTable  # noqa: E402
from .neuralgas import Codebook  # noqa: E402

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"
RESULTS_HEADER = ["classifier", "selector", "mean", "std", "runs"]


@dataclass(frozen=True)
class ReportArtifacts:
    """Inputs of every figure and audit file besides the results table."""

    config_hash: str
    class_names: tuple[str, ...]
    classifier_labels: dict[str, str]
    selector_labels: dict[str, str]
    reference_selector: str
    confusions: dict[str, ConfusionMatrix]
    pso_trace: Optional[tuple[float, ...]] = None
    feature_names: tuple[str, ...] = ()
    ngn_scores: Optional[np.ndarray] = field(default=None, repr=False)
    membership: Optional[pd.DataFrame] = field(default=None, repr=False)
    membership_feature: Optional[str] = None
    codebook: Optional[Codebook] = field(default=None, repr=False)
    thresholds: Optional[FuzzyThresholds] = field(default=None, repr=False)


def artifact_path(out_dir: str | Path, stem: str, config_hash: str, suffix: str) -> Path:
    return Path(out_dir) / f"{stem}-{config_hash}.{suffix}"


def _as_written(values) -> np.ndarray:
    """Values as they read back from a CSV written with FLOAT_FORMAT.

    Figures are drawn from these so a rebuilt report matches the original.
    """
    return np.array([float(FLOAT_FORMAT % v) for v in np.asarray(values, dtype=float)])


def _cell_values(stats: CellStats) -> tuple[str, str]:
    if stats.failed:
        return f"failed={stats.failed}", f"failed={stats.failed}"
    return f"{stats.mean:.6f}", f"{stats.std:.6f}"


def results_frame(results: ResultsTable) -> pd.DataFrame:
    rows = []
    for name in results.classifiers:
        for selector in results.selectors:
            stats = results.cell(name, selector)
            mean, std = _cell_values(stats)
            rows.append([name, selector, mean, std, stats.runs])
    return pd.DataFrame(rows, columns=RESULTS_HEADER)


def by_fraction_frame(results: ResultsTable) -> pd.DataFrame:
    rows = []
    for name in results.classifiers:
        for selector in results.selectors:
            for fraction in results.fractions:
                stats = results.by_fraction[(name, selector, fraction)]
                mean, std = _cell_values(stats)
                rows.append([name, selector, f"{fraction:g}", mean, std, stats.runs])
    return pd.DataFrame(rows, columns=["classifier", "selector", "fraction", "mean", "std", "runs"])


def results_text(results: ResultsTable, classifier_labels: dict[str, str], selector_labels: dict[str, str]) -> str:
    """Aligned table: an Avg and a STD row per classifier, one column per selector."""
    index = []
    rows = []
    for name in results.classifiers:
        cells = [results.cell(name, selector) for selector in results.selectors]
        values = [_cell_values(stats) for stats in cells]
        index.extend([(classifier_labels.get(name, name), "Avg"), (classifier_labels.get(name, name), "STD")])
        rows.append([mean for mean, _ in values])
        rows.append([std for _, std in values])
    frame = pd.DataFrame(
        rows,
        index=pd.MultiIndex.from_tuples(index, names=["Classifier", ""]),
        columns=[selector_labels.get(selector, selector) for selector in results.selectors],
    )
    return frame.to_string() + "\n"


def _save_svg(fig: plt.Figure, path: Path, config_hash: str) -> Path:
    with matplotlib.rc_context({"svg.hashsalt": config_hash}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_pso_trace(trace: tuple[float, ...], path: Path, config_hash: str) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(np.arange(1, len(trace) + 1), trace, marker=".", linewidth=1.2)
    ax.set_xlabel("Iteration")
    ax.set_ylabel("Best cost (1 - accuracy)")
    ax.set_title("PSO best cost")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save_svg(fig, path, config_hash)


def plot_ngn_scores(frame: pd.DataFrame, path: Path, config_hash: str) -> Path:
    fig, ax = plt.subplots(figsize=(max(6, 0.3 * len(frame)), 4))
    ax.bar(np.arange(len(frame)), frame["score"].to_numpy())
    ax.set_xticks(np.arange(len(frame)))
    ax.set_xticklabels(frame["feature"].tolist(), rotation=90)
    ax.set_ylabel("Codebook variance")
    ax.set_title("Neural gas feature ranking")
    fig.tight_layout()
    return _save_svg(fig, path, config_hash)


def plot_membership(frame: pd.DataFrame, feature: str, path: Path, config_hash: str) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for column, name in (("mu_low", "low"), ("mu_med", "medium"), ("mu_high", "high")):
        ax.plot(frame["x"], frame[column], label=name)
    ax.set_xlabel(f"{feature} (standardized)")
    ax.set_ylabel("Membership")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.set_title(f"Membership functions of {feature}")
    fig.tight_layout()
    return _save_svg(fig, path, config_hash)


def plot_confusion(matrix: ConfusionMatrix, class_names: tuple[str, ...], title: str, path: Path, config_hash: str) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4.5))
    ax.imshow(matrix.counts, cmap="Blues")
    ticks = np.arange(len(class_names))
    ax.set_xticks(ticks)
    ax.set_yticks(ticks)
    ax.set_xticklabels(class_names, rotation=45, ha="right")
    ax.set_yticklabels(class_names)
    ax.set_xlabel("Predicted")
    ax.set_ylabel("True")
    for i in ticks:
        for j in ticks:
            ax.text(j, i, str(int(matrix.counts[i, j])), ha="center", va="center")
    ax.set_title(title)
    fig.tight_layout()
    return _save_svg(fig, path, config_hash)


def ngn_scores_frame(scores: np.ndarray, feature_names: tuple[str, ...]) -> pd.DataFrame:
    order = np.argsort(-np.asarray(scores), kind="stable")
    return pd.DataFrame(
        {
            "rank": np.arange(len(order)),
            "index": order,
            "feature": [feature_names[i] for i in order],
            "score": np.asarray(scores)[order],
        }
    )


def write_pso_trace(trace: tuple[float, ...], out_dir: str | Path, config_hash: str) -> list[Path]:
    """Trace CSV (iteration, best_cost) and its line plot."""
    csv_path = artifact_path(out_dir, "pso-trace", config_hash, "csv")
    trace = tuple(_as_written(trace))
    frame = pd.DataFrame({"iteration": np.arange(1, len(trace) + 1), "best_cost": list(trace)})
    try:
        frame.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT)
        svg_path = plot_pso_trace(trace, artifact_path(out_dir, "pso-trace", config_hash, "svg"), config_hash)
    except OSError as e:
        raise ReportError(f"Cannot write PSO trace to {out_dir}: {e}") from e
    return [csv_path, svg_path]


def write_config(config: ExperimentConfig, out_dir: str | Path) -> Path:
    """The resolved configuration, loadable with load_config."""
    path = artifact_path(out_dir, "config", config.config_hash(), "yaml")
    try:
        path.write_text(yaml.safe_dump(config.to_dict(), sort_keys=False), encoding="utf-8")
    except OSError as e:
        raise ReportError(f"Cannot write config to {out_dir}: {e}") from e
    return path


def report(results: ResultsTable, artifacts: ReportArtifacts, out_dir: str | Path) -> list[Path]:
    """
    Write every report artifact of one experiment.

    Returns the written paths. Figures whose inputs are absent from
    `artifacts` are skipped.
    """
    out_dir = Path(out_dir)
    h = artifacts.config_hash
    paths: list[Path] = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)

        path = artifact_path(out_dir, "results", h, "csv")
        results_frame(results).to_csv(path, index=False)
        paths.append(path)

        path = artifact_path(out_dir, "results", h, "txt")
        path.write_text(results_text(results, artifacts.classifier_labels, artifacts.selector_labels), encoding="utf-8")
        paths.append(path)

        path = artifact_path(out_dir, "results-by-fraction", h, "csv")
        by_fraction_frame(results).to_csv(path, index=False)
        paths.append(path)

        for name, matrix in artifacts.confusions.items():
            frame = pd.DataFrame(matrix.counts, index=list(artifacts.class_names), columns=list(artifacts.class_names))
            path = artifact_path(out_dir, f"confusion-{name}", h, "csv")
            frame.to_csv(path, index_label="true\\predicted")
            paths.append(path)
            title = (
                f"{artifacts.classifier_labels.get(name, name)} / "
                f"{artifacts.selector_labels.get(artifacts.reference_selector, artifacts.reference_selector)}"
            )
            paths.append(
                plot_confusion(matrix, artifacts.class_names, title, artifact_path(out_dir, f"confusion-{name}", h, "svg"), h)
            )

        if artifacts.pso_trace is not None:
            paths.extend(write_pso_trace(artifacts.pso_trace, out_dir, h))

        if artifacts.ngn_scores is not None:
            frame = ngn_scores_frame(_as_written(artifacts.ngn_scores), artifacts.feature_names)
            path = artifact_path(out_dir, "ngn-scores", h, "csv")
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
            paths.append(path)
            paths.append(plot_ngn_scores(frame, artifact_path(out_dir, "ngn-scores", h, "svg"), h))

        if artifacts.membership is not None:
            feature = artifacts.membership_feature or ""
            curves = artifacts.membership[["x", "mu_low", "mu_med", "mu_high"]].apply(_as_written)
            frame = curves.copy()
            frame.insert(0, "feature", feature)
            path = artifact_path(out_dir, "membership", h, "csv")
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
            paths.append(path)
            paths.append(plot_membership(curves, feature, artifact_path(out_dir, "membership", h, "svg"), h))

        if artifacts.codebook is not None:
            paths.append(artifacts.codebook.to_csv(artifact_path(out_dir, "codebook", h, "csv"), artifacts.feature_names))

        if artifacts.thresholds is not None:
            paths.append(
                artifacts.thresholds.to_csv(artifact_path(out_dir, "thresholds", h, "csv"), artifacts.feature_names)
            )
    except OSError as e:
        raise ReportError(f"Cannot write report to {out_dir}: {e}") from e

    for path in paths:
        logger.info(f"Wrote {path}")
    return paths


def read_figure_inputs(results_dir: str | Path, config_hash: str) -> dict:
    """PSO trace, neural gas scores and membership samples from earlier CSVs, when present."""
    results_dir = Path(results_dir)
    inputs: dict = {}

    path = artifact_path(results_dir, "pso-trace", config_hash, "csv")
    if path.exists():
        inputs["pso_trace"] = tuple(float(v) for v in pd.read_csv(path, float_precision="round_trip")["best_cost"])

    path = artifact_path(results_dir, "ngn-scores", config_hash, "csv")
    if path.exists():
        frame = pd.read_csv(path, float_precision="round_trip").sort_values("index")
        inputs["ngn_scores"] = frame["score"].to_numpy(dtype=float)
        inputs["feature_names"] = tuple(str(name) for name in frame["feature"])

    path = artifact_path(results_dir, "membership", config_hash, "csv")
    if path.exists():
        frame = pd.read_csv(path, dtype={"feature": str}, keep_default_na=False, float_precision="round_trip")
        inputs["membership_feature"] = str(frame["feature"].iloc[0]) if len(frame) else None
        inputs["membership"] = frame.drop(columns=["feature"])
    return inputs
