"""Run configuration, CSV datasets and static SVG plots.

Configs are JSON documents; every run is reproducible from its config
alone.  CSV output uses a fixed header and 12-significant-digit floats and
is byte-identical across runs and thread counts.  Plots are plain SVG 1.1
text with no external assets, so they diff cleanly in version control.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .experiments import SweepResult, run_sweep
from .model import PARTITION_ORDER, PARTITIONS, Scenario, SpectralDensity

CSV_HEADER = "time,partition,pipeline,mutual_info,classical,quantum,concurrence,measured_side"

PIPELINE_NAMES = {"closed": "closed_form", "brute": "brute_force", "both": "both"}

AUDIT_TOGGLES = ("agreement", "asymptotics", "square_sums")

_TOP_KEYS = {
    "family", "alpha_re", "alpha_im", "beta_re", "beta_im", "spectral",
    "time_start", "time_end", "time_steps", "partitions", "pipeline",
    "out_dir", "grid", "refine_iters", "side", "svg", "audits",
}

_SPECTRAL_KEYS = {"kind", "gamma", "W", "lambda"}


@dataclass(frozen=True)
class RunConfig:
    """Validated scenario + optimiser + output settings for one run."""

    family: str
    alpha: complex
    beta: complex
    spectral: SpectralDensity
    time_start: float = 0.0
    time_end: float = 5.0
    time_steps: int = 101
    partitions: tuple = PARTITION_ORDER
    pipeline: str = "both"
    out_dir: str | None = None
    grid: int = 64
    refine_iters: int = 4
    side: str = "second"
    svg: bool = False
    audits: tuple = AUDIT_TOGGLES

    def scenario(self) -> Scenario:
        raw = np.linspace(self.time_start, self.time_end, self.time_steps)
        return Scenario(
            family=self.family,
            alpha=self.alpha,
            beta=self.beta,
            spectral=self.spectral,
            time_grid=raw * self.spectral.rate,
        )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Unknown keys are rejected by name; invariant violations name the field
    and the constraint.  Weight amplitudes off unit norm by less than 1e-6
    are renormalised, anything further off is rejected.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ValueError("config: top level must be an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ValueError(f"config: unknown key {sorted(unknown)[0]!r}")

    family = doc.get("family")
    if family not in ("two_exc", "one_exc"):
        raise ValueError(f"config: family must be 'two_exc' or 'one_exc', got {family!r}")

    alpha = complex(float(doc.get("alpha_re", 0.0)), float(doc.get("alpha_im", 0.0)))
    beta = complex(float(doc.get("beta_re", 0.0)), float(doc.get("beta_im", 0.0)))
    norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    if abs(norm - 1.0) >= 1e-6:
        raise ValueError(
            f"config: alpha/beta norm is {norm!r}; |alpha|^2 + |beta|^2 must equal 1 within 1e-6"
        )
    alpha /= norm
    beta /= norm

    spec_doc = doc.get("spectral")
    if not isinstance(spec_doc, dict):
        raise ValueError("config: spectral must be an object with a 'kind'")
    unknown = set(spec_doc) - _SPECTRAL_KEYS
    if unknown:
        raise ValueError(f"config: unknown spectral key {sorted(unknown)[0]!r}")
    kind = spec_doc.get("kind")
    if kind == "flat":
        if "W" in spec_doc or "lambda" in spec_doc:
            raise ValueError("config: flat spectral density takes only 'gamma'")
        spectral = SpectralDensity(kind="flat", gamma=float(spec_doc.get("gamma", 0.0)))
    elif kind == "lorentz":
        if "gamma" in spec_doc:
            raise ValueError("config: lorentz spectral density takes 'W' and 'lambda', not 'gamma'")
        spectral = SpectralDensity(
            kind="lorentz", W=float(spec_doc.get("W", 0.0)), lam=float(spec_doc.get("lambda", 0.0))
        )
    else:
        raise ValueError(f"config: spectral.kind must be 'flat' or 'lorentz', got {kind!r}")

    time_start = float(doc.get("time_start", 0.0))
    time_end = float(doc.get("time_end", 5.0))
    time_steps = int(doc.get("time_steps", 101))
    if time_steps < 2:
        raise ValueError(f"config: time_steps is {time_steps}; must be >= 2")
    if not time_end > time_start:
        raise ValueError("config: time_end must exceed time_start")
    if time_start < 0.0:
        raise ValueError("config: time_start must be >= 0")

    partitions = tuple(doc.get("partitions", PARTITION_ORDER))
    for p in partitions:
        if p not in PARTITIONS:
            raise ValueError(f"config: unknown partition {p!r}")
    if len(partitions) != len(set(partitions)):
        raise ValueError("config: partitions must be unique")
    if not partitions:
        raise ValueError("config: partitions must not be empty")

    pipeline = doc.get("pipeline", "both")
    if pipeline not in PIPELINE_NAMES:
        raise ValueError(f"config: pipeline must be one of {sorted(PIPELINE_NAMES)}, got {pipeline!r}")

    grid = int(doc.get("grid", 64))
    refine_iters = int(doc.get("refine_iters", 4))
    if grid < 2:
        raise ValueError(f"config: grid is {grid}; must be >= 2")
    if refine_iters < 0:
        raise ValueError(f"config: refine_iters is {refine_iters}; must be >= 0")

    side = doc.get("side", "second")
    if side not in ("first", "second"):
        raise ValueError(f"config: side must be 'first' or 'second', got {side!r}")

    svg = doc.get("svg", False)
    if not isinstance(svg, bool):
        raise ValueError("config: svg must be a boolean")

    audits_doc = doc.get("audits", {name: True for name in AUDIT_TOGGLES})
    if not isinstance(audits_doc, dict):
        raise ValueError("config: audits must be an object of boolean toggles")
    unknown = set(audits_doc) - set(AUDIT_TOGGLES)
    if unknown:
        raise ValueError(f"config: unknown audit toggle {sorted(unknown)[0]!r}")
    audits = tuple(name for name in AUDIT_TOGGLES if audits_doc.get(name, True))

    out_dir = doc.get("out_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ValueError("config: out_dir must be a string path")

    return RunConfig(
        family=family, alpha=alpha, beta=beta, spectral=spectral,
        time_start=time_start, time_end=time_end, time_steps=time_steps,
        partitions=partitions, pipeline=pipeline, out_dir=out_dir,
        grid=grid, refine_iters=refine_iters, side=side, svg=svg, audits=audits,
    )


def serialize_config(cfg: RunConfig) -> str:
    """Canonical JSON for a RunConfig; parse_config inverts it exactly."""
    spectral: dict = {"kind": cfg.spectral.kind}
    if cfg.spectral.kind == "flat":
        spectral["gamma"] = cfg.spectral.gamma
    else:
        spectral["W"] = cfg.spectral.W
        spectral["lambda"] = cfg.spectral.lam
    doc = {
        "family": cfg.family,
        "alpha_re": cfg.alpha.real, "alpha_im": cfg.alpha.imag,
        "beta_re": cfg.beta.real, "beta_im": cfg.beta.imag,
        "spectral": spectral,
        "time_start": cfg.time_start, "time_end": cfg.time_end, "time_steps": cfg.time_steps,
        "partitions": list(cfg.partitions),
        "pipeline": cfg.pipeline,
        "grid": cfg.grid, "refine_iters": cfg.refine_iters,
        "side": cfg.side, "svg": cfg.svg,
        "audits": {name: (name in cfg.audits) for name in AUDIT_TOGGLES},
    }
    if cfg.out_dir is not None:
        doc["out_dir"] = cfg.out_dir
    return json.dumps(doc, indent=2, sort_keys=True)


def _atomic_write(path: Path, data: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit_csv(result: SweepResult, path) -> Path:
    """Write a sweep as CSV with a fixed schema and deterministic bytes."""
    rows = sorted(result.records, key=lambda r: (r.time, r.partition, r.pipeline))
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                (
                    _fmt(r.time), r.partition, r.pipeline,
                    _fmt(r.mutual_info), _fmt(r.classical), _fmt(r.quantum),
                    _fmt(r.concurrence), r.measured_side,
                )
            )
        )
    _atomic_write(Path(path), "\n".join(lines) + "\n")
    return Path(path)


# ---------------------------------------------------------------------------
# SVG rendering.
# ---------------------------------------------------------------------------

_PANEL_PARTITIONS = ("s1s2", "r1r2", "s1r1", "s1r2")

_PRIMARY_STYLE = {"quantum": ("#2040c8", "diamond"), "classical": ("#c030b8", "square")}
_OVERLAY_STYLE = {"quantum": ("#303030", "triangle"), "classical": ("#d03030", "circle")}


def _series_points(result: SweepResult, partition: str, measure: str):
    pipes = {r.pipeline for r in result.records}
    pipe = "brute_force" if "brute_force" in pipes else "closed_form"
    pts = [
        (r.time, getattr(r, measure))
        for r in result.records
        if r.partition == partition and r.pipeline == pipe
    ]
    return sorted(pts)


def _marker(shape: str, x: float, y: float, color: str, size: float = 3.2) -> str:
    s = size
    if shape == "diamond":
        p = f"{x:.2f},{y - s:.2f} {x + s:.2f},{y:.2f} {x:.2f},{y + s:.2f} {x - s:.2f},{y:.2f}"
        return f'<polygon points="{p}" fill="{color}"/>'
    if shape == "square":
        return f'<rect x="{x - s:.2f}" y="{y - s:.2f}" width="{2 * s:.2f}" height="{2 * s:.2f}" fill="{color}"/>'
    if shape == "triangle":
        p = f"{x:.2f},{y - s:.2f} {x + s:.2f},{y + s:.2f} {x - s:.2f},{y + s:.2f}"
        return f'<polygon points="{p}" fill="{color}"/>'
    return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{s:.2f}" fill="{color}"/>'


def emit_svg_plot(result: SweepResult, measure_set, path, overlay: SweepResult | None = None) -> Path:
    """Render a 2x2-panel static SVG of the sweep.

    Panels follow the spin pair, the reservoir pair and the two mixed
    spin/reservoir pairs in that order, restricted to partitions the sweep
    actually covers.  An optional second sweep is overlaid with its own
    marker family, matching the two-initial-state layout of the reference
    figures.  Single-point series degenerate to markers with no path.
    """
    if not result.records:
        raise ValueError("emit_svg_plot: empty record set")
    measures = tuple(measure_set)
    panels = [p for p in _PANEL_PARTITIONS if any(r.partition == p for r in result.records)]
    if not panels:
        panels = [p for p in PARTITION_ORDER if any(r.partition == p for r in result.records)]
    panels = panels[:4]

    width, height = 880, 640
    pw, ph = 380, 250
    x0s = (70, 70 + pw + 60)
    y0s = (50, 50 + ph + 70)
    time_label = "gamma*t" if result.scenario.spectral.kind == "flat" else "lambda*t"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    legend = "Q: filled diamonds / C: filled squares"
    if overlay is not None:
        legend += "; overlay Q: triangles / C: circles"
    out.append(f'<text x="70" y="20" font-size="12">{legend}</text>')

    all_times = [r.time for r in result.records]
    tmin, tmax = min(all_times), max(all_times)
    span_t = tmax - tmin if tmax > tmin else 1.0

    for i, part in enumerate(panels):
        x0 = x0s[i % 2]
        y0 = y0s[i // 2]
        sources = [(result, _PRIMARY_STYLE)]
        if overlay is not None:
            sources.append((overlay, _OVERLAY_STYLE))
        ymax = 0.0
        for src, _ in sources:
            for meas in measures:
                pts = _series_points(src, part, meas)
                if pts:
                    ymax = max(ymax, max(v for _, v in pts))
        ymax = max(ymax, 1e-12) * 1.08

        def sx(t):
            return x0 + (t - tmin) / span_t * pw

        def sy(v):
            return y0 + ph - v / ymax * ph

        out.append(
            f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="#404040"/>'
        )
        out.append(f'<text x="{x0 + 4}" y="{y0 + 14}">{part}</text>')
        for k in range(5):
            tv = tmin + span_t * k / 4
            yv = ymax / 1.08 * k / 4
            out.append(
                f'<text x="{sx(tv):.2f}" y="{y0 + ph + 16}" text-anchor="middle">{tv:.3g}</text>'
            )
            out.append(
                f'<text x="{x0 - 6}" y="{sy(yv) + 4:.2f}" text-anchor="end">{yv:.3g}</text>'
            )
        out.append(
            f'<text x="{x0 + pw / 2:.2f}" y="{y0 + ph + 34}" text-anchor="middle">{time_label}</text>'
        )
        out.append(
            f'<text x="{x0 - 52}" y="{y0 + ph / 2:.2f}" transform="rotate(-90 {x0 - 52} {y0 + ph / 2:.2f})" '
            f'text-anchor="middle">bits</text>'
        )

        for src, style in sources:
            for meas in measures:
                pts = _series_points(src, part, meas)
                if not pts:
                    continue
                color, shape = style.get(meas, ("#208020", "circle"))
                if len(pts) >= 2:
                    d = "M " + " L ".join(f"{sx(t):.2f} {sy(v):.2f}" for t, v in pts)
                    out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>')
                stride = max(1, len(pts) // 24)
                for t, v in pts[::stride]:
                    out.append(_marker(shape, sx(t), sy(v), color))

    out.append("</svg>")
    _atomic_write(Path(path), "\n".join(out) + "\n")
    return Path(path)


# ---------------------------------------------------------------------------
# Built-in figure scenarios.
# ---------------------------------------------------------------------------

_BELL = (2.0 ** -0.5, 2.0 ** -0.5)
_LOPSIDED = (10.0 ** -0.5, 3.0 * 10.0 ** -0.5)
_RATIO = math.sqrt(200.0)

FIGURE_CONFIGS = {
    "flat_two_excitation": {
        "family": "two_exc", "spectral": {"kind": "flat", "gamma": 1.0},
        "time_end": 5.0,
    },
    "lorentz_two_excitation": {
        "family": "two_exc", "spectral": {"kind": "lorentz", "W": _RATIO, "lambda": 1.0},
        "time_end": 2.0,
    },
    "flat_one_excitation": {
        "family": "one_exc", "spectral": {"kind": "flat", "gamma": 1.0},
        "time_end": 5.0,
    },
    "lorentz_one_excitation": {
        "family": "one_exc", "spectral": {"kind": "lorentz", "W": _RATIO, "lambda": 1.0},
        "time_end": 2.0,
    },
}


def figure_config(name: str, weights: tuple[float, float] = _BELL, **overrides) -> RunConfig:
    """RunConfig for one built-in figure scenario.

    ``weights`` selects the initial amplitudes: the Bell pair by default,
    or the lopsided (1/sqrt(10), 3/sqrt(10)) pair used for the second
    curve family of every reference figure.
    """
    if name not in FIGURE_CONFIGS:
        raise ValueError(f"figure_config: unknown figure {name!r}")
    base = FIGURE_CONFIGS[name]
    doc = {
        "family": base["family"],
        "alpha_re": weights[0], "beta_re": weights[1],
        "spectral": dict(base["spectral"]),
        "time_start": 0.0, "time_end": base["time_end"],
        "time_steps": overrides.pop("time_steps", 81),
        "partitions": list(_PANEL_PARTITIONS),
        "pipeline": "both",
        "grid": overrides.pop("grid", 32),
        "refine_iters": overrides.pop("refine_iters", 3),
    }
    doc.update(overrides)
    return parse_config(json.dumps(doc))


def emit_figures(out_dir, workers: int = 1, **overrides) -> list[Path]:
    """Compute and write the four built-in figure datasets and plots.

    Each figure yields one CSV (the Bell-state sweep) and one SVG with the
    lopsided-weights sweep overlaid.  Output bytes depend only on the
    configs, not on ``workers``.
    """
    out_dir = Path(out_dir)
    paths: list[Path] = []
    for name in FIGURE_CONFIGS:
        cfg = figure_config(name, _BELL, **dict(overrides))
        cfg_overlay = figure_config(name, _LOPSIDED, **dict(overrides))
        res = run_sweep(
            cfg.scenario(), cfg.partitions, PIPELINE_NAMES[cfg.pipeline],
            side=cfg.side, grid=cfg.grid, refine_iters=cfg.refine_iters, workers=workers,
        )
        res_overlay = run_sweep(
            cfg_overlay.scenario(), cfg_overlay.partitions, PIPELINE_NAMES[cfg_overlay.pipeline],
            side=cfg_overlay.side, grid=cfg_overlay.grid,
            refine_iters=cfg_overlay.refine_iters, workers=workers,
        )
        paths.append(emit_csv(res, out_dir / f"{name}.csv"))
        paths.append(
            emit_svg_plot(res, ("quantum", "classical"), out_dir / f"{name}.svg", overlay=res_overlay)
        )
    return paths
