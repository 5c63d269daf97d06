"""Static SVG figures and their CSV series.

Each figure is rendered from its series alone (``render_*`` takes exactly what
``read_*_csv`` returns), so the sidecar CSV regenerates the SVG byte for byte.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .distributions import BetaParams, beta_moments, beta_pdf  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "claimfreq"
matplotlib.rcParams["svg.fonttype"] = "path"
_SVG_META = {"Date": None, "Creator": None}


@dataclass(frozen=True)
class DensitySeries:
    label: str
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class QQSeries:
    label: str
    quantiles: np.ndarray
    observed: np.ndarray
    tn: float | None
    p_value: float | None


def density_domain(params: Sequence[BetaParams], width: float = 6.0) -> tuple[float, float]:
    """Union of ``[mean - width*sd, mean + width*sd]`` clipped to ``[0, 1]``."""
    lo, hi = 1.0, 0.0
    for p in params:
        mean, var = beta_moments(p)
        sd = math.sqrt(var)
        lo = min(lo, max(0.0, mean - width * sd))
        hi = max(hi, min(1.0, mean + width * sd))
    return lo, hi


def density_series(
    labelled: Sequence[tuple[str, BetaParams]], resolution: int = 512
) -> list[DensitySeries]:
    """Densities on a shared grid of cell midpoints, which never touch 0 or 1."""
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")
    lo, hi = density_domain([p for _, p in labelled])
    x = lo + (hi - lo) * (np.arange(resolution) + 0.5) / resolution
    return [DensitySeries(label, x, np.asarray(beta_pdf(x, p))) for label, p in labelled]


def format_number(value: float, places: int, locale: str = "c") -> str:
    text = f"{value:.{places}f}"
    return text.replace(".", ",") if locale == "de" else text


def qq_annotation(tn: float | None, p_value: float | None, locale: str = "c") -> str:
    parts = []
    if tn is not None:
        parts.append("$T_n$ = " + ("inf" if math.isinf(tn) else format_number(tn, 3, locale)))
    if p_value is not None:
        parts.append("p-value = " + format_number(100 * p_value, 2, locale) + "%")
    return "    ".join(parts)


def _svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return buf.getvalue()


def render_density(series: Sequence[DensitySeries], title: str = "Fitted Beta densities") -> str:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for s in series:
        ax.plot(s.x, s.y, label=s.label, linewidth=1.5)
    ax.set_xlabel("affected proportion")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.xaxis.set_major_formatter(matplotlib.ticker.PercentFormatter(xmax=1.0, decimals=1))
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _svg(fig)


def render_qq(series: QQSeries, locale: str = "c") -> str:
    fig, ax = plt.subplots(figsize=(5, 5))
    q, obs = series.quantiles, series.observed
    lo = float(min(q.min(), obs.min()))
    hi = float(max(q.max(), obs.max()))
    pad = 0.05 * (hi - lo if hi > lo else 1.0)
    ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], color="grey", linewidth=1)
    ax.scatter(q, obs, zorder=3)
    ax.set_xlim(lo - pad, hi + pad)
    ax.set_ylim(lo - pad, hi + pad)
    ax.set_xlabel("fitted Beta quantile")
    ax.set_ylabel("ordered observed proportion")
    ax.set_title(f"Q-Q plot, tariff {series.label}")
    ax.text(0.04, 0.95, qq_annotation(series.tn, series.p_value, locale),
            transform=ax.transAxes, va="top")
    ax.set_aspect("equal")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return _svg(fig)


# CSV sidecars: floats written with repr() so they read back bit-identically


def write_density_csv(series: Sequence[DensitySeries]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("series", "x", "density"))
    for s in series:
        for x, y in zip(s.x, s.y):
            w.writerow((s.label, repr(float(x)), repr(float(y))))
    return out.getvalue()


def read_density_csv(text: str) -> list[DensitySeries]:
    rows = list(csv.DictReader(io.StringIO(text)))
    order: list[str] = []
    cols: dict[str, tuple[list[float], list[float]]] = {}
    for r in rows:
        if r["series"] not in cols:
            order.append(r["series"])
            cols[r["series"]] = ([], [])
        cols[r["series"]][0].append(float(r["x"]))
        cols[r["series"]][1].append(float(r["density"]))
    return [DensitySeries(k, np.array(cols[k][0]), np.array(cols[k][1])) for k in order]


def _opt(value):
    return "" if value is None else repr(float(value))


def write_qq_csv(series: QQSeries) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("tariff", "k", "quantile", "observed", "tn", "p_value"))
    for k, (q, o) in enumerate(zip(series.quantiles, series.observed), start=1):
        w.writerow((series.label, k, repr(float(q)), repr(float(o)), _opt(series.tn), _opt(series.p_value)))
    return out.getvalue()


def read_qq_csv(text: str) -> QQSeries:
    rows = list(csv.DictReader(io.StringIO(text)))
    first = rows[0]
    return QQSeries(
        label=first["tariff"],
        quantiles=np.array([float(r["quantile"]) for r in rows]),
        observed=np.array([float(r["observed"]) for r in rows]),
        tn=float(first["tn"]) if first["tn"] else None,
        p_value=float(first["p_value"]) if first["p_value"] else None,
    )
