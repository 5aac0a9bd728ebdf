"""PNG figures for the report command (non-interactive backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_convergence(rows, mu_lo, mu_hi, path) -> None:
    """Empirical ratio against m, one line per convergent index k."""
    fig, ax = plt.subplots(figsize=(6, 4))
    by_k = {}
    for r in rows:
        by_k.setdefault(r["k"], []).append((int(r["m"]), float(r["ratio"])))
    for k, pts in sorted(by_k.items(), key=lambda kv: (kv[0] is None, kv[0])):
        pts.sort()
        ax.plot([m for m, _ in pts], [v for _, v in pts], marker="o", label=f"k = {k}")
    if mu_lo is not None:
        ax.axhline(float(mu_lo), color="grey", linestyle="--", linewidth=1)
        if mu_hi is not None and mu_hi != mu_lo:
            ax.axhline(float(mu_hi), color="grey", linestyle=":", linewidth=1)
    ax.set_xlabel("m")
    ax.set_ylabel("-log|f(b) - p/q| / log|q|")
    ax.set_title("Empirical exponent of p_{k,m}(b)/q_{k,m}(b)")
    if by_k:
        ax.legend()
    _save(fig, path)


def plot_gap_trail(sequences, path) -> None:
    """log10 u_n and log10 v_n along each primitive sequence."""
    import math

    fig, ax = plt.subplots(figsize=(6, 4))
    for seq in sequences:
        trail = seq["trail"]
        ns = [n for n, (u, _) in enumerate(trail) if u > 0]
        ax.plot(ns, [math.log10(trail[n][0]) for n in ns], marker=".", label=f"u_n from {seq['start']}")
        ax.plot(range(len(trail)), [math.log10(v) for _, v in trail], linestyle="--", label=f"v_n from {seq['start']}")
    ax.set_xlabel("n")
    ax.set_ylabel("log10")
    ax.set_title("Primitive gap sequences")
    if sequences:
        ax.legend(fontsize="small")
    _save(fig, path)


def plot_degrees(degrees, path) -> None:
    """Successive ratios d_{k+1}/d_k of convergent denominator degrees."""
    fig, ax = plt.subplots(figsize=(6, 4))
    pts = [(k, degrees[k + 1] / degrees[k]) for k in range(len(degrees) - 1) if degrees[k] > 0]
    ax.plot([k for k, _ in pts], [r for _, r in pts], marker=".", linestyle="none")
    ax.set_xlabel("k")
    ax.set_ylabel("d_{k+1} / d_k")
    ax.set_title("Denominator degree ratios")
    _save(fig, path)
