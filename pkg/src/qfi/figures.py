"""Figure rendering for the command-line report paths.

The CSV is the data contract; these PNGs are the human-facing view written
next to it.  Everything is rendered off-screen (Agg) with empty metadata so
repeated runs produce stable files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_RC = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={})
    plt.close(fig)
    return str(path)


def render_sweep(points, param_name: str, path, model: str = "") -> str:
    """Plot swept quantities against the parameter grid.

    ``points`` is a list of ``(param_value, quantity, value)`` with values
    already numeric; error markers are drawn for quantities beginning with
    ``error/``.
    """
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        by_q = {}
        errors = []
        for x, q, v in points:
            if q.startswith("error/"):
                errors.append(x)
            else:
                by_q.setdefault(q, []).append((x, v))
        for q in sorted(by_q):
            xs, vs = zip(*sorted(by_q[q]))
            ax.plot(xs, vs, marker="o", markersize=3, label=q)
        for i, x in enumerate(errors):
            ax.axvline(x, color="crimson", ls=":", lw=1,
                       label="error" if i == 0 else None)
        ax.set_xlabel(param_name)
        ax.set_ylabel("value")
        title = f"sweep over {param_name}"
        if model:
            title += f" ({model})"
        ax.set_title(title)
        ax.legend(loc="best", fontsize=8)
        return _save(fig, path)


def render_locality(report, path, model: str = "") -> str:
    """Two panels: the Hilbert-Schmidt growth curve and the window
    commutator profile, annotated with the membership verdicts."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
        if report.hs_curve:
            rs, vs = zip(*report.hs_curve)
            ax1.plot(rs, vs, marker=".", color="tab:blue")
        ax1.set_xlabel("radius")
        ax1.set_ylabel("HS norm inside ball")
        ax1.set_title("local equivalence curve")

        if report.commutator_profile:
            labels, norms = zip(*report.commutator_profile)
            pos = range(len(labels))
            ax2.bar(pos, norms, color="tab:orange")
            ax2.set_xticks(list(pos))
            ax2.set_xticklabels(labels, rotation=30, ha="right", fontsize=7)
        ax2.set_ylabel("||[p_W, T]||")
        ax2.set_title(f"window commutators (propagation "
                      f"{report.propagation_radius:g})")

        verdict_txt = ", ".join(
            f"{k}: {'yes' if v else 'no'}" for k, v in
            sorted(report.verdicts.items())
        )
        fig.suptitle((model + " — " if model else "") + verdict_txt,
                     fontsize=8)
        return _save(fig, path)


def render_verify(rows, path) -> str:
    """Log-scale residual chart of the self-check suite against its
    tolerances; ``rows`` is a list of ``(name, residual, tolerance)``."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7.0, 0.5 + 0.45 * max(1, len(rows))))
        names = [r[0] for r in rows]
        residuals = [max(r[1], 1e-18) for r in rows]
        tols = [r[2] for r in rows]
        pos = range(len(rows))
        colors = ["tab:green" if r <= t else "crimson"
                  for r, t in zip(residuals, tols)]
        ax.barh(list(pos), residuals, color=colors)
        for p, t in zip(pos, tols):
            ax.plot([t, t], [p - 0.4, p + 0.4], color="black", lw=1.2)
        ax.set_yticks(list(pos))
        ax.set_yticklabels(names, fontsize=8)
        ax.set_xscale("log")
        ax.set_xlabel("residual (bar) vs tolerance (tick)")
        ax.set_title("verification suite")
        ax.invert_yaxis()
        return _save(fig, path)
