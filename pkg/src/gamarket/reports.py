"""CSV report emission with atomic replacement and a manifest.

All files for a run are first written as temporaries in the target
directory and then renamed into place, so a rerun replaces prior outputs
without ever exposing a partially written file.  The manifest lists every
emitted data file with its line count.
"""

from __future__ import annotations

import os

from .bench import BenchmarkResult
from .config import resolved_text
from .simulation import RunOutput

MANIFEST_NAME = "manifest"


def _render_networth(output: RunOutput) -> str:
    lines = ["day,player,net_worth"]
    for day, player, value in output.metrics.networth_rows:
        lines.append(f"{day},{player},{value!r}")
    return "\n".join(lines) + "\n"


def _render_hidden(output: RunOutput) -> str:
    lines = ["generation,player,mean_hidden_units"]
    for generation, player, value in output.metrics.hidden_rows:
        lines.append(f"{generation},{player},{value!r}")
    return "\n".join(lines) + "\n"


def _render_complexity(output: RunOutput) -> str:
    lines = ["generation,species,stddev_hidden_units"]
    for generation, species, sigma in output.metrics.complexity_rows:
        lines.append(f"{generation},{species},{sigma!r}")
    return "\n".join(lines) + "\n"


def _render_trades(output: RunOutput) -> str:
    names = output.config.stocks
    lines = ["day,round,buyer,seller,stock,quantity,price"]
    for t in output.trades:
        lines.append(
            f"{t.day},{t.round},{t.buyer},{t.seller},{names[t.stock]},{t.quantity},{t.price!r}"
        )
    return "\n".join(lines) + "\n"


def _write_all(contents: dict[str, str], out_dir) -> dict[str, int]:
    """Atomically write every file, then a manifest of line counts."""
    os.makedirs(out_dir, exist_ok=True)
    counts = {name: text.count("\n") for name, text in contents.items()}
    manifest = "".join(f"{name},{counts[name]}\n" for name in sorted(counts))
    staged = []
    try:
        for name, text in list(contents.items()) + [(MANIFEST_NAME, manifest)]:
            tmp_path = os.path.join(out_dir, f".{name}.tmp")
            with open(tmp_path, "w", newline="") as handle:
                handle.write(text)
            staged.append((tmp_path, os.path.join(out_dir, name)))
    except OSError:
        for tmp_path, _ in staged:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
        raise
    for tmp_path, final_path in staged:
        os.replace(tmp_path, final_path)
    return counts


def emit_reports(output: RunOutput, out_dir) -> dict[str, int]:
    """Write the run's CSVs, resolved config and manifest into out_dir."""
    contents = {
        "networth.csv": _render_networth(output),
        "hidden_units.csv": _render_hidden(output),
        "complexity.csv": _render_complexity(output),
        "trades.csv": _render_trades(output),
        "config.resolved": resolved_text(output.config),
    }
    return _write_all(contents, out_dir)


def emit_bench_reports(result: BenchmarkResult, out_dir) -> dict[str, int]:
    """Write benchmark samples and per-sweep fits into out_dir."""
    sample_lines = ["sweep,x,seconds"]
    for s in result.samples:
        sample_lines.append(f"{s.sweep},{s.x},{s.seconds!r}")
    fit_lines = ["sweep,slope,intercept,r_squared,samples"]
    for sweep_fit in result.fits:
        if sweep_fit.fit is None:
            fit_lines.append(f"{sweep_fit.sweep},,,,{sweep_fit.samples}")
        else:
            f = sweep_fit.fit
            fit_lines.append(
                f"{sweep_fit.sweep},{f.slope!r},{f.intercept!r},{f.r_squared!r},{sweep_fit.samples}"
            )
    contents = {
        "scaling.csv": "\n".join(sample_lines) + "\n",
        "scaling_fit.csv": "\n".join(fit_lines) + "\n",
    }
    return _write_all(contents, out_dir)
