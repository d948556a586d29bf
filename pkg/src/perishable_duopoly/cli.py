"""Command-line entry point: ``duopoly {simulate,meanfield,boundary,sweep}``.

Exit status: 0 success, 1 configuration error, 2 numerical error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import agents, meanfield, phases
from .config import ConfigError, RunConfig, manifest_text, parse_config, parse_range
from .special import NumericalError
from .svg import heatmap, line_chart

log = logging.getLogger("perishable_duopoly")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

DEFAULT_BOUNDARY_G = "0:1:101"


def _num(v: float | None) -> str:
    return "" if v is None or not np.isfinite(v) else f"{v:.9g}"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text)
    log.info("wrote %s", path)
    return path


def _prepare(cfg: RunConfig, command: str) -> Path:
    out = Path(cfg.output.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out, "manifest.txt", manifest_text(cfg, command))
    return out


def _series_svg(ts, title: str) -> str:
    curves = {f"p{i + 1}": ts.p[:, i] for i in range(ts.n_sellers)}
    return line_chart(ts.t, curves, title=title, xlabel="t", ylabel="p_i", ylim=(0.0, 1.0))


def cmd_simulate(cfg: RunConfig) -> int:
    out = _prepare(cfg, "simulate")
    ts = agents.run(cfg.model, cfg.sim)
    _write(out, "timeseries.csv", ts.to_csv())
    op = phases.order_parameters(ts, cfg.sim.burn_in)
    label = phases.classify(op, cfg.sweep.threshold)
    hp = phases.half_period(ts, cfg.sim.burn_in)
    summary = {"m_a": op.m_a, "m_o": op.m_o, "m": op.m, "phase": label.value, "half_period": hp}
    if cfg.output.json:
        _write(out, "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if cfg.output.svg:
        _write(out, "timeseries.svg", _series_svg(
            ts, f"T={cfg.model.temperature:g}, g={cfg.model.greed:g}"))
    print(f"m_a={op.m_a:.6g} m_o={op.m_o:.6g} m={op.m:.6g} phase={label.value} "
          f"half_period={_num(hp) or 'none'}")
    return EXIT_OK


def cmd_meanfield(cfg: RunConfig) -> int:
    out = _prepare(cfg, "meanfield")
    prm, mf = cfg.model, cfg.meanfield
    init = meanfield.symmetric_state(prm, mf.dt, mf.bias)
    ts = meanfield.integrate(prm, init, cfg.sim.duration, mf.dt, cfg.sim.record_interval)
    _write(out, "meanfield.csv", ts.to_csv())

    tau = np.linspace(0.0, 10.0 * prm.tau1, 401)
    q = meanfield.q_of_age(tau, prm.greed, prm.h_c, prm.tau1)
    q0 = meanfield.q_zero(prm.greed, prm.R, prm.h_c)
    _write(out, "q_curve.csv", _csv_text(["tau", "Q", "Q0"],
                                         [[_num(a), _num(b), _num(q0)] for a, b in zip(tau, q)]))
    if cfg.output.svg:
        _write(out, "meanfield.svg", _series_svg(ts, f"mean field, T={prm.temperature:g}, g={prm.greed:g}"))
        _write(out, "q_curve.svg", line_chart(tau, {"Q(tau)": q}, title=f"g={prm.greed:g}",
                                              xlabel="tau", ylabel="Q", hlines={"Q0": q0}))
    if cfg.output.json:
        op = phases.order_parameters(ts, cfg.sim.burn_in)
        _write(out, "summary.json", json.dumps({"m_a": op.m_a, "m_o": op.m_o, "m": op.m,
                                                "Q0": q0}, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_boundary(cfg: RunConfig) -> int:
    out = _prepare(cfg, "boundary")
    prm = cfg.model
    g_values = (cfg.sweep.g_range or parse_range(DEFAULT_BOUNDARY_G)).values()
    curve = phases.boundary_curve(g_values, prm.R, prm.h_c, prm.p0)
    tau_star = [phases.crossing_age(g, prm.R, prm.h_c, prm.tau1) for g in curve.g]
    _write(out, "boundary.csv", _csv_text(
        ["g", "T_c", "tau_star"],
        [[_num(g), _num(t), _num(s)] for g, t, s in zip(curve.g, curve.t_c, tau_star)]))
    t_c0 = phases.critical_temperature(0.0, prm.R, prm.p0, prm.h_c)
    summary = {"R": prm.R, "g_c": curve.g_c, "T_c0": t_c0}
    _write(out, "boundary_summary.txt", "".join(f"{k} = {_num(v)}\n" for k, v in summary.items()))
    if cfg.output.json:
        _write(out, "boundary.json", json.dumps({**summary, "g": curve.g.tolist(),
                                                 "T_c": curve.t_c.tolist(), "tau_star": tau_star},
                                                indent=2, sort_keys=True) + "\n")
    if cfg.output.svg:
        _write(out, "boundary.svg", line_chart(curve.g, {"T_c(g)": curve.t_c}, title="symmetric-phase boundary",
                                               xlabel="g", ylabel="T_c"))
    print(f"g_c={curve.g_c:.9g} T_c(0)={t_c0:.9g}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.sweep.T_range is None or cfg.sweep.g_range is None:
        raise ConfigError("sweep needs T_range and g_range (--T-range, --g-range)")
    out = _prepare(cfg, "sweep")
    t_values, g_values = cfg.sweep.T_range.values(), cfg.sweep.g_range.values()
    grid = phases.sweep_grid(t_values, g_values)
    rows = phases.sweep(grid, cfg.model, cfg.sim, threshold=cfg.sweep.threshold,
                        workers=cfg.output.threads)
    table = []
    for r in rows:
        if r.order is None:
            table.append([_num(r.temperature), _num(r.greed), "", "", "", "", ""])
            log.warning("cell T=%g g=%g failed: %s", r.temperature, r.greed, r.error)
        else:
            table.append([_num(r.temperature), _num(r.greed), _num(r.order.m_a), _num(r.order.m_o),
                          _num(r.order.m), r.phase.value, _num(r.half_period)])
    _write(out, "sweep.csv", _csv_text(["T", "g", "m_a", "m_o", "m", "phase", "half_period"], table))
    if cfg.output.json:
        _write(out, "sweep.json", json.dumps([
            {"T": r.temperature, "g": r.greed, "seed": r.seed,
             "m_a": r.order and r.order.m_a, "m_o": r.order and r.order.m_o,
             "m": r.order and r.order.m, "phase": r.phase and r.phase.value,
             "half_period": r.half_period, "error": r.error} for r in rows], indent=2) + "\n")
    if cfg.output.svg:
        m = np.array([np.nan if r.order is None else r.order.m for r in rows]).reshape(len(t_values), -1)
        labels = np.array(["" if r.phase is None else r.phase.value for r in rows],
                          dtype=object).reshape(m.shape)
        _write(out, "sweep.svg", heatmap(t_values, g_values, m, labels=labels))
    failed = sum(r.order is None for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} cells done")
    return EXIT_NUMERICAL if failed else EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "meanfield": cmd_meanfield,
    "boundary": cmd_boundary,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="duopoly", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI-style configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--T", dest="temperature", type=float, help="effective temperature")
    common.add_argument("--g", dest="greed", type=float, help="greed factor")
    common.add_argument("--duration", type=float)
    common.add_argument("--svg", action="store_true", default=None, help="also write SVG plots")
    common.add_argument("--json", action="store_true", default=None, help="also write JSON")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "meanfield", "boundary"):
        sp = sub.add_parser(name, parents=[common])
        if name == "boundary":
            sp.add_argument("--g-range", dest="g_range", help="LO:HI:COUNT grid of g")
    sp = sub.add_parser("sweep", parents=[common])
    sp.add_argument("--T-range", dest="T_range", help="LO:HI:COUNT grid of T")
    sp.add_argument("--g-range", dest="g_range", help="LO:HI:COUNT grid of g")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {k: getattr(args, k, None) for k in
                 ("out", "seed", "threads", "temperature", "greed", "duration", "svg", "json",
                  "T_range", "g_range")}
    try:
        text = args.config.read_text() if args.config else ""
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text, overrides, require_point=args.command in ("simulate", "meanfield"))
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
