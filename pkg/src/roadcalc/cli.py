"""
roadcalc command line: curves, bounds, simulate and compose.

    roadcalc curves   --config scenario.json [--out DIR]
    roadcalc bounds   --config scenario.json [--out DIR]
    roadcalc simulate --config scenario.json [--out DIR] [--seed N] [--negative-control]
    roadcalc compose  --config scenario.json [--out DIR]

Exit status: 0 when everything checks out, 2 when a simulated run breaks a
service couple or a delay bound, 3 for a bad scenario file and 1 when an
output file cannot be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, List, Sequence

import numpy as np

from .bounds import AffineArrival, couple_bounds, road_bounds
from .composition import is_degenerate, path_service
from .config import ConfigError, ScenarioConfig, load
from .ctm import SimConfig, simulate
from .curve import INF, Curve, fmt
from .road import Counts, avg_travel_time, fundamental_flow, service_couple_theorem1
from .soundness import random_inflow, run_case

log = logging.getLogger("roadcalc")

OK, IO_ERROR, VIOLATION, BAD_CONFIG = 0, 1, 2, 3


# -- output helpers --------------------------------------------------------


def dec(x) -> str:
    """Decimal rendering for CSV cells (exact values live in the JSON files)."""
    if x == INF:
        return "inf"
    return format(float(x), ".15g")


def tag(rho: Fraction) -> str:
    return fmt(rho).replace("/", "-")


def write_atomic(path: Path, data) -> Path:
    """Write to a temporary file next to ``path`` and rename it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def step_points(f: Curve, H) -> tuple:
    """Vertices of f on [0, H] with both sides of each jump, for plotting."""
    xs, ys = [0.0], [float(f.f0) if f.f0 != INF else np.nan]
    for s in f.segments_until(H):
        end = min(s.end, Fraction(H))
        a = s.value
        b = s.at(end) if s.value != INF else INF
        xs += [float(s.start), float(end)]
        ys += [np.nan if a == INF else float(a), np.nan if b == INF else float(b)]
        if s.end >= H:
            break
    return xs, ys


def svg_bytes(fig) -> bytes:
    import matplotlib.pyplot as plt

    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "roadcalc"
    return plt


def workers() -> int:
    try:
        cap = int(os.environ.get("ROADCALC_THREADS", "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(n, cap) if cap > 0 else n)


def pmap(fn: Callable, items: List) -> List:
    """Order-preserving map, spread over processes when that helps."""
    n = min(workers(), len(items))
    if n <= 1:
        return [fn(*x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, *zip(*items)))


# -- commands --------------------------------------------------------------


def cmd_curves(cfg: ScenarioConfig, out: Path) -> int:
    sw = cfg.sweep
    if sw is None:
        raise ConfigError("the curves command needs a 'sweep' block")
    if not sw.rho:
        log.warning("empty density sweep: nothing to draw")
        return OK
    road = cfg.road(sw.road)
    couples = [(rho, service_couple_theorem1(road, rho)) for rho in sw.rho]
    n = int(sw.horizon / sw.step)
    times = [k * sw.step for k in range(n + 1)]
    if "csv" in cfg.formats:
        for rho, c in couples:
            rows = []
            for t in times:
                b, lam = c.beta(t), c.lam(t)
                rows.append([dec(t), dec(b), dec(lam), dec(min(b, lam))])
            write_atomic(out / f"curves_rho_{tag(rho)}.csv", csv_text(["t", "beta", "lambda", "min"], rows))
    if "json" in cfg.formats:
        doc = [{"rho": fmt(rho), "beta": c.beta.to_dict(), "lambda": c.lam.to_dict()} for rho, c in couples]
        write_atomic(out / "curves.json", json_text(doc))
    if "svg" in cfg.formats:
        plt = _pyplot()
        fig, axes = plt.subplots(1, len(couples), figsize=(4 * len(couples), 3.6), squeeze=False)
        for ax, (rho, c) in zip(axes[0], couples):
            ax.plot(*step_points(c.beta, sw.horizon), label="beta", lw=2.2, color="tab:blue")
            ax.plot(*step_points(c.lam, sw.horizon), label="lambda", lw=1.2, ls="--", color="tab:red")
            ax.set_title(f"rho = {fmt(rho)}")
            ax.set_xlabel("t")
            ax.set_xlim(0, float(sw.horizon))
            ax.grid(alpha=0.3)
        axes[0][0].legend(loc="upper left")
        fig.tight_layout()
        write_atomic(out / "curves.svg", svg_bytes(fig))
    return OK


def cmd_bounds(cfg: ScenarioConfig, out: Path) -> int:
    sw = cfg.sweep
    if sw is None:
        raise ConfigError("the bounds command needs a 'sweep' block")
    if not sw.rho:
        log.warning("empty density sweep: nothing to compute")
        return OK
    road = cfg.road(sw.road)
    spec = cfg.arrivals.get(sw.arrival) if sw.arrival else None
    rows, reports = [], []
    for rho in sw.rho:
        alpha = spec.resolve(road, rho) if spec else AffineArrival(0, 0)
        rep = road_bounds(road, rho, alpha)
        q, tau = fundamental_flow(road, rho), avg_travel_time(road, rho)
        rows.append((rho, q, tau, rep.tau_max, rep.b_max))
        reports.append({"rho": fmt(rho), "sigma": fmt(alpha.sigma), "r": fmt(alpha.r), "report": rep.to_dict()})
    if "csv" in cfg.formats:
        text = csv_text(["rho", "q", "tau", "tau_max", "b_max"], [[dec(x) for x in r] for r in rows])
        write_atomic(out / "bounds.csv", text)
    if "json" in cfg.formats:
        write_atomic(out / "bounds.json", json_text(reports))
    if "svg" in cfg.formats:
        plt = _pyplot()
        fig, ax = plt.subplots(figsize=(5.5, 3.8))
        xs = [float(r[0]) for r in rows]
        ax.plot(xs, [float(r[2]) if r[2] != INF else np.nan for r in rows], label="average travel time")
        ax.plot(xs, [float(r[3]) if r[3] != INF else np.nan for r in rows], ls="--", label="maximum travel time")
        ax.set_xlabel("density")
        ax.set_ylabel("time")
        ax.grid(alpha=0.3)
        ax.legend()
        fig.tight_layout()
        write_atomic(out / "bounds.svg", svg_bytes(fig))
    return OK


def _case(road, rho, name, alpha, runs, seed, dt, horizon, negative):
    return run_case(road, rho, name, alpha, runs, seed, dt, horizon, negative)


def cmd_simulate(cfg: ScenarioConfig, out: Path, seed=None, negative_control=False) -> int:
    sim = cfg.sim
    if sim is None:
        raise ConfigError("the simulate command needs a 'sim' block")
    road = cfg.road(sim.road)
    seed = sim.seed if seed is None else seed
    if sim.horizon == 0:
        log.warning("simulation horizon is 0: traces are empty")
    if not sim.densities:
        log.warning("no densities to simulate")
    jobs = []
    for i, rho in enumerate(sim.densities):
        alpha = sim.arrival.resolve(road, rho)
        for name in sim.couples:
            jobs.append((road, rho, name, alpha, sim.runs, seed + 1000 * i, sim.dt, sim.horizon, negative_control))
    results = pmap(_case, jobs)
    # one exported trace per density: the first random inflow of its suite
    if "csv" in cfg.formats:
        for i, rho in enumerate(sim.densities):
            alpha = sim.arrival.resolve(road, rho)
            U, scale = random_inflow(np.random.default_rng(seed + 1000 * i), alpha, sim.dt, sim.horizon)
            inflow = tuple(Fraction(int(x), scale) for x in U)
            trace = simulate(road, Counts.uniform(road, rho), SimConfig(sim.dt, sim.horizon, inflow))
            buf = io.StringIO()
            m = trace.Q.shape[1]
            wr = csv.writer(buf, lineterminator="\n")
            wr.writerow(["t"] + [f"Q_{j + 1}" for j in range(m)] + ["Y", "Z"])
            for k, t in enumerate(trace.times):
                vals = [trace.value(trace.Q[:, j], k) for j in range(m)] + [trace.value(trace.Y, k), trace.value(trace.Z, k)]
                wr.writerow([dec(t)] + [dec(v) for v in vals])
            write_atomic(out / f"trace_rho_{tag(rho)}.csv", buf.getvalue())
    summary = {
        "seed": seed,
        "negative_control": negative_control,
        "dt": fmt(sim.dt),
        "horizon": fmt(sim.horizon),
        "cases": [r.to_dict() for r in results],
    }
    if "json" in cfg.formats:
        write_atomic(out / "simulate.json", json_text(summary))
    bad = [r for r in results if not r.ok]
    for r in results:
        log.info(
            "rho=%s %-8s runs=%d couple violations=%d delay excess=%d",
            fmt(r.rho), r.couple, r.runs, r.couple_violations, r.delay_excess,
        )
    return VIOLATION if bad else OK


def cmd_compose(cfg: ScenarioConfig, out: Path) -> int:
    net = cfg.network
    if net is None:
        raise ConfigError("the compose command needs a 'network' block")
    if not cfg.paths:
        log.warning("no paths declared: nothing to compose")
        return OK
    docs, rows = [], []
    for p in cfg.paths:
        spec = cfg.arrivals[p.arrival]
        alpha = AffineArrival(spec.sigma, spec.r)
        couple = path_service(net, p.edges)
        rep = couple_bounds(alpha, couple)
        tau = INF if is_degenerate(couple) else rep.tau_max
        docs.append(
            {
                "name": p.name,
                "edges": p.edges,
                "arrival": spec.to_dict(),
                "couple": couple.to_dict(),
                "travel_time_bound": fmt(tau),
                "report": rep.to_dict(),
            }
        )
        rows.append([p.name, " ".join(p.edges), dec(tau), dec(rep.b_max)])
    if "json" in cfg.formats:
        write_atomic(out / "compose.json", json_text(docs))
    if "csv" in cfg.formats:
        write_atomic(out / "compose.csv", csv_text(["path", "edges", "travel_time_bound", "b_max"], rows))
    return OK


COMMANDS = {"curves": cmd_curves, "bounds": cmd_bounds, "simulate": cmd_simulate, "compose": cmd_compose}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roadcalc", description="Min-plus service bounds for ring roads and road trees.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="scenario JSON file")
    ap.add_argument("--out", help="output directory (default: the scenario's output.dir, else ./roadcalc-out)")
    ap.add_argument("--seed", type=int, help="seed for the random inflows (simulate)")
    ap.add_argument("--negative-control", action="store_true", help="lift both curves by one car (simulate)")
    ap.add_argument("-q", "--quiet", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="roadcalc: %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        log.error("--seed must fit in an unsigned 64-bit integer")
        return BAD_CONFIG
    try:
        cfg = load(args.config)
        out = Path(args.out or cfg.out_dir or "roadcalc-out")
        if args.command == "simulate":
            return cmd_simulate(cfg, out, args.seed, args.negative_control)
        return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return BAD_CONFIG
    except OSError as exc:
        log.error("cannot write %s: %s", exc.filename or out, exc.strerror or exc)
        return IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
