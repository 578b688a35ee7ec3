"""Command-line experiment runner.

Subcommands ``fig2``, ``fig3``, ``witness`` and ``cavity-scan`` write CSV or
JSON data; nothing is plotted. Exit status is 0 on success, 2 for invalid
configuration and 3 for I/O failures.

Example::

    python -m fbin_sim fig2 --out fringe.csv
    python -m fbin_sim witness --state fig3a --format json
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cavity as cv
from . import hilbert as hb
from . import noise as nz
from . import protocol as pr
from . import states
from . import witness as wt
from .errors import FbinError, ParseError
from .hilbert import AtomRegister, FrequencyBin, PhotonRegister

EXPERIMENTS = ("fig2", "fig3", "witness", "cavity-scan")
BUILTIN_STATES = ("eq1", "fig3a", "fig3b", "product", "random-separable")
FORMATS = ("csv", "json")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


@dataclass
class ExperimentConfig:
    """Fully validated description of one run."""

    experiment: str
    detuning: float | None = None
    grid: wt.MeasurementGrid | None = None
    noise: nz.NoiseSpec = field(default_factory=nz.NoiseSpec)
    cavity: cv.CavityParams | None = None
    out: str | None = None
    format: str | None = None
    seed: int = 0
    eps_l: float = wt.DEFAULT_EPS
    eps_r: float = wt.DEFAULT_EPS
    state: str = "fig3a"
    trials: int = 1
    product_input: bool = False
    fringe_rows: int = 601
    g_values: tuple[float, ...] | None = None
    scan_points: int = 1001

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ParseError(f"unknown experiment {self.experiment!r}", "experiment")
        if self.detuning is None:
            self.detuning = states.FIG2_DETUNING if self.experiment in ("fig2", "cavity-scan") \
                else states.FIG3_DETUNING
        if not (np.isfinite(self.detuning) and self.detuning > 0):
            raise ParseError("detuning must be a positive angular frequency", "detuning")
        if self.format is None:
            self.format = "json" if self.experiment == "witness" else "csv"
        if self.format not in FORMATS:
            raise ParseError(f"format must be one of {FORMATS}", "format")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ParseError("seed must be an unsigned 64-bit integer", "seed")
        for name in ("eps_l", "eps_r"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ParseError("epsilon must lie in [0, 1]", name)
        if self.trials < 1:
            raise ParseError("trials must be >= 1", "trials")
        if self.fringe_rows < 400:
            raise ParseError("the fringe scan needs at least 400 rows", "fringe_rows")
        if self.scan_points < 2:
            raise ParseError("scan_points must be >= 2", "scan_points")
        if self.grid is None:
            self.grid = wt.MeasurementGrid.for_detuning(self.detuning)
        if self.experiment == "witness" and self.state not in BUILTIN_STATES \
                and not Path(self.state).suffix == ".json":
            raise ParseError(f"state must be one of {BUILTIN_STATES} or a .json file", "state")


def _section(d: dict, key: str, cls, location: str):
    try:
        return cls(**d[key])
    except FbinError as exc:
        raise ParseError(str(exc), f"{location}:{key}") from None
    except TypeError as exc:
        raise ParseError(str(exc), f"{location}:{key}") from None


def load_config(path: str | None, experiment: str, overrides: dict) -> ExperimentConfig:
    """Merge a JSON config file with command-line overrides and validate."""
    data: dict = {}
    location = path or "<args>"
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise OSError(f"{path}: {exc.strerror}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
        if not isinstance(data, dict):
            raise ParseError("config must be a JSON object", path)
    data = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    data.pop("experiment", None)
    kwargs: dict = {"experiment": experiment}
    if "detuning_hz" in data:
        kwargs["detuning"] = 2 * np.pi * float(data.pop("detuning_hz"))
    grid_over = {k: data.pop(k) for k in ("grid_time", "grid_theta") if k in data}
    if "grid" in data or grid_over:
        g = dict(data.pop("grid", {}))
        if "grid_time" in grid_over:
            g["n_time"] = grid_over["grid_time"]
        if "grid_theta" in grid_over:
            g["n_theta"] = grid_over["grid_theta"]
        if "T" not in g:
            det = kwargs.get("detuning", data.get("detuning"))
            det = det if det is not None else ExperimentConfig(experiment).detuning
            g["T"] = 2 * 2 * np.pi / det
        if "n_time" in g and experiment == "fig2":
            kwargs["fringe_rows"] = int(g["n_time"])
        kwargs["grid"] = _section({"grid": g}, "grid", wt.MeasurementGrid, location)
    if "noise" in data:
        kwargs["noise"] = _section(data, "noise", nz.NoiseSpec, location)
        data.pop("noise")
    if "cavity" in data:
        kwargs["cavity"] = _section(data, "cavity", cv.CavityParams, location)
        data.pop("cavity")
    if "g_values" in data:
        kwargs["g_values"] = tuple(float(g) for g in data.pop("g_values"))
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    for k, v in data.items():
        if k not in known:
            raise ParseError(f"unknown config key {k!r}", location)
        kwargs[k] = v
    try:
        return ExperimentConfig(**kwargs)
    except ParseError:
        raise
    except (FbinError, TypeError, ValueError) as exc:
        raise ParseError(str(exc), location) from None


def _threads() -> int:
    raw = os.environ.get("FBIN_SIM_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ParseError("FBIN_SIM_THREADS must be an integer", "FBIN_SIM_THREADS") from None


def _map(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


# -- table output --------------------------------------------------------------

@dataclass
class Table:
    columns: list[str]
    rows: list[list]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json_obj(self) -> dict:
        return {c: [row[i] for row in self.rows] for i, c in enumerate(self.columns)}

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


# -- experiments ------------------------------------------------------------------

def cmd_fig2(config: ExperimentConfig) -> Table:
    """Two-atom Bell-type fringe versus ``t_R - t_L`` for theta_R = 0 and pi/4.

    Three fringe periods centred on zero delay; each column is divided by its
    maximum over the scan.
    """
    dw = config.detuning
    period = 2 * np.pi / dw
    n = config.fringe_rows
    step = 3 * period / (n - 1)
    delays = (np.arange(n) - (n - 1) / 2) * step
    t_l = 1.5 * period + step
    initial = states.two_atom_initial(dw, entangled=not config.product_input)
    noisy = config.noise != nz.NoiseSpec()

    def row(x):
        if noisy:
            _, rho = nz.run_noisy_two_atom_protocol(initial, t_l, t_l + x, config.noise)
            if rho is None:
                return 0.0, 0.0
            out = rho
        else:
            out = pr.run_two_atom_protocol(initial, t_l, t_l + x)
        return pr.fringe_probability(out, 0.0), pr.fringe_probability(out, np.pi / 4)

    probs = np.array(_map(row, delays))
    peak = probs.max(axis=0)
    peak[peak == 0] = 1.0
    probs = probs / peak
    return Table(["t_R_minus_t_L_ns", "P_theta_0", "P_theta_pi_over_4"],
                 [[x * 1e9, a, b] for x, (a, b) in zip(delays, probs)])


def cmd_fig3(config: ExperimentConfig) -> Table:
    """Conditional analyser probability maps for the two mixed states, long format."""
    grid = config.grid
    rows = []
    for sid, rho in (("a", states.fig3a(config.detuning)), ("b", states.fig3b(config.detuning))):
        fc = wt.fc_grid(rho, grid)
        for i, t in enumerate(grid.times):
            for k, th in enumerate(grid.thetas):
                rows.append([sid, t * 1e9, th, fc[i, k]])
    return Table(["state_id", "t_L_ns", "theta_R", "rate"], rows)


def load_state_file(path: str) -> hb.DensityOperator:
    """Read a density matrix on ``(photon, atom)`` from JSON.

    Schema::

        {"photon": {"side": "L", "bins": [{"label": "w1", "omega": 2.5e8}, ...]},
         "atom": {"side": "R", "levels": ["g1", "g2"]},
         "matrix": {"re": [[...], ...], "im": [[...], ...]}}

    ``im`` may be omitted. Rows follow the joint basis ``(bin, level)``,
    bin-major.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    loc = path
    try:
        ph = d["photon"]
        loc = f"{path}:photon"
        photon = PhotonRegister(ph.get("side", "L"),
                                tuple(FrequencyBin(b["label"], float(b["omega"])) for b in ph["bins"]))
        loc = f"{path}:atom"
        at = d["atom"]
        atom = AtomRegister(at.get("side", "R"), tuple(at["levels"]))
        loc = f"{path}:matrix"
        m = np.array(d["matrix"]["re"], dtype=float)
        if "im" in d["matrix"]:
            m = m + 1j * np.array(d["matrix"]["im"], dtype=float)
        return hb.DensityOperator((photon, atom), m)
    except KeyError as exc:
        raise ParseError(f"missing key {exc}", loc) from None
    except (FbinError, TypeError, ValueError) as exc:
        raise ParseError(str(exc), loc) from None


def builtin_state(name: str, detuning: float, rng: np.random.Generator | None = None,
                  grid: wt.MeasurementGrid | None = None, eps=(wt.DEFAULT_EPS, wt.DEFAULT_EPS)):
    if name == "eq1":
        return hb.to_density(states.eq1_state(detuning))
    if name == "fig3a":
        return states.fig3a(detuning)
    if name == "fig3b":
        return states.fig3b(detuning)
    if name == "product":
        return hb.to_density(states.product(detuning))
    if name == "random-separable":
        photon = PhotonRegister("L", states.two_bins(detuning))
        return wt.random_separable_state(rng, photon, states.atom("R"), grid,
                                         eps_L=eps[0], eps_R=eps[1])
    raise ParseError(f"unknown built-in state {name!r}", "state")


def cmd_witness(config: ExperimentConfig):
    """Witness report(s) for the configured state.

    For ``random-separable`` with ``trials > 1`` one state is drawn per trial
    from a generator seeded with ``seed`` and a summary is attached.
    """
    grid = config.grid
    eps = (config.eps_l, config.eps_r)
    if config.state in BUILTIN_STATES:
        rngs = np.random.default_rng(config.seed).spawn(config.trials)
        trials = config.trials if config.state == "random-separable" else 1
        rhos = [builtin_state(config.state, config.detuning, rngs[i], grid, eps)
                for i in range(trials)]
    else:
        rhos = [load_state_file(config.state)]
    reports = _map(lambda r: wt.fourier_witness(r, grid, eps_L=eps[0], eps_R=eps[1]), rhos)
    return reports


def witness_output(config: ExperimentConfig, reports) -> str:
    if config.format == "csv":
        rows = []
        for n, rep in enumerate(reports):
            for i, t in enumerate(rep.grid.times):
                for k, th in enumerate(rep.grid.thetas):
                    rows.append([n, t * 1e9, th, rep.fc_grid[i, k], rep.klr_grid[i, k]])
        return Table(["trial", "t_L_ns", "theta_R", "F_c", "K_LR"], rows).to_csv()
    if len(reports) == 1:
        doc = {"state": config.state, **reports[0].to_dict()}
    else:
        verdicts = [r.verdict.value for r in reports]
        doc = {"state": config.state, "seed": config.seed,
               "summary": {v: verdicts.count(v) for v in sorted(set(verdicts))},
               "trials": [r.to_dict(include_grids=False) for r in reports]}
    return json.dumps(doc, indent=1) + "\n"


def cmd_cavity_scan(config: ExperimentConfig):
    """Reflection spectra around the resonant bin plus gate error along a g scan.

    Returns ``(reflection_table, gate_error_table)``.
    """
    bins = states.two_bins(config.detuning)
    w1 = bins[0].omega
    p = config.cavity or cv.resonant_params(w1, g=2 * np.pi * 20e6, kappa=2 * np.pi * 2e6,
                                            gamma=2 * np.pi * 1e6)
    span = 10 * max(p.kappa, p.g, p.gamma)
    omegas = np.linspace(p.omega_cavity - span, p.omega_cavity + span, config.scan_points)
    ru = cv.reflection_coefficient(omegas, False, p)
    rc = cv.reflection_coefficient(omegas, True, p)
    refl = Table(["omega_in", "re_r_uncoupled", "im_r_uncoupled", "re_r_coupled", "im_r_coupled"],
                 [[w, a.real, a.imag, b.real, b.imag] for w, a, b in zip(omegas, ru, rc)])
    g_values = config.g_values if config.g_values is not None else \
        tuple(np.linspace(0.0, 2 * np.pi * 50e6, 26))
    scan = [p.replace(g=g) for g in g_values]
    errs = _map(lambda q: cv.gate_error(q, bins), scan)
    summary = Table(["g", "kappa", "gamma", "gate_error"],
                    [[q.g, q.kappa, q.gamma, e] for q, e in zip(scan, errs)])
    return refl, summary


# -- driver ---------------------------------------------------------------------

def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise OSError(f"{out}: {exc.strerror}") from exc


def run(config: ExperimentConfig) -> dict[str, str]:
    """Execute ``config`` and return ``{destination: text}`` without writing."""
    exp = config.experiment
    if exp in ("fig2", "fig3"):
        table = cmd_fig2(config) if exp == "fig2" else cmd_fig3(config)
        text = table.to_csv() if config.format == "csv" else \
            json.dumps(table.to_json_obj(), indent=1) + "\n"
        return {config.out: text}
    if exp == "witness":
        return {config.out: witness_output(config, cmd_witness(config))}
    refl, summary = cmd_cavity_scan(config)
    if config.format == "json":
        doc = {"reflection": refl.to_json_obj(), "gate_error": summary.to_json_obj()}
        return {config.out: json.dumps(doc, indent=1) + "\n"}
    if config.out is None:
        return {None: refl.to_csv() + "\n" + summary.to_csv()}
    out = Path(config.out)
    return {str(out): refl.to_csv(),
            str(out.with_name(out.stem + "_gate_error" + out.suffix)): summary.to_csv()}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fbin-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--seed", type=int)
        p.add_argument("--detuning-hz", type=float, help="w1 - w2 in Hz (angular = 2 pi x value)")
        p.add_argument("--eps-l", type=float)
        p.add_argument("--eps-r", type=float)
        p.add_argument("--grid-time", type=int)
        p.add_argument("--grid-theta", type=int)
        if name == "fig2":
            p.add_argument("--product-input", action="store_true", default=None,
                           help="start from an unentangled photon pair")
        if name == "witness":
            p.add_argument("--state", help=f"one of {BUILTIN_STATES} or a JSON density matrix")
            p.add_argument("--trials", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("experiment", "config")}
    try:
        config = load_config(args.config, args.experiment, overrides)
        outputs = run(config)
        for dest, text in outputs.items():
            _write(text, dest)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FbinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
