"""Batch front-end for the five experiment families plus the symbolic check.

Usage::

    shiftmourre symcheck [--json] [--corpus FILE]
    shiftmourre {freemourre,mourre,lap,spectrum,assumptions} --config RUN.json --out DIR

Exit codes: 0 success, 1 a symbolic identity failed, 2 invalid input,
3 numerical failure.  Every JSON output carries a ``meta`` block with the
tool version and a hash of the canonical config; CSV files end with a
``# shiftmourre <version> config=<hash>`` comment line so that their header
stays the first line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import traceback
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalError, ShiftMourreError, SupportTouchesBoundary, ValidationError
from .grid import GridSpec, frequencies, make_grid

__all__ = ["RunConfig", "main", "build_parser", "config_hash"]

LOCALIZED_PR = 0.05


@dataclass
class GridConfig:
    d: int = 1
    L: float = 32.0
    n: int = 256
    beta: float = 1.0


@dataclass
class WindowConfig:
    a: float = 1.0
    b: float = 2.0
    eta: float | None = None


@dataclass
class LapConfig:
    gamma: float = 1.0
    weight: str = "pos"
    eps: list[float] | None = None
    lambdas: list[float] = field(default_factory=lambda: [1.0])
    decades: float = 1.0
    points: int = 5


@dataclass
class MourreConfig:
    c_fraction: float = 0.5
    L_values: list[float] | None = None
    commutator: str = "analytic"


@dataclass
class OutputConfig:
    dir: str = "out"
    plots: bool = False


@dataclass
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    potential: dict | None = None
    window: WindowConfig = field(default_factory=WindowConfig)
    lap: LapConfig = field(default_factory=LapConfig)
    mourre: MourreConfig = field(default_factory=MourreConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    dense_cap: int = 4096
    seed: int = 42

    _SECTIONS = {"grid": GridConfig, "window": WindowConfig, "lap": LapConfig,
                 "mourre": MourreConfig, "outputs": OutputConfig}

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        kwargs = {}
        for key, value in data.items():
            if key in cls._SECTIONS:
                try:
                    kwargs[key] = cls._SECTIONS[key](**value)
                except TypeError as exc:
                    raise ValidationError(f"config section {key!r}: {exc}") from None
            elif key in ("potential", "dense_cap", "seed"):
                kwargs[key] = value
            else:
                raise ValidationError(f"unknown config key {key!r}")
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    # validated views -----------------------------------------------------

    def make_grid(self) -> GridSpec:
        g = self.grid
        return make_grid(g.d, g.L, g.n, g.beta)

    def make_window(self):
        from .mourre import EnergyWindow

        w = self.window
        return EnergyWindow(w.a, w.b, self.grid.beta, w.eta)

    def potential_spec(self):
        from .potentials import spec_from_dict

        if self.potential is None:
            return None
        data = dict(self.potential)
        if data.get("variant") == "example5":
            data.setdefault("seed", self.seed)
        return spec_from_dict(data)

    def validate(self) -> None:
        self.make_grid()
        self.potential_spec()
        if self.lap.gamma < 0:
            raise ValidationError("lap.gamma must be nonnegative")
        if self.lap.weight not in ("pos", "conj", "both"):
            raise ValidationError("lap.weight must be pos, conj or both")
        if self.lap.points < 4:
            raise ValidationError("lap.points must be at least 4")
        if self.mourre.commutator not in ("analytic", "matrix"):
            raise ValidationError("mourre.commutator must be analytic or matrix")
        if int(self.dense_cap) <= 0:
            raise ValidationError("dense_cap must be positive")


def config_hash(cfg: RunConfig) -> str:
    canon = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


class _Writer:
    """Serialized output with provenance on every file."""

    def __init__(self, out: Path, cfg: RunConfig, command: str):
        self.out = out
        self.cfg = cfg
        self.hash = config_hash(cfg)
        self.command = command
        out.mkdir(parents=True, exist_ok=True)

    @property
    def meta(self) -> dict:
        return {"tool": "shiftmourre", "version": __version__, "command": self.command,
                "config_hash": self.hash}

    def json(self, name: str, payload: dict) -> Path:
        path = self.out / name
        path.write_text(json.dumps({"meta": self.meta, **payload}, indent=2) + "\n")
        return path

    def csv(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text + f"# shiftmourre {__version__} config={self.hash}\n")
        return path

    def svg(self, name: str, draw) -> Path:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        plt.rcParams["svg.hashsalt"] = self.hash
        fig, ax = plt.subplots(figsize=(5, 3.5))
        draw(ax)
        fig.tight_layout()
        path = self.out / name
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        return path


def _g(x: float) -> str:
    return f"{x:.17g}"


def _potential_field(cfg: RunConfig, grid: GridSpec):
    from .potentials import build_potential

    spec = cfg.potential_spec()
    if spec is None:
        return None
    V = build_potential(spec, grid)
    vals = np.abs(np.asarray(V.values))
    outside = vals[~grid.interior_mask()]
    if vals.max(initial=0.0) > 0 and outside.max(initial=0.0) > 1e-3 * vals.max():
        warnings.warn("potential is not confined to the interior region |x_j| <= L - 4 beta",
                      SupportTouchesBoundary, stacklevel=2)
    return V


# commands -----------------------------------------------------------------


def cmd_symcheck(args) -> int:
    from .symcom.corpus import GOLDEN, load_corpus, run_corpus

    identities = load_corpus(args.corpus) if args.corpus else GOLDEN
    results, seconds = run_corpus(identities)
    ok = all(r.passed for r in results)
    if args.json:
        payload = {"passed": ok, "seconds": round(seconds, 3),
                   "identities": [r.to_dict() for r in results]}
        print(json.dumps(payload, indent=2))
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            worst = max((max(c.lhs_vs_direct, c.rhs_vs_direct, c.lhs_vs_rhs) for c in r.cases),
                        default=0.0)
            status = "pass" if r.passed else "FAIL"
            print(f"{r.name:<{width}}  {status}  max numeric error {worst:.2e}")
        print(f"{sum(r.passed for r in results)}/{len(results)} identities hold ({seconds:.2f} s)")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "symcheck.json").write_text(json.dumps(
            {"meta": {"tool": "shiftmourre", "version": __version__, "command": "symcheck"},
             "passed": ok, "identities": [r.to_dict() for r in results]}, indent=2) + "\n")
    return 0 if ok else 1


def cmd_freemourre(cfg: RunConfig, writer: _Writer, jobs: int) -> None:
    from .mourre import commutator_symbol, free_mourre_check

    grid, window = cfg.make_grid(), cfg.make_window()
    result = free_mourre_check(grid, window)
    writer.json("freemourre.json", {"window": window.to_dict(), **result.to_dict()})
    xi = frequencies(grid)
    sym = commutator_symbol(xi[:, None], grid.beta)
    lines = ["xi,symbol"] + [f"{_g(a)},{_g(b)}" for a, b in zip(xi, sym)]
    writer.csv("symbol.csv", "\n".join(lines) + "\n")
    if cfg.outputs.plots:
        def draw(ax):
            ax.plot(xi, sym, lw=1)
            ax.axhline(result.delta, color="k", ls="--", lw=0.8)
            ax.set_xlabel("xi (axis 1)")
            ax.set_ylabel("commutator symbol")
        writer.svg("symbol.svg", draw)
    print(f"delta = {result.delta:.6f}, margin = {result.margin:.3e}, "
          f"{result.plateau_points} frequencies in window")


def cmd_mourre(cfg: RunConfig, writer: _Writer, jobs: int) -> None:
    from .mourre import l_scan

    grid, window = cfg.make_grid(), cfg.make_window()
    _potential_field(cfg, grid)
    L_values = cfg.mourre.L_values or [grid.L]
    report = l_scan(cfg.potential_spec(), grid, window, L_values, cfg.mourre.c_fraction,
                    jobs=jobs, cap=cfg.dense_cap, commutator=cfg.mourre.commutator)
    writer.json("mourre.json", report.to_dict())
    lines = ["index,mu"] + [f"{i},{_g(v)}" for i, v in enumerate(report.spectrum)]
    writer.csv("mourre_spectrum.csv", "\n".join(lines) + "\n")
    if cfg.outputs.plots:
        def draw(ax):
            ax.plot(np.arange(report.spectrum.size), report.spectrum, "o", ms=3)
            ax.axhline(report.c, color="k", ls="--", lw=0.8)
            ax.set_xlabel("index")
            ax.set_ylabel("compressed commutator eigenvalue")
        writer.svg("mourre_spectrum.svg", draw)
    print(f"delta_free = {report.delta_free:.6f}, c = {report.c:.6f}, "
          + ", ".join(f"L={r.L:g}: k={r.k}" for r in report.l_scan))


def cmd_lap(cfg: RunConfig, writer: _Writer, jobs: int) -> None:
    from .lap import CSV_HEADER, ResolventProbe, eps_floor, eps_sweep
    from .operators import a_op, hamiltonian

    grid = cfg.make_grid()
    H = hamiltonian(grid, _potential_field(cfg, grid))
    kinds = ["pos", "conj"] if cfg.lap.weight == "both" else [cfg.lap.weight]
    A = a_op(grid) if "conj" in kinds else None
    probes = {k: ResolventProbe(H, cfg.lap.gamma, k, A, cap=cfg.dense_cap) for k in kinds}
    energies = next(iter(probes.values())).energies
    summary = []
    curves = []
    for i, lam in enumerate(cfg.lap.lambdas):
        floor = eps_floor(energies, lam)
        if cfg.lap.eps:
            eps = cfg.lap.eps
            if min(eps) < floor:
                warnings.warn(f"eps below the floor {floor:.3g} at lambda={lam}", stacklevel=2)
        else:
            eps = np.geomspace(floor * 10**cfg.lap.decades, floor, cfg.lap.points)
        text = CSV_HEADER + "\n"
        for kind in kinds:
            curve = eps_sweep(probes[kind], lam, cfg.lap.gamma, kind, eps, jobs=jobs, floor=floor)
            text += curve.to_csv(header=False)
            curves.append(curve)
            summary.append({"lambda": lam, "weight": curve.weight_kind, "eps_floor": floor,
                            "classification": curve.classification, "slope": curve.slope,
                            "r2": curve.r2, "last_decade_change": curve.last_decade_change})
        writer.csv(f"lap_{i}.csv", text)
    writer.json("lap.json", {"gamma": cfg.lap.gamma, "curves": summary})
    if cfg.outputs.plots:
        def draw(ax):
            for c in curves:
                e, v = zip(*c.rows)
                ax.loglog(e, v, "o-", ms=3, label=f"lambda={c.lam:g} {c.weight_kind}")
            ax.set_xlabel("eps")
            ax.set_ylabel("weighted resolvent norm")
            ax.legend(fontsize=7)
        writer.svg("lap.svg", draw)
    for s in summary:
        print(f"lambda={s['lambda']:g} {s['weight']}: {s['classification']} "
              f"(eps floor {s['eps_floor']:.3g})")


def cmd_spectrum(cfg: RunConfig, writer: _Writer, jobs: int) -> None:
    from .operators import eigh_dense, hamiltonian

    grid = cfg.make_grid()
    H = hamiltonian(grid, _potential_field(cfg, grid))
    w, U = eigh_dense(H, cfg.dense_cap)
    keep = w < grid.window_top
    prob = np.abs(U[:, keep]) ** 2
    pr = 1.0 / (grid.size * np.sum(prob**2, axis=0))
    r2 = grid.radius().ravel() ** 2
    x2 = r2 @ prob
    lines = ["index,energy,in_window,participation,x2,localized"]
    localized = []
    for i, (e, p, m2) in enumerate(zip(w[keep], pr, x2)):
        loc = bool(p < LOCALIZED_PR)
        if loc:
            localized.append({"energy": float(e), "participation": float(p), "x2": float(m2)})
        lines.append(f"{i},{_g(e)},{int(e > 0)},{_g(p)},{_g(m2)},{int(loc)}")
    writer.csv("spectrum.csv", "\n".join(lines) + "\n")
    writer.json("spectrum.json", {"window_top": grid.window_top, "count": int(keep.sum()),
                                  "localized_threshold": LOCALIZED_PR, "localized": localized})
    if cfg.outputs.plots:
        def draw(ax):
            ax.scatter(w[keep], pr, s=6)
            ax.axhline(LOCALIZED_PR, color="k", ls="--", lw=0.8)
            ax.set_xlabel("energy")
            ax.set_ylabel("participation ratio")
        writer.svg("spectrum.svg", draw)
    print(f"{int(keep.sum())} eigenvalues below {grid.window_top:.4g}, "
          f"{len(localized)} localized candidates")


def cmd_assumptions(cfg: RunConfig, writer: _Writer, jobs: int) -> None:
    from .grid import Field
    from .potentials import assumption_report

    grid = cfg.make_grid()
    spec = cfg.potential_spec()
    V = spec if spec is not None else Field(grid, np.zeros(grid.shape))
    report = assumption_report(V, grid, cap=cfg.dense_cap)
    writer.json("assumptions.json", report.to_dict())
    for r in report.rows:
        print(f"{r.name:<20} compact proxy {'yes' if r.compact_proxy else 'no':<3}  "
              f"bounded proxy {'yes' if r.bounded_proxy else 'no'}")


_COMMANDS = {"freemourre": cmd_freemourre, "mourre": cmd_mourre, "lap": cmd_lap,
             "spectrum": cmd_spectrum, "assumptions": cmd_assumptions}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftmourre", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("symcheck", help="check the golden commutator identities")
    p.add_argument("--corpus", help="JSON corpus replacing the golden identities")
    p.add_argument("--json", action="store_true", help="print machine-readable results")
    p.add_argument("--out", help="also write symcheck.json here")
    for name, help_text in [("freemourre", "free Mourre constant and pointwise margin"),
                            ("mourre", "projected commutator spectrum and L-scan"),
                            ("lap", "eps sweeps of weighted resolvent norms"),
                            ("spectrum", "eigenvalues below the window top with localization"),
                            ("assumptions", "decay and relative-bound proxies for V")]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="RunConfig JSON (defaults are used when omitted)")
        p.add_argument("--out", help="output directory (overrides outputs.dir)")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")
        p.add_argument("--json", action="store_true", help="print the run config as JSON first")
        p.add_argument("--plots", action="store_true", help="write static SVG plots")
    return parser


def _origin(exc: BaseException) -> str:
    frames = [f for f in traceback.extract_tb(exc.__traceback__) if "shiftmourre" in f.filename]
    return f"shiftmourre.{Path(frames[-1].filename).stem}" if frames else "shiftmourre"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "symcheck":
            return cmd_symcheck(args)
        cfg = RunConfig.load(args.config) if args.config else RunConfig.from_dict({})
        if args.plots:
            cfg.outputs.plots = True
        out = Path(args.out or cfg.outputs.dir)
        if args.json:
            print(json.dumps(cfg.to_dict(), indent=2))
        if args.jobs < 1:
            raise ValidationError("--jobs must be at least 1")
        _COMMANDS[args.command](cfg, _Writer(out, cfg, args.command), args.jobs)
        return 0
    except ValidationError as exc:
        print(f"error [{_origin(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error [{_origin(exc)}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ShiftMourreError as exc:
        print(f"error [{_origin(exc)}] {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
