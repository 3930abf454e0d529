"""Command-line front end emitting figure-ready tables.

Configuration precedence: command-line flags > ``--config`` file > defaults.
Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np

from . import __version__, dynamics, edge, linalg, topology
from .errors import NumericalError
from .model import ChainParams, OnSitePotential, build_open_chain
from .output import render

COMMON_DEFAULTS = {
    "n": "20", "t0": "1", "phi": "0", "gamma1": "0", "gamma2": "0", "tau": "0",
    "omega": "0", "onsite": "none", "kpoints": "4001", "format": "csv",
    "out": "-", "workers": "1",
}

COMMAND_DEFAULTS = {
    "phase-diagram": {"phi-grid": "0:pi:101", "gamma1-grid": "", "gamma2-grid": "0:2:101"},
    "dispersion": {},
    "spectrum": {"phi-grid": "0:0.5pi:101"},
    "oscillation": {"phi-grid": "0:0.49pi:500", "n-grid": ""},
    "edge-coupling": {"phi-grid": "0.05pi:0.45pi:81"},
    "dynamics": {"t-max": "200", "t-points": "2001", "init-site": "1"},
    "selftest": {"seed": "0", "samples": "50"},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


_ANGLE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-])?\s*(\*?\s*pi)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Radians from ``0.4pi``, ``pi/2``, ``-pi`` or a plain number."""
    m = _ANGLE.match(str(text))
    if not m or (m.group(1) is None and m.group(2) is None):
        raise UsageError(f"cannot parse angle {text!r}")
    sign = {"+": 1.0, "-": -1.0}
    coef = sign.get(m.group(1), 1.0) if m.group(1) in (None, "+", "-") else float(m.group(1))
    value = coef * (math.pi if m.group(2) else 1.0)
    if m.group(3):
        value /= float(m.group(3))
    return value


def parse_grid(text: str, angle: bool = False) -> np.ndarray:
    """``START:STOP:COUNT`` inclusive uniform grid."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} must be START:STOP:COUNT")
    conv = parse_angle if angle else _float
    start, stop = conv(parts[0]), conv(parts[1])
    count = _int(parts[2])
    if count < 2:
        raise UsageError("a sweep grid needs at least 2 points")
    return np.linspace(start, stop, count)


def parse_n_grid(text: str) -> list[int]:
    """``10,20,30`` or ``10:40`` or ``10:40:5`` (inclusive)."""
    text = str(text).strip()
    if ":" in text:
        parts = [_int(x) for x in text.split(":")]
        if len(parts) not in (2, 3):
            raise UsageError(f"bad N grid {text!r}")
        step = parts[2] if len(parts) == 3 else 1
        values = list(range(parts[0], parts[1] + 1, step))
    else:
        values = [_int(x) for x in text.split(",") if x.strip()]
    if not values or min(values) < 1:
        raise UsageError(f"bad N grid {text!r}")
    return values


def parse_onsite(text: str) -> OnSitePotential:
    kinds = {"uniform": "uniform_loss", "staggered": "staggered_gain_loss",
             "endpoints": "endpoints_only"}
    text = str(text).strip()
    if text == "none":
        return OnSitePotential()
    name, _, strength = text.partition(":")
    if name not in kinds or not strength:
        raise UsageError(f"bad --onsite {text!r}; use none|uniform:G|staggered:G|endpoints:G")
    return OnSitePotential(kinds[name], _float(strength))


def _float(text) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"expected a number, got {text!r}") from None


def _int(text) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"expected an integer, got {text!r}") from None


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; keys mirror flag names, ``#`` starts a comment."""
    cfg = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        cfg[key.strip().replace("_", "-")] = value.strip()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    for flag, meta in [("n", "INT"), ("t0", "FLOAT"), ("phi", "ANGLE"), ("gamma1", "FLOAT"),
                       ("gamma2", "FLOAT"), ("tau", "FLOAT"), ("omega", "FLOAT"),
                       ("onsite", "SPEC"), ("kpoints", "INT"), ("out", "PATH"),
                       ("workers", "INT")]:
        shared.add_argument(f"--{flag}", metavar=meta)
    shared.add_argument("--format", choices=["csv", "json"])
    shared.add_argument("--config", metavar="PATH")

    parser = _Parser(prog="dissipative-ssh",
                     description="Dissipatively coupled SSH chain: figure data generator.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    extra = {
        "phase-diagram": [("phi-grid", "START:STOP:COUNT"), ("gamma1-grid", "START:STOP:COUNT"),
                          ("gamma2-grid", "START:STOP:COUNT")],
        "dispersion": [],
        "spectrum": [("phi-grid", "START:STOP:COUNT")],
        "oscillation": [("phi-grid", "START:STOP:COUNT"), ("n-grid", "LIST")],
        "edge-coupling": [("phi-grid", "START:STOP:COUNT")],
        "dynamics": [("t-max", "FLOAT"), ("t-points", "INT"), ("init-site", "INT")],
        "selftest": [("seed", "INT"), ("samples", "INT")],
    }
    helps = {
        "phase-diagram": "phase and winding number on a (phi, gamma2) or (gamma1, gamma2) grid",
        "dispersion": "complex Bloch bands E+-(k)",
        "spectrum": "all eigenvalues of the open chain versus phi",
        "oscillation": "numerical and analytic edge-pair energies versus phi or N",
        "edge-coupling": "adiabatic edge coupling E'+- against the edge pair E+-",
        "dynamics": "single-excitation populations under the bath model",
        "selftest": "randomized consistency checks",
    }
    for name, flags in extra.items():
        sp = sub.add_parser(name, parents=[shared], help=helps[name],
                            argument_default=argparse.SUPPRESS)
        for flag, meta in flags:
            sp.add_argument(f"--{flag}", metavar=meta)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    explicit = {k.replace("_", "-"): v for k, v in vars(args).items()
                if k not in ("command", "config")}
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS[args.command])
    if getattr(args, "config", None):
        from_file = read_config(args.config)
        unknown = set(from_file) - set(cfg)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(from_file)
    cfg.update(explicit)
    return cfg


def chain_params(cfg: dict) -> ChainParams:
    try:
        return ChainParams(
            n_cells=_int(cfg["n"]), t0=_float(cfg["t0"]), phi=parse_angle(cfg["phi"]),
            gamma1=_float(cfg["gamma1"]), gamma2=_float(cfg["gamma2"]),
            tau=_float(cfg["tau"]), omega=_float(cfg["omega"]),
            onsite=parse_onsite(cfg["onsite"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _map(fn: Callable, items, workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _phi_grid(cfg, p: ChainParams) -> np.ndarray:
    grid = parse_grid(cfg["phi-grid"], angle=True)
    if grid.min() < 0 or grid.max() > math.pi + 1e-12:
        raise UsageError("phi grid must lie in [0, pi]")
    return np.clip(grid, 0.0, math.pi)


def cmd_phase_diagram(cfg, p):
    g2 = parse_grid(cfg["gamma2-grid"])
    if cfg.get("gamma1-grid"):
        g1 = parse_grid(cfg["gamma1-grid"])
        points = [p.replace(gamma1=float(a), gamma2=float(b)) for a in g1 for b in g2]
    else:
        points = [p.replace(phi=float(f), gamma2=float(b))
                  for f in _phi_grid(cfg, p) for b in g2]
    n_k = _int(cfg["kpoints"])

    def row(q):
        rep = topology.classify_phase(q)
        if rep.phase == "boundary":
            winding = "boundary"
        else:
            try:
                winding = topology.winding_number(q, max(n_k, 1001))
            except NumericalError as exc:
                winding = type(exc).__name__
        return [q.phi, q.gamma1, q.gamma2, rep.lhs, rep.rhs, rep.phase, winding]

    rows = _map(row, points, _int(cfg["workers"]))
    return ["phi", "gamma1", "gamma2", "lhs", "rhs", "phase", "winding"], rows, []


def cmd_dispersion(cfg, p):
    curve = topology.dispersion(p, _int(cfg["kpoints"]))
    rows = [[float(k), ep.real, ep.imag, em.real, em.imag]
            for k, ep, em in zip(curve.k_grid, curve.E_plus, curve.E_minus)]
    return ["k", "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus"], rows, []


def cmd_spectrum(cfg, p):
    def block(phi):
        q = p.replace(phi=float(phi))
        h, dec = edge.decompose_chain(q)
        try:
            ip, im = edge.find_edge_pair(h, dec, edge._center(q))
        except NumericalError:
            ip = im = -1
        out = []
        for i, e in enumerate(dec.eigenvalues):
            tag = "+" if i == ip else "-" if i == im else ""
            out.append([q.phi, i, e.real, e.imag, tag])
        return out

    blocks = _map(block, _phi_grid(cfg, p), _int(cfg["workers"]))
    rows = [r for b in blocks for r in b]
    return ["phi", "index", "re_E", "im_E", "edge"], rows, []


def _c(z):
    return [z.real, z.imag]


def cmd_oscillation(cfg, p):
    workers = _int(cfg["workers"])
    if cfg.get("n-grid"):
        table = edge.oscillation_sweep(p, n_values=parse_n_grid(cfg["n-grid"]), workers=workers)
    else:
        table = edge.oscillation_sweep(p, phis=_phi_grid(cfg, p), workers=workers)
    cols = ["phi", "n", "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus",
            "re_delta_E", "im_delta_E", "re_E_plus_analytic", "im_E_plus_analytic",
            "re_delta_E_analytic", "im_delta_E_analytic", "A_T", "theta_T",
            "re_xi_T", "im_xi_T", "flag"]
    rows = [[r.phi, r.n_cells, *_c(r.E_plus), *_c(r.E_minus), *_c(r.delta_E),
             *_c(r.E_plus_analytic), *_c(r.delta_E_analytic), r.A_T, r.theta_T,
             *_c(r.xi_T), r.flag] for r in table]
    return cols, rows, []


def cmd_edge_coupling(cfg, p):
    # edge pair of the open chain at gamma1 = gamma2 = tau / 2
    def row(phi):
        q = p.replace(phi=float(phi))
        flag = ""
        try:
            ec = dynamics.adiabatic_edge_coupling(dynamics.build_liouvillian(q))
            ep_prime = ec.E_prime_plus
        except NumericalError as exc:
            ep_prime, flag = complex(math.nan, math.nan), type(exc).__name__
        try:
            an = edge.analyze_edges(q.replace(gamma1=0.5 * q.tau, gamma2=0.5 * q.tau,
                                              onsite=OnSitePotential()))
            ep = an.E_plus
        except NumericalError as exc:
            ep, flag = complex(math.nan, math.nan), flag or type(exc).__name__
        d = ep_prime - ep
        return [q.phi, *_c(ep_prime), *_c(-ep_prime), *_c(ep), *_c(-ep),
                abs(d.real), abs(d.imag), abs(d), flag]

    rows = _map(row, _phi_grid(cfg, p), _int(cfg["workers"]))
    cols = ["phi", "re_Ep_plus", "im_Ep_plus", "re_Ep_minus", "im_Ep_minus",
            "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus",
            "abs_re_diff", "abs_im_diff", "abs_diff", "flag"]
    return cols, rows, ["E_plus from the open chain with gamma1 = gamma2 = tau/2"]


def cmd_dynamics(cfg, p):
    model = dynamics.build_liouvillian(p)
    dim = 2 * p.n_cells
    site = _int(cfg["init-site"])
    if not 1 <= site <= dim:
        raise UsageError(f"init-site must be in 1..{dim}")
    t = np.linspace(0.0, _float(cfg["t-max"]), _int(cfg["t-points"]))
    psi0 = np.zeros(dim, dtype=np.complex128)
    psi0[site - 1] = 1.0
    traj = dynamics.evolve_single_excitation(model, psi0, t)
    notes = []
    if p.n_cells >= 2:
        ec = dynamics.adiabatic_edge_coupling(model)
        predicted = math.pi / abs(ec.delta_g) if ec.delta_g else math.inf
        far = traj.populations[:, -1 if site <= p.n_cells else 0]
        rel = np.divide(far, traj.excited, out=np.zeros_like(far), where=traj.excited > 0)
        fitted = float(dynamics.beat_period(t, rel))
        notes = [f"delta_g: {ec.delta_g!r}", f"delta_gamma: {ec.delta_gamma!r}",
                 f"adiabatic_beat_period: {predicted!r}", f"fitted_beat_period: {fitted!r}"]
    cols = ["t", "P_e", "P_g"] + [f"pop_{s}" for s in range(1, dim + 1)]
    rows = [[float(tt), float(pe), float(pg), *map(float, pops)]
            for tt, pe, pg, pops in zip(t, traj.excited, traj.ground, traj.populations)]
    return cols, rows, notes


def run_selftest(cfg, p) -> tuple[list, list, list]:
    """Randomized checks of the core invariants; returns one row per check."""
    rng = np.random.default_rng(_int(cfg["seed"]))
    samples = _int(cfg["samples"])
    results = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # report, never crash the selftest
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append([name, "PASS" if ok else "FAIL", detail])

    def rand_params(max_n=30):
        return ChainParams(int(rng.integers(2, max_n + 1)), phi=float(rng.uniform(0, math.pi)),
                           gamma1=float(rng.uniform(0, 2)), gamma2=float(rng.uniform(0, 2)))

    draws = [rand_params() for _ in range(samples)]

    def eig_residual():
        worst = 0.0
        for q in draws:
            h = build_open_chain(q)
            dec = linalg.eig(h)
            worst = max(worst, dec.residual_max / np.linalg.norm(h))
        return worst <= 1e-10, f"max relative residual {worst:.3g}"

    def chiral():
        worst = 0.0
        for q in draws:
            e = np.sort_complex(linalg.eigvals(build_open_chain(q)))
            worst = max(worst, float(np.max(np.abs(np.sort_complex(-e) - e))))
        return worst <= 1e-9, f"max |E + E'| {worst:.3g}"

    def winding():
        bad = 0
        for _ in range(samples):
            q = ChainParams(1, phi=float(rng.uniform(0, math.pi)),
                            gamma1=float(rng.uniform(0, 2)), gamma2=float(rng.uniform(0, 2)))
            rep = topology.classify_phase(q)
            if abs(rep.lhs - rep.rhs) < 1e-3:
                continue
            bad += topology.winding_number(q) != int(rep.phase == "topological")
        return bad == 0, f"{bad} disagreements"

    check("eigen_residual", eig_residual)
    check("chiral_symmetry", chiral)
    check("winding_vs_inequality", winding)
    return ["check", "status", "detail"], results, []


COMMANDS = {
    "phase-diagram": cmd_phase_diagram,
    "dispersion": cmd_dispersion,
    "spectrum": cmd_spectrum,
    "oscillation": cmd_oscillation,
    "edge-coupling": cmd_edge_coupling,
    "dynamics": cmd_dynamics,
    "selftest": run_selftest,
}


def _write(text: str, path: str) -> None:
    if path in ("-", ""):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        p = chain_params(cfg)
        if cfg["format"] not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        cols, rows, notes = COMMANDS[args.command](cfg, p)
    except NumericalError as exc:
        sys.stderr.write(f"dissipative-ssh: {type(exc).__name__}: {exc}\n")
        return 2
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"dissipative-ssh: error: {exc}\n")
        return 1
    header = {"artifact": f"dissipative-ssh {__version__}", "command": args.command}
    # the output path is left out so identical runs give identical files
    header.update({f"config.{k}": cfg[k] for k in sorted(cfg) if k != "out"})
    _write(render(header, cols, rows, cfg["format"], notes), cfg["out"])
    if args.command == "selftest":
        return 0 if all(r[1] == "PASS" for r in rows) else 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
