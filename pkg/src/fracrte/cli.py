"""Command-line front end.

Subcommands compute densities (transport, diffusion, ctrw, subordinate),
run the invariant suite (validate), or emit the benchmark figure data
(figures).  Output is CSV with a fixed schema; configuration comes from
flags, optionally layered over a flat key=value file.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .diffusion import DiffusionParams, diffusion_density_mwright, diffusion_density_quadrature
from .legendre import PhaseFunction
from .spectral import MediumParams
from .transport import MODES, QuadratureSpec, energy_density

CSV_HEADER = "x,U,method,alpha,t,N,mode"

FIGURE_PANELS = (
    (0.25, (0.0001, 0.0025, 0.01)),
    (0.5, (0.01, 0.05, 0.1)),
    (0.75, (0.05, 0.1, 0.2)),
)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description (defaults are the benchmark medium)."""

    subcommand: str = "transport"
    alpha: float = 0.5
    v: float = 1.0
    sigma_s: float = 10.0
    sigma_a: float = 0.0
    g: float = 0.9
    beta: tuple = ()
    N: int = 1
    x_min: float = -2.0
    x_max: float = 2.0
    n_x: int = 81
    times: tuple = (0.05,)
    k_max: float = 0.0  # 0 means automatic
    nodes_per_halfperiod: int = 16
    acceleration_order: int = 8
    tail_mode: str = "asymptotic_subtraction"
    mode: str = "hermitian"
    seed: int = 1
    n_walkers: int = 100000
    tau: float = 1e-4
    threads: int = 0  # 0 means hardware default
    output_path: str = "."

    def __post_init__(self):
        if self.subcommand not in ("transport", "diffusion", "ctrw", "subordinate",
                                   "validate", "figures"):
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.n_x < 2 or not self.x_min < self.x_max:
            raise ValueError("grid requires n_x >= 2 and x_min < x_max")
        ts = tuple(self.times)
        if any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("times must be positive and strictly increasing")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")

    def medium(self):
        if self.beta:
            phase = PhaseFunction(self.beta)
        else:
            phase = PhaseFunction.linear(self.g)
        return MediumParams(alpha=self.alpha, v=self.v, sigma_s=self.sigma_s,
                            sigma_a=self.sigma_a, phase=phase)

    def quadrature(self):
        return QuadratureSpec(
            k_max=self.k_max if self.k_max > 0 else None,
            nodes_per_halfperiod=self.nodes_per_halfperiod,
            acceleration_order=self.acceleration_order,
            tail_mode=self.tail_mode,
        )

    def x_grid(self):
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def worker_count(self):
        if self.threads > 0:
            return self.threads
        env = os.environ.get("FRACRTE_THREADS", "")
        if env.isdigit() and int(env) > 0:
            return int(env)
        return os.cpu_count() or 1


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(key, raw):
    if key in ("times", "beta"):
        parts = [p for p in str(raw).replace(",", " ").split() if p]
        return tuple(float(p) for p in parts)
    if key in ("N", "n_x", "seed", "n_walkers", "threads",
               "nodes_per_halfperiod", "acceleration_order"):
        return int(raw)
    if key in ("subcommand", "mode", "tail_mode", "output_path"):
        return str(raw)
    return float(raw)


def load_config_file(path):
    """Read flat key=value lines ('#' starts a comment) into a dict."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw)
    return values


def emit_config(config):
    """Serialize a config as key=value text; inverse of the file loader."""
    lines = []
    for f in fields(RunConfig):
        val = getattr(config, f.name)
        if isinstance(val, tuple):
            val = ",".join(repr(v) for v in val)
        lines.append(f"{f.name}={val}")
    return "\n".join(lines) + "\n"


def parse_config(argv):
    """Resolve a RunConfig: flags override file values override defaults."""
    parser = argparse.ArgumentParser(
        prog="fracrte",
        description="Fractional-in-time transport in a 1D slab: spectral solver, "
                    "diffusion limit, random-walk sampler, subordination.",
    )
    parser.add_argument("subcommand",
                        choices=["transport", "diffusion", "ctrw", "subordinate",
                                 "validate", "figures"])
    parser.add_argument("--config", help="flat key=value configuration file")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--v", type=float)
    parser.add_argument("--sigma-s", dest="sigma_s", type=float)
    parser.add_argument("--sigma-a", dest="sigma_a", type=float)
    parser.add_argument("--g", type=float, help="anisotropy factor; sets beta_1 = 3g")
    parser.add_argument("--beta", help="comma-separated kernel coefficients beta_0,beta_1,...")
    parser.add_argument("--N", type=int, help="truncation order")
    parser.add_argument("--x-min", dest="x_min", type=float)
    parser.add_argument("--x-max", dest="x_max", type=float)
    parser.add_argument("--n-x", dest="n_x", type=int)
    parser.add_argument("--t", dest="times", help="comma-separated times")
    parser.add_argument("--k-max", dest="k_max", type=float)
    parser.add_argument("--nodes-per-halfperiod", dest="nodes_per_halfperiod", type=int)
    parser.add_argument("--acceleration-order", dest="acceleration_order", type=int)
    parser.add_argument("--tail-mode", dest="tail_mode",
                        choices=["none", "asymptotic_subtraction"])
    parser.add_argument("--mode", choices=list(MODES))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--n-walkers", dest="n_walkers", type=int)
    parser.add_argument("--tau", type=float)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--output-path", dest="output_path")
    args = parser.parse_args(argv)

    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for f in fields(RunConfig):
        flag_val = getattr(args, f.name, None)
        if flag_val is not None:
            values[f.name] = _parse_value(f.name, flag_val) if f.name in ("times", "beta") else flag_val
    values["subcommand"] = args.subcommand
    return RunConfig(**values)


def _write_csv(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for x, u, method, alpha, t, n, mode in rows:
            fh.write(f"{x:.12g},{u:.12g},{method},{alpha:.12g},{t:.12g},{n},{mode}\n")


def _density_rows(xs, values, method, alpha, t, n, mode):
    return [(x, u, method, alpha, t, n, mode) for x, u in zip(xs, values)]


def _run_transport(config, out_dir):
    params = config.medium()
    xs = config.x_grid()
    df = energy_density(xs, config.times, params, config.N, mode=config.mode,
                        spec=config.quadrature(), workers=config.worker_count())
    paths = []
    for it, t in enumerate(config.times):
        path = os.path.join(out_dir, f"transport_alpha{config.alpha:g}_t{t:g}.csv")
        _write_csv(path, _density_rows(xs, df.values[it], config.mode, config.alpha,
                                       t, config.N, config.mode))
        paths.append(path)
    return paths


def _run_diffusion(config, out_dir):
    params = config.medium()
    dp = DiffusionParams.from_medium(params)
    xs = config.x_grid()
    paths = []
    for t in config.times:
        if dp.sigma_a == 0.0:
            vals = diffusion_density_mwright(xs, t, dp)
        else:
            vals = np.array([diffusion_density_quadrature(x, t, dp) for x in xs])
        path = os.path.join(out_dir, f"diffusion_alpha{config.alpha:g}_t{t:g}.csv")
        _write_csv(path, _density_rows(xs, vals, "diffusion", config.alpha, t,
                                       config.N, config.mode))
        paths.append(path)
    return paths


def _run_ctrw(config, out_dir):
    from .ctrw import simulate_density

    params = config.medium()
    xs = config.x_grid()
    res = simulate_density(config.n_walkers, config.times, xs, params,
                           config.tau, config.seed)
    paths = []
    for it, t in enumerate(config.times):
        path = os.path.join(out_dir, f"ctrw_alpha{config.alpha:g}_t{t:g}.csv")
        _write_csv(path, _density_rows(xs, res.field.values[it], "ctrw",
                                       config.alpha, t, config.N, config.mode))
        paths.append(path)
    return paths


def _run_subordinate(config, out_dir):
    """Order-alpha density built from the first-order solution.

    The first-order moment data is decomposed once on a shared wavenumber
    layout; each operational-time node only re-exponentiates and reduces,
    and a mild mollifier regularizes the first-order wave fronts.
    """
    from .specfun import mittag_leffler
    from .subordination import build_kernel
    from .transport import _EnergyLayout, _mode_weights_batch

    if not (0.0 < config.alpha < 1.0):
        raise ValueError("subordinate requires alpha strictly inside (0, 1)")
    params = config.medium()
    base = replace(params, alpha=1.0)
    xs = config.x_grid()
    spec = config.quadrature()
    if spec.k_max is None:
        spec = QuadratureSpec(k_max=350.0, nodes_per_halfperiod=spec.nodes_per_halfperiod,
                              acceleration_order=spec.acceleration_order, tail_mode="none")
    mollifier = 6.0 / spec.k_max
    x_abs = np.abs(xs)
    layout = _EnergyLayout(base, spec, float(np.max(x_abs)) or 1.0, spec.k_max)
    lam, w = _mode_weights_batch(layout.flat_nodes, base, config.N, "exact")

    paths = []
    for t in config.times:
        kernel = build_kernel(t, config.alpha)
        acc = np.zeros(xs.shape)
        for tau, wk in zip(kernel.nodes, kernel.weights):
            if wk < 1e-16:
                continue
            ml = np.exp(-(lam.ravel()) * tau).reshape(lam.shape)
            u_hat = np.einsum("kn,kn->k", w, ml).real
            acc += wk * layout.reduce(u_hat, x_abs, tau, mollifier_width=mollifier)
        path = os.path.join(out_dir, f"subordinate_alpha{config.alpha:g}_t{t:g}.csv")
        _write_csv(path, _density_rows(xs, acc, "subordinate", config.alpha, t,
                                       config.N, "exact"))
        paths.append(path)
    return paths


def _run_figures(config, out_dir):
    paths = []
    for alpha, times in FIGURE_PANELS:
        cfg = replace(config, alpha=alpha, times=times, x_min=-2.0, x_max=2.0)
        params = cfg.medium()
        xs = cfg.x_grid()
        df = energy_density(xs, times, params, cfg.N, mode=cfg.mode,
                            spec=cfg.quadrature(), workers=cfg.worker_count())
        dp = DiffusionParams.from_medium(params)
        for it, t in enumerate(times):
            p1 = os.path.join(out_dir, f"figures_alpha{alpha:g}_t{t:g}_transport.csv")
            _write_csv(p1, _density_rows(xs, df.values[it], cfg.mode, alpha, t,
                                         cfg.N, cfg.mode))
            vals = diffusion_density_mwright(xs, t, dp)
            p2 = os.path.join(out_dir, f"figures_alpha{alpha:g}_t{t:g}_diffusion.csv")
            _write_csv(p2, _density_rows(xs, vals, "diffusion", alpha, t,
                                         cfg.N, cfg.mode))
            paths.extend([p1, p2])
    return paths


def _run_validate(config):
    """Fast invariant sweep; prints one pass/fail line per check."""
    from .specfun import f_alpha_half, mittag_leffler
    from .spectral import assemble_operator, critical_wavenumber, decompose, hermitian_mode_weights
    from .subordination import build_kernel
    from .transport import (ballistic_coefficients, evolve_coefficients,
                            scattered_coefficients)

    checks = []
    z = np.linspace(-8, 0, 33)
    checks.append(("mittag_leffler order one reduces to exp",
                   float(np.max(np.abs(mittag_leffler(1.0, z) - np.exp(z)))) < 1e-10))
    x = np.linspace(0, 5, 26)
    checks.append(("order-two value matches cosine",
                   float(np.max(np.abs(mittag_leffler(2.0, -x**2) - np.cos(x)))) < 1e-10))
    checks.append(("stable kernel closed form",
                   abs(f_alpha_half(1.0) - np.exp(-0.25) / (2 * np.sqrt(np.pi))) < 1e-14))

    params = config.medium()
    k_c = critical_wavenumber(params)
    ks = np.linspace(0.05, 3.0, 12) * k_c
    ok_eig = True
    for k in ks:
        dec = decompose(assemble_operator(float(k), params, 1))
        s = np.sqrt(complex(1 - (k / k_c) ** 2))
        lam_ref = sorted([(k_c / np.sqrt(3)) * (1 + s), (k_c / np.sqrt(3)) * (1 - s)],
                         key=lambda v: (round(v.real, 9), v.imag))
        lam_got = sorted(dec.eigenvalues, key=lambda v: (round(v.real, 9), v.imag))
        ok_eig &= max(abs(a - b) for a, b in zip(lam_got, lam_ref)) < 1e-9
        ok_eig &= abs(np.sum(hermitian_mode_weights(dec)) - 1.0) < 1e-10
    checks.append(("two-moment eigenvalues match closed form", bool(ok_eig)))

    rng = np.random.default_rng(config.seed)
    ok_split = True
    for _ in range(10):
        k = rng.uniform(0.05, 8.0)
        t = rng.uniform(0.01, 1.0)
        mu0 = rng.uniform(-1, 1)
        cb = ballistic_coefficients(k, t, mu0, 3, params).c
        cs = scattered_coefficients(k, t, mu0, 3, params).c
        cf = evolve_coefficients(k, t, mu0, 3, params).c
        ok_split &= float(np.linalg.norm(cb + cs - cf)) < 1e-8
    checks.append(("ballistic plus scattered equals full", bool(ok_split)))

    if 0.0 < config.alpha < 1.0:
        kernel = build_kernel(max(config.times[0], 1e-3), config.alpha)
        checks.append(("subordination kernel has unit mass",
                       abs(kernel.mass - 1.0) < 1e-6))

    dp = DiffusionParams.from_medium(params)
    if dp.sigma_a == 0:
        t = config.times[0]
        xs = np.linspace(0, 2, 9)
        mw = diffusion_density_mwright(xs, t, dp)
        qd = np.array([diffusion_density_quadrature(xv, t, dp) for xv in xs])
        checks.append(("diffusion quadrature matches closed form",
                       float(np.max(np.abs(mw - qd) / (1 + np.abs(mw)))) < 1e-6))

    failed = 0
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += 0 if ok else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return failed == 0


def run(config):
    """Execute a resolved configuration; returns the process exit status."""
    if config.subcommand == "validate":
        return 0 if _run_validate(config) else 1
    out_dir = config.output_path
    try:
        os.makedirs(out_dir, exist_ok=True)
        probe = os.path.join(out_dir, ".fracrte_write_probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        print(f"error: output path not writable: {exc}", file=sys.stderr)
        return 3
    try:
        if config.subcommand == "transport":
            paths = _run_transport(config, out_dir)
        elif config.subcommand == "diffusion":
            paths = _run_diffusion(config, out_dir)
        elif config.subcommand == "ctrw":
            paths = _run_ctrw(config, out_dir)
        elif config.subcommand == "subordinate":
            paths = _run_subordinate(config, out_dir)
        else:
            paths = _run_figures(config, out_dir)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for p in paths:
        print(p)
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
