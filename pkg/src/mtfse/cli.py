"""Configuration-driven experiment runner.

Subcommands map to the study families: ``solve`` (one time evolution),
``converge-space`` and ``converge-time`` (error sweeps against a
reference), ``stability`` (growth-factor regions), ``approx-compare``
(rational-basis versus mapped-Chebyshev approximation errors) and
``expm-bench`` (matrix-exponential fidelity).

Configs are flat sectioned key-value text; unknown keys are errors with
line numbers.  Every data file is byte-reproducible: fixed 17-significant
-digit formatting, newline endings, no timestamps.  Run metadata
(timings, versions) goes to a separate sidecar, and the fully resolved
config is echoed next to the outputs so a run can be replayed from it.
"""

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .basis import ThetaGrid, analyze, mcf_analyze, mcf_synthesize, synthesize
from .diagnostics import mass as state_mass
from .diagnostics import max_error
from .expm import cheb_expm
from .fraclap import assemble_full
from .potential import potential_operator
from .problems import INITIAL_FORMS, POTENTIAL_FORMS, exact_mass, initial_data, potential
from .stepper import (
    SPLITTING_SCHEMES,
    BlowUpError,
    amplification_factor,
    evolve_linear,
    evolve_nonlinear,
    exact_propagate,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


class ConfigError(Exception):
    pass


# -- config parsing ----------------------------------------------------------

_SCHEMA = {
    "problem": {
        "kind": ("linear", str),
        "alpha": ("1.0", float),
        "gamma": ("0.5", float),
        "potential": ("none", str),
        "barrier_height": ("100.0", float),
        "barrier_center": ("10.0", float),
        "initial": ("gaussian", str),
        "chirp": ("10.0", float),
    },
    "discretization": {
        "n_modes": ("64", int),
        "nu": ("4.0", float),
        "tau": ("0.001", float),
        "t_final": ("1.0", float),
        "integrator": ("exact", str),
    },
    "guard": {
        "blowup_amplitude": ("none", str),
    },
    "output": {
        "outputs": ("solution_csv", str),
    },
    "sweep": {
        "n_values": ("16, 32, 64, 128", str),
        "reference_n": ("256", int),
        "tau_values": ("0.125, 0.0625, 0.03125, 0.015625", str),
        "reference_tau": ("0.0001", float),
    },
    "stability": {
        "y_values": ("2, 5, 10", str),
        "re_min": ("-4.0", float),
        "re_max": ("1.0", float),
        "im_min": ("-6.0", float),
        "im_max": ("6.0", float),
        "n_grid": ("101", int),
    },
    "compare": {
        "function": ("lorentz4", str),
        "terms": ("8, 16, 32, 64", str),
    },
    "expm_bench": {
        "sizes": ("32, 64, 128", str),
        "omega": ("50.0", float),
    },
}

_INTEGRATORS = {"exact", "sm1", "sm2", "sm3", "krogstad_p22"}
_OUTPUT_KINDS = {"solution_csv", "mass_csv", "convergence_csv", "coeffs_csv", "stability_csv"}
_COMPARE_FUNCTIONS = {
    "gaussian": lambda x: np.exp(-(x**2)),
    "sech": lambda x: 2.0 * np.exp(-np.abs(x)) / (1.0 + np.exp(-2.0 * np.abs(x))),
    "lorentz2": lambda x: 1.0 / (x**2 + 4.0),
    "lorentz4": lambda x: 1.0 / (x**4 + 1.0),
}


def parse_config(path: Path) -> dict:
    """Parse and validate; unknown sections/keys carry their line number."""
    cfg = {sec: dict(keys) for sec, keys in _SCHEMA.items()}
    values = {sec: {k: v[0] for k, v in keys.items()} for sec, keys in _SCHEMA.items()}
    section = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in cfg:
                raise ConfigError(f"{path}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        if section is None:
            raise ConfigError(f"{path}:{lineno}: key outside any section")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in cfg[section]:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} in section [{section}]")
        values[section][key] = val

    out = {}
    for sec, keys in _SCHEMA.items():
        out[sec] = {}
        for key, (_, typ) in keys.items():
            raw = values[sec][key]
            try:
                out[sec][key] = typ(raw)
            except ValueError as exc:
                raise ConfigError(f"{path}: bad value for [{sec}] {key}: {raw!r} ({exc})")
    _validate(out)
    return out


def _validate(cfg: dict):
    p, d = cfg["problem"], cfg["discretization"]
    if p["kind"] not in ("linear", "nonlinear"):
        raise ConfigError(f"problem kind must be linear or nonlinear, got {p['kind']!r}")
    if not 0.0 < p["alpha"] < 2.0:
        raise ConfigError(f"alpha must lie in (0, 2), got {p['alpha']}")
    if p["gamma"] == 0.0:
        raise ConfigError("gamma must be nonzero")
    if p["potential"] not in POTENTIAL_FORMS:
        raise ConfigError(f"unknown potential {p['potential']!r}")
    if p["initial"] not in INITIAL_FORMS:
        raise ConfigError(f"unknown initial form {p['initial']!r}")
    if d["n_modes"] < 4:
        raise ConfigError(f"n_modes must be at least 4, got {d['n_modes']}")
    if d["tau"] <= 0.0 or d["t_final"] <= 0.0 or d["nu"] <= 0.0:
        raise ConfigError("tau, t_final and nu must be positive")
    if d["integrator"] not in _INTEGRATORS:
        raise ConfigError(f"unknown integrator {d['integrator']!r}")
    if p["kind"] == "nonlinear" and d["integrator"] != "krogstad_p22":
        raise ConfigError("nonlinear problems require integrator = krogstad_p22")
    for kind in _parse_list(cfg["output"]["outputs"], str):
        if kind not in _OUTPUT_KINDS:
            raise ConfigError(f"unknown output kind {kind!r}")
    guard = cfg["guard"]["blowup_amplitude"]
    if guard != "none":
        try:
            val = float(guard)
        except ValueError:
            raise ConfigError(f"blowup_amplitude must be a number or 'none', got {guard!r}")
        if val <= 0:
            raise ConfigError("blowup_amplitude must be positive")
    if cfg["compare"]["function"] not in _COMPARE_FUNCTIONS:
        raise ConfigError(f"unknown comparison function {cfg['compare']['function']!r}")


def _parse_list(text: str, typ):
    return [typ(part.strip()) for part in text.split(",") if part.strip()]


def echo_config(cfg: dict) -> str:
    lines = []
    for sec in _SCHEMA:
        lines.append(f"[{sec}]")
        for key in _SCHEMA[sec]:
            lines.append(f"{key} = {cfg[sec][key]}")
        lines.append("")
    return "\n".join(lines)


# -- formatting --------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header: list, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# -- problem assembly --------------------------------------------------------

def _build(cfg):
    p, d = cfg["problem"], cfg["discretization"]
    N, nu = d["n_modes"], d["nu"]
    A = assemble_full(N, p["alpha"], nu)
    Vf = potential(p["potential"], height=p["barrier_height"], center=p["barrier_center"])
    M = potential_operator(Vf, N, nu) if Vf is not None else None
    psi0 = initial_data(p["initial"], nu, chirp=p["chirp"])
    U0 = analyze(psi0, N, nu)
    return A, M, U0


def _reference_mass(cfg, U0):
    try:
        return exact_mass(cfg["problem"]["initial"])
    except ValueError:
        return state_mass(U0)


def _solution_rows(state):
    xs = ThetaGrid(state.n_modes, state.scaling).finite_nodes
    vals = synthesize(state, xs)
    return [(x, v.real, v.imag, abs(v)) for x, v in zip(xs, vals)]


# -- subcommands -------------------------------------------------------------

def cmd_solve(cfg, out_dir: Path, threads: int) -> int:
    p, d = cfg["problem"], cfg["discretization"]
    outputs = _parse_list(cfg["output"]["outputs"], str)
    A, M, U0 = _build(cfg)
    gamma, tau, t_final = p["gamma"], d["tau"], d["t_final"]
    n_steps = max(1, round(t_final / tau))
    stride = max(1, int(np.ceil(t_final / (200.0 * tau))))
    m_ref = _reference_mass(cfg, U0)
    guard_raw = cfg["guard"]["blowup_amplitude"]
    amplitude_guard = None if guard_raw == "none" else float(guard_raw)

    mass_rows = [(0.0, state_mass(U0), abs(state_mass(U0) - m_ref))]
    frames = [(0, U0)]

    def snapshot(n, t, U):
        if n % stride == 0 or n == n_steps:
            mass_rows.append((t, state_mass(U), abs(state_mass(U) - m_ref)))
            frames.append((len(frames), U))

    integrator = d["integrator"]
    try:
        if p["kind"] == "nonlinear":
            final = evolve_nonlinear(A, gamma, tau, n_steps, U0, callback=snapshot,
                                     amplitude_guard=amplitude_guard)
        elif integrator == "exact":
            final = exact_propagate(A, M, gamma, t_final, U0)
            mass_rows.append((t_final, state_mass(final), abs(state_mass(final) - m_ref)))
            frames.append((1, final))
        else:
            scheme = SPLITTING_SCHEMES[integrator]
            final = evolve_linear(A, M, gamma, scheme, tau, n_steps, U0, callback=snapshot)
    except BlowUpError as exc:
        print(f"blow-up detected at t = {exc.time:.6g}", file=sys.stderr)
        return EXIT_BLOWUP

    if "solution_csv" in outputs:
        for idx, state in frames:
            write_csv(out_dir / f"solution_{idx:04d}.csv",
                      ["x", "re_psi", "im_psi", "abs_psi"], _solution_rows(state))
    if "mass_csv" in outputs:
        write_csv(out_dir / "mass.csv", ["t", "mass", "mass_error"], mass_rows)
    if "coeffs_csv" in outputs:
        rows = [(int(k), abs(c)) for k, c in zip(final.laurent_indices, final.coeffs)]
        write_csv(out_dir / "coeffs.csv", ["k", "abs_coeff"], rows)
    return EXIT_OK


def cmd_converge_space(cfg, out_dir: Path, threads: int) -> int:
    p, d, s = cfg["problem"], cfg["discretization"], cfg["sweep"]
    n_values = _parse_list(s["n_values"], int)
    ref_n = s["reference_n"]
    gamma, t_final = p["gamma"], d["t_final"]

    def run(N):
        local = {sec: dict(v) for sec, v in cfg.items()}
        local["discretization"]["n_modes"] = N
        A, M, U0 = _build(local)
        if p["kind"] == "nonlinear":
            tau = d["tau"]
            return evolve_nonlinear(A, gamma, tau, max(1, round(t_final / tau)), U0)
        if d["integrator"] == "exact":
            return exact_propagate(A, M, gamma, t_final, U0)
        scheme = SPLITTING_SCHEMES[d["integrator"]]
        tau = d["tau"]
        return evolve_linear(A, M, gamma, scheme, tau, max(1, round(t_final / tau)), U0)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        states = list(pool.map(run, n_values + [ref_n]))
    ref = states[-1]
    rows = [(N, max_error(state, ref)) for N, state in zip(n_values, states[:-1])]
    write_csv(out_dir / "convergence.csv", ["param", "max_error"], rows)
    return EXIT_OK


def cmd_converge_time(cfg, out_dir: Path, threads: int) -> int:
    p, d, s = cfg["problem"], cfg["discretization"], cfg["sweep"]
    tau_values = _parse_list(s["tau_values"], float)
    ref_tau = s["reference_tau"]
    gamma, t_final = p["gamma"], d["t_final"]
    A, M, U0 = _build(cfg)

    def run(tau):
        n_steps = max(1, round(t_final / tau))
        if p["kind"] == "nonlinear":
            return evolve_nonlinear(A, gamma, tau, n_steps, U0)
        scheme = SPLITTING_SCHEMES[d["integrator"]]
        return evolve_linear(A, M, gamma, scheme, tau, n_steps, U0)

    if p["kind"] == "linear" and d["integrator"] == "exact":
        raise ConfigError("converge-time needs a stepping integrator, not 'exact'")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        states = list(pool.map(run, tau_values))
    if p["kind"] == "linear":
        ref = exact_propagate(A, M, gamma, t_final, U0)
    else:
        ref = run(ref_tau)
    rows = [(tau, max_error(state, ref)) for tau, state in zip(tau_values, states)]
    write_csv(out_dir / "convergence.csv", ["param", "max_error"], rows)
    return EXIT_OK


def cmd_stability(cfg, out_dir: Path, threads: int) -> int:
    st = cfg["stability"]
    ys = _parse_list(st["y_values"], float)
    res = np.linspace(st["re_min"], st["re_max"], st["n_grid"])
    ims = np.linspace(st["im_min"], st["im_max"], st["n_grid"])
    for yv in ys:
        y = 1j * yv
        rows = []
        for im in ims:
            for re in res:
                x = re + 1j * im
                inside = int(abs(amplification_factor(x, y)) <= 1.0)
                rows.append((re, im, inside))
        tag = _fmt(yv).replace(".", "p").replace("-", "m")
        write_csv(out_dir / f"stability_y{tag}.csv", ["re_x", "im_x", "inside"], rows)
    return EXIT_OK


def cmd_approx_compare(cfg, out_dir: Path, threads: int) -> int:
    comp = cfg["compare"]
    f = _COMPARE_FUNCTIONS[comp["function"]]
    terms = _parse_list(comp["terms"], int)
    xs = np.linspace(-20.0, 20.0, 801)
    target = f(xs)
    rows_mtf, rows_mcf = [], []
    for n in terms:
        state = analyze(f, n)
        err_mtf = float(np.max(np.abs(synthesize(state, xs) - target)))
        coeffs = mcf_analyze(f, 2 * n, n_quad=max(512, 8 * n))
        err_mcf = float(np.max(np.abs(mcf_synthesize(coeffs, xs) - target)))
        rows_mtf.append((2 * n, err_mtf))
        rows_mcf.append((2 * n, err_mcf))
    write_csv(out_dir / "mtf_error.csv", ["param", "max_error"], rows_mtf)
    write_csv(out_dir / "mcf_error.csv", ["param", "max_error"], rows_mcf)
    return EXIT_OK


def cmd_expm_bench(cfg, out_dir: Path, threads: int) -> int:
    bench = cfg["expm_bench"]
    sizes = _parse_list(bench["sizes"], int)
    omega = bench["omega"]
    err_rows, uni_rows = [], []
    for n in sizes:
        rng = np.random.default_rng(20240 + n)  # fixed construction, no CLI seed
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = 0.5 * (Z + np.conj(Z).T)
        radii = np.sum(np.abs(H), axis=1) - np.abs(np.diag(H))
        dg = np.real(np.diag(H))
        lo, hi = float(np.min(dg - radii)), float(np.max(dg + radii))
        lam = 2.0 * omega / (hi - lo)
        P = cheb_expm(H, lam, lo, hi)
        w, V = np.linalg.eigh(H)
        exact = (V * np.exp(-1j * lam * w)) @ np.conj(V).T
        err_rows.append((n, float(np.max(np.abs(P.matrix - exact)))))
        uni_rows.append((n, P.unitarity_defect()))
    write_csv(out_dir / "expm_error.csv", ["param", "max_error"], err_rows)
    write_csv(out_dir / "expm_unitarity.csv", ["param", "max_error"], uni_rows)
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "converge-space": cmd_converge_space,
    "converge-time": cmd_converge_time,
    "stability": cmd_stability,
    "approx-compare": cmd_approx_compare,
    "expm-bench": cmd_expm_bench,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mtfse",
        description="Spectral experiments for the fractional Schrodinger equation",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out-dir", required=True, type=Path)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    args.out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    try:
        status = _COMMANDS[args.command](cfg, args.out_dir, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    elapsed = time.perf_counter() - started

    (args.out_dir / "effective_config.cfg").write_text(echo_config(cfg))
    (args.out_dir / "run_info.txt").write_text(
        f"command: {args.command}\nversion: {__version__}\n"
        f"threads: {args.threads}\nwall_seconds: {elapsed:.3f}\n"
        f"status: {status}\n"
    )
    return status


if __name__ == "__main__":
    sys.exit(main())
