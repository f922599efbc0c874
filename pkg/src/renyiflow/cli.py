"""Command-line frontend.

Loads generators from builtin specs or JSON files, dispatches the
computations, and writes CSV / JSON reports atomically with fixed
17-significant-digit formatting so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from urllib.parse import parse_qs

import numpy as np

from . import balance_check as bc
from . import divergence as dv
from . import flow
from . import matcore as mc
from .errors import (
    DomainError,
    IntegrationError,
    RenyiflowError,
    SingularityError,
    StructuralError,
    ValidationError,
)
from .generator import (
    Generator,
    JumpTerm,
    build_gns,
    depolarizing_generator,
    qubit_xz_generator,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".renyiflow-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(path: str | None, text: str) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def parse_alphas(spec: str) -> list[float]:
    """Comma list `1,2,4` or inclusive range `start:stop:step`."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise DomainError(f"range syntax is start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise DomainError(f"range step must be positive in {spec!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + k * step for k in range(count)]
    else:
        vals = [float(p) for p in spec.split(",") if p.strip()]
    if not vals:
        raise DomainError(f"empty alpha list {spec!r}")
    if any(a <= 0.0 for a in vals):
        raise DomainError(f"alpha values must be positive in {spec!r}")
    return vals


def _parse_diag(entries: str) -> np.ndarray:
    lam = np.array([float(x) for x in entries.split(",")], dtype=float)
    return np.diag(lam).astype(complex)


def load_generator(spec: str) -> Generator:
    if spec.startswith("builtin:"):
        body = spec[len("builtin:"):]
        name, _, query = body.partition("?")
        params = {k: v[-1] for k, v in parse_qs(query).items()}
        if name == "carlen-maas":
            return bc.carlen_maas_counterexample()
        if name == "qubit-xz":
            return qubit_xz_generator()
        if name == "depolarizing":
            gamma = float(params.get("gamma", "1.0"))
            if "sigma" in params:
                sigma = _parse_diag(params["sigma"])
            else:
                n = int(params.get("n", "2"))
                sigma = np.eye(n, dtype=complex) / n
            return depolarizing_generator(gamma, sigma)
        raise ValidationError(f"unknown builtin generator {name!r}")
    if not os.path.exists(spec):
        raise ValidationError(f"generator file not found: {spec}")
    with open(spec) as fh:
        doc = json.load(fh)
    base = os.path.dirname(os.path.abspath(spec))
    sigma = _load_matrix_field(doc["sigma"], base)
    terms = []
    for entry in doc.get("terms", []):
        V = _load_matrix_field(entry["V"], base)
        terms.append(JumpTerm.of(V, float(entry.get("omega", 0.0)), entry.get("weight")))
    if not terms:
        raise ValidationError(f"{spec}: no jump terms given")
    return build_gns(sigma, terms, label=doc.get("label", os.path.basename(spec)))


def _load_matrix_field(value, base: str) -> np.ndarray:
    if isinstance(value, str):
        path = value if os.path.isabs(value) else os.path.join(base, value)
        with open(path) as fh:
            return mc.matrix_from_csv_block(fh.read())[1]
    return mc.rows_to_matrix(value)


def load_rho0(spec: str, G: Generator, seed: int) -> np.ndarray:
    if spec == "sigma":
        return G.sigma
    if spec == "random":
        return mc.random_density(np.random.default_rng(seed), G.n, floor=0.05)
    if spec.startswith("near-sigma"):
        _, _, d = spec.partition(":")
        delta = float(d) if d else 0.05
        w = mc.random_density(np.random.default_rng(seed), G.n, floor=0.05)
        return mc.hermitize((1.0 - delta) * G.sigma + delta * w)
    if os.path.exists(spec):
        with open(spec) as fh:
            return mc.require_density(mc.matrix_from_csv_block(fh.read())[1], name=spec)
    raise ValidationError(f"unrecognized rho0 spec {spec!r}")


# --- commands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        G = load_generator(args.generator)
    except RenyiflowError as exc:
        print(json.dumps({"valid": False, "failures": [str(exc)]}, indent=2))
        return EXIT_VALIDATION
    report = bc.balance_report(G)
    verdicts = report.verdicts
    lines = [f"generator: {G.label} (n={G.n})"]
    for key in ("gns", "kms", "bkm"):
        res = getattr(report, f"{key}_residual")
        lines.append(f"{key.upper()}: {'pass' if verdicts[key] else 'fail'} (residual {_fmt(res)})")
    prim = G.primitivity
    lines.append(f"primitive: {prim.primitive} (kernel dim {prim.kernel_dim})")
    print("\n".join(lines))
    return EXIT_OK


def cmd_dbcheck(args) -> int:
    G = load_generator(args.generator)
    alphas = parse_alphas(args.alphas)
    report = bc.balance_report(G, alphas)
    emit(args.out, json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_fig1(args) -> int:
    G = load_generator(args.generator)
    alphas = parse_alphas(args.alphas)
    rows = bc.fig1_sweep(G, alphas)
    lines = ["alpha,residual"]
    lines += [f"{_fmt(a)},{_fmt(r)}" for a, r in rows]
    emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    G = load_generator(args.generator)
    rho0 = load_rho0(args.rho0, G, args.seed)
    alphas = parse_alphas(args.alphas)
    if args.dt <= 0:
        raise DomainError(f"dt={args.dt} must be positive")
    store = max(1, args.store_every)
    traj = flow.integrate(G, rho0, args.t_end, args.dt, store_every=store)
    table = flow.divergence_trace(traj, alphas)
    lines = ["t,alpha,D,I"]
    lines += [f"{_fmt(t)},{_fmt(a)},{_fmt(D)},{_fmt(I)}" for t, a, D, I in table.rows()]
    emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gradflow(args) -> int:
    G = load_generator(args.generator)
    alphas = parse_alphas(args.alphas)
    rng = np.random.default_rng(args.seed)
    lines = ["sample,alpha,residual"]
    for s in range(args.samples):
        rho = mc.random_density(rng, G.n, floor=0.1)
        for a in alphas:
            r = flow.gradient_flow_residual(G, rho, a)
            lines.append(f"{s},{_fmt(a)},{_fmt(r)}")
    emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_constants(args) -> int:
    G = load_generator(args.generator)
    report = flow.lsi_constants(G, n_starts=args.starts, seed=args.seed)
    emit(args.out, json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    G = load_generator(args.generator)
    smin = float(np.linalg.eigvalsh(G.sigma)[0])
    eps = args.eps if args.eps is not None else smin**2 / 8.0
    if args.rho0 == "auto":
        rho0 = _shrink_to_entropy(G, eps, args.seed)
    else:
        rho0 = load_rho0(args.rho0, G, args.seed)
    report = flow.comparison_check(G, rho0, args.alpha0, args.alpha1, eps=eps)
    emit(args.out, json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def _shrink_to_entropy(G: Generator, eps: float, seed: int) -> np.ndarray:
    """Mix a random state toward sigma until its relative entropy is < eps."""
    w = mc.random_density(np.random.default_rng(seed), G.n, floor=0.05)
    delta = 0.5
    for _ in range(60):
        rho = mc.hermitize((1.0 - delta) * G.sigma + delta * w)
        if dv.relative_entropy(rho, G.sigma) <= 0.8 * eps:
            return rho
        delta *= 0.7
    raise ValidationError("could not construct an initial state inside the entropy ball")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="renyiflow", description=__doc__)
    p.add_argument("--config", help="JSON file of defaults for the chosen command")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--generator", required=True, help="builtin:<name> or JSON file")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--config", help="JSON file of defaults for this command")

    sp = sub.add_parser("validate", help="validate a generator and report balance verdicts")
    sp.add_argument("--generator", required=True)
    sp.add_argument("--config", help="JSON file of defaults for this command")
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("dbcheck", help="detailed-balance residual report")
    common(sp)
    sp.add_argument("--alphas", default="0.5,1,2,4")
    sp.set_defaults(fn=cmd_dbcheck)

    sp = sub.add_parser("fig1", help="order sweep of the weighted self-adjointness residual")
    common(sp)
    sp.add_argument("--alphas", default="0.25:6:0.25")
    sp.set_defaults(fn=cmd_fig1)

    sp = sub.add_parser("simulate", help="integrate and trace divergences")
    common(sp)
    sp.add_argument("--rho0", default="random")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--alphas", default="1,2")
    sp.add_argument("--t-end", type=float, required=True, dest="t_end")
    sp.add_argument("--dt", type=float, required=True)
    sp.add_argument("--store-every", type=int, default=1, dest="store_every")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("gradflow", help="gradient-flow identity residuals on random states")
    common(sp)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--alphas", default="0.5,1,1.5,2,3")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_gradflow)

    sp = sub.add_parser("constants", help="log-Sobolev constant brackets and estimates")
    common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--starts", type=int, default=10)
    sp.set_defaults(fn=cmd_constants)

    sp = sub.add_parser("compare", help="order-comparison theorem check")
    common(sp)
    sp.add_argument("--alpha0", type=float, required=True)
    sp.add_argument("--alpha1", type=float, required=True)
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--rho0", default="auto")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_compare)
    return p


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if not args.config:
        return args
    with open(args.config) as fh:
        doc = json.load(fh)
    for key, val in doc.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr):
            setattr(args, attr, val)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        args = _apply_config(args)
        return args.fn(args)
    except (ValidationError, StructuralError, DomainError) as exc:
        print(json.dumps({"error": "validation", "detail": str(exc)}), file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationError, SingularityError) as exc:
        print(json.dumps({"error": "numerical", "detail": str(exc)}), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
