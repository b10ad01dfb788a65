"""Command line entry point: ``horn <subcommand> ...``.

Every run ends with a manifest (argument echo, seed, versions, wall-clock,
sha256 of the written files).  It goes to ``<out>.manifest.json`` when
``--out`` is given, otherwise to stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import HornError


class UsageError(Exception):
    pass


# -- argument parsing ------------------------------------------------------------


def parse_numbers(text: str) -> tuple:
    """'1,0,-1' or '3/4,-3/4': Fractions when every entry is exact, else floats."""
    toks = [t.strip() for t in str(text).split(",") if t.strip()]
    if not toks:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    exact = all(not any(c in t for c in ".eEnN") for t in toks)
    try:
        if exact:
            return tuple(Fraction(t) for t in toks)
        return tuple(float(Fraction(t)) if "/" in t else float(t) for t in toks)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot parse {text!r}") from None


def parse_labels(text: str) -> tuple:
    toks = [t.strip() for t in str(text).split(",") if t.strip()]
    try:
        return tuple(int(t) for t in toks)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Dynkin labels must be integers: {text!r}") from None


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("HORN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"HORN_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return repr(float(x)) if not isinstance(x, (int, Fraction)) else str(x)


# -- subcommands -------------------------------------------------------------------
# Each returns (result for --json / stdout, {path: text written}) and may set
# ``ctx["seed"]``.


def _spec(values, n=None, traceless=False, name="spectrum"):
    from .spectra import make_spectrum

    if n is not None and len(values) != n:
        raise UsageError(f"{name} must have {n} entries")
    return make_spectrum(values, traceless)


def cmd_sample(args, ctx):
    from .sampler import SamplerConfig, horn_histogram
    from .spectra import weyl_box

    alpha = _spec(args.alpha, args.n, name="alpha")
    beta = _spec(args.beta, args.n, name="beta")
    cfg = SamplerConfig(args.group, args.n, alpha, beta, args.samples, args.seed, args.t)
    ctx["seed"] = args.seed
    if args.bounds:
        bounds = args.bounds
    else:
        a = [args.t * float(v) for v in alpha.as_array()]
        if args.t < 0:
            a = a[::-1]
        box = weyl_box(a, [float(v) for v in beta.as_array()])
        bounds = (float(box[0][0]), float(box[0][1]), float(box[1][0]), float(box[1][1]))
    if len(bounds) != 4:
        raise UsageError("--bounds takes g1min,g1max,g2min,g2max")
    h = horn_histogram(cfg, bounds, (args.bins, args.bins), _threads(args))
    summary = {"total": h.total, "overflow": h.overflow, "bounds": list(h.bounds), "bins": list(h.bins)}
    files = {}
    if args.out:
        c1, c2 = h.centers()
        rows = [[repr(float(c1[a])), repr(float(c2[b])), int(h.counts[a, b])]
                for a in range(h.bins[0]) for b in range(h.bins[1])]
        files[args.out] = _csv_text(["gamma1_center", "gamma2_center", "count"], rows)
        meta = dict(summary)
        meta.update(cfg.echo())
        files[args.out + ".json"] = json.dumps(meta, indent=2, sort_keys=True) + "\n"
    return summary, files


def cmd_schur(args, ctx):
    from .sampler import Histogram2D, sample_schur_array

    alpha = _spec(args.alpha, args.n, name="alpha")
    ctx["seed"] = args.seed
    diag = sample_schur_array(args.group, args.n, alpha, args.samples, args.seed, _threads(args))
    lo, hi = float(min(alpha)), float(max(alpha))
    files = {}
    if args.n == 2:
        edges = np.linspace(lo, hi, args.bins + 1)
        counts, _ = np.histogram(diag[:, 0], bins=edges)
        summary = {"total": int(len(diag)), "bins": args.bins, "range": [lo, hi]}
        if args.out:
            rows = [[repr(float(0.5 * (edges[i] + edges[i + 1]))), int(counts[i])] for i in range(args.bins)]
            files[args.out] = _csv_text(["xi1_center", "count"], rows)
    else:
        h = Histogram2D((lo, hi, lo, hi), (args.bins, args.bins)).add(diag[:, :2])
        summary = {"total": h.total, "overflow": h.overflow, "bounds": list(h.bounds), "bins": list(h.bins)}
        if args.out:
            c1, c2 = h.centers()
            rows = [[repr(float(c1[a])), repr(float(c2[b])), int(h.counts[a, b])]
                    for a in range(h.bins[0]) for b in range(h.bins[1])]
            files[args.out] = _csv_text(["xi1_center", "xi2_center", "count"], rows)
    if args.out:
        meta = dict(summary, group=args.group, n=args.n, alpha=alpha.to_json(), seed=args.seed,
                    samples=args.samples)
        files[args.out + ".json"] = json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n"
    return summary, files


def cmd_pdf_su(args, ctx):
    from .su_density import density_grid, j_evaluate, pdf_su

    if args.grid:
        if len(args.alpha) != 3:
            raise UsageError("--grid needs n = 3")
        g = density_grid(args.alpha, args.beta, args.grid, _threads(args))
        rows = [[repr(float(x)), repr(float(y)), repr(float(g.values[i, j]))]
                for i, x in enumerate(g.gamma1) for j, y in enumerate(g.gamma2)]
        text = _csv_text(["gamma1", "gamma2", "pdf"], rows)
        files = {}
        if args.out:
            files[args.out] = text
            meta = {"alpha": list(g.alpha), "beta": list(g.beta), "n": 3, "resolution": args.grid}
            files[args.out + ".json"] = json.dumps(meta, indent=2, sort_keys=True) + "\n"
            return {"rows": len(rows), "mass": g.total_mass()}, files
        return text, files
    if args.gamma is None:
        raise UsageError("give --gamma or --grid")
    value = pdf_su(args.alpha, args.beta, args.gamma)
    jr = j_evaluate(args.alpha, args.beta, args.gamma)
    return {"pdf": value, "J": jr.value, "on_wall": jr.on_wall}, {}


def cmd_pdf_so3(args, ctx):
    from .so_density import pdf_so3_evaluate, singular_curves, so3_grid

    files = {}
    if args.singular_curves:
        pts = singular_curves(args.resolution)
        text = _csv_text(["gamma1", "gamma2"], [[repr(float(a)), repr(float(b))] for a, b in pts])
        if args.out:
            files[args.out] = text
            return {"points": len(pts)}, files
        return text, files
    if args.grid:
        rows = so3_grid(args.grid, sub=args.sub)
        text = _csv_text(["gamma1", "gamma2", "pdf", "flag"],
                         [[repr(float(a)), repr(float(b)), repr(float(v)), int(f)] for a, b, v, f in rows])
        if args.out:
            files[args.out] = text
            return {"rows": len(rows), "flagged": sum(r[3] for r in rows)}, files
        return text, files
    if args.gamma is None:
        raise UsageError("give --gamma, --grid or --singular-curves")
    if len(args.gamma) not in (2, 3):
        raise UsageError("--gamma takes gamma1,gamma2")
    r = pdf_so3_evaluate(float(args.gamma[0]), float(args.gamma[1]))
    return {"pdf": r.value, "singular": r.singular, "levels": r.levels}, files


def cmd_pdf_so2(args, ctx):
    from .so_density import so2_horn_cdf, so2_horn_pdf, so2_schur_cdf, so2_schur_pdf

    if args.schur:
        if args.alpha1 is None or args.x is None:
            raise UsageError("--schur needs --alpha1 and --x")
        return {"pdf": so2_schur_pdf(args.alpha1, args.x), "cdf": so2_schur_cdf(args.alpha1, args.x)}, {}
    if None in (args.alpha12, args.beta12, args.gamma12):
        raise UsageError("give --alpha12, --beta12 and --gamma12 (or --schur)")
    return {"pdf": so2_horn_pdf(args.alpha12, args.beta12, args.gamma12),
            "cdf": so2_horn_cdf(args.alpha12, args.beta12, args.gamma12)}, {}


def cmd_hciz(args, ctx):
    from .orbital import hciz

    if len(args.alpha) != len(args.x):
        raise UsageError("--alpha and --x must have the same length")
    v = hciz(args.alpha, args.x, args.confluence_tol)
    return {"re": v.real, "im": v.imag}, {}


def _weights(args, names, n=None):
    from .spectra import DynkinWeight

    out = []
    for name in names:
        labels = getattr(args, name)
        if n is not None and len(labels) != n - 1:
            raise UsageError(f"--{name.rstrip('_')} needs n - 1 = {n - 1} labels")
        w = DynkinWeight(labels)
        if not w.dominant:
            raise UsageError(f"--{name.rstrip('_')} must have non-negative labels")
        out.append(w)
    if len({w.rank for w in out}) != 1:
        raise UsageError("weights of different rank")
    return out


def cmd_lr(args, ctx):
    from .lr.hive import lr_coefficient

    lam, mu, nu = _weights(args, ("lambda_", "mu", "nu"), args.n)
    return lr_coefficient(lam, mu, nu), {}


def cmd_decompose(args, ctx):
    from .lr.hive import tensor_decomposition

    lam, mu = _weights(args, ("lambda_", "mu"), args.n)
    dec = tensor_decomposition(lam, mu)
    summary = {"total": sum(dec.values()), "distinct": len(dec)}
    files = {}
    if args.out:
        payload = {",".join(map(str, k.labels if hasattr(k, "labels") else k)): v
                   for k, v in sorted(dec.items(), key=lambda kv: tuple(getattr(kv[0], "labels", kv[0])))}
        files[args.out] = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    return summary, files


def cmd_stretch(args, ctx):
    from .lr.ehrhart import polytope_dimension, stretch_quasipolynomial

    lam, mu, nu = _weights(args, ("lambda_", "mu", "nu"), args.n)
    qp = stretch_quasipolynomial(lam, mu, nu, args.s_max)
    out = {"dimension": polytope_dimension(lam, mu, nu), "degree": qp.degree, "period": qp.period,
           "honest_polynomial": qp.is_polynomial,
           "coefficients": [[str(c) for c in cs] for cs in qp.coefficients]}
    if qp.is_polynomial or len({c[qp.degree] for c in qp.coefficients}) == 1:
        out["volume"] = str(qp.coefficients[0][qp.degree])
    return out, {}


def cmd_pictograph(args, ctx):
    from .lr.pictograph import enumerate_pictographs, render_pictograph

    lam, mu, nu = _weights(args, ("lambda_", "mu", "nu"), args.n)
    pics = enumerate_pictographs(lam, mu, nu, args.kind)
    if args.limit is not None:
        pics = pics[: args.limit]
    text = "\n".join(render_pictograph(p) for p in pics)
    files = {}
    if args.out:
        files[args.out] = text
        return {"count": len(pics), "kind": args.kind}, files
    return text, files


def cmd_walls(args, ctx):
    from .spectra import singular_hyperplanes

    if len(args.alpha) != len(args.beta):
        raise UsageError("--alpha and --beta must have the same length")
    walls = singular_hyperplanes(args.alpha, args.beta, args.max_card)
    rows = [[" ".join(map(str, w.I)), " ".join(map(str, w.J)), " ".join(map(str, w.K)), _fmt(w.constant)]
            for w in walls]
    text = _csv_text(["I", "J", "K", "constant"], rows)
    files = {}
    if args.out:
        files[args.out] = text
        return {"walls": len(walls)}, files
    return text, files


def cmd_bridge(args, ctx):
    from .lr.bridge import verify_bridge

    lam, mu, nu = _weights(args, ("lambda_", "mu", "nu"), args.n)
    return verify_bridge(args.n, lam, mu, nu), {}


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    common.add_argument("--out", help="output file (a manifest is written next to it)")
    common.add_argument("--threads", type=int, help="worker cap (default: $HORN_THREADS or all cores)")

    p = argparse.ArgumentParser(prog="horn", description="Horn's problem: sampling, exact densities, LR counting.")
    p.add_argument("--version", action="version", version=f"horn {__version__}")
    sub = p.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True

    def add(name, func, helptext):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.set_defaults(func=func)
        return sp

    s = add("sample", cmd_sample, "Monte Carlo histogram of (gamma1, gamma2)")
    s.add_argument("--group", choices=["so", "su", "usp"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--alpha", type=parse_numbers, required=True)
    s.add_argument("--beta", type=parse_numbers, required=True)
    s.add_argument("--samples", type=int, default=100000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bins", type=int, default=100)
    s.add_argument("--t", type=float, default=1.0, help="C = t V diag(alpha) V^-1 + diag(beta)")
    s.add_argument("--bounds", type=parse_numbers, help="g1min,g1max,g2min,g2max")

    s = add("schur", cmd_schur, "Monte Carlo histogram of diagonal entries")
    s.add_argument("--group", choices=["so", "su", "usp"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--alpha", type=parse_numbers, required=True)
    s.add_argument("--samples", type=int, default=100000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bins", type=int, default=100)

    s = add("pdf-su", cmd_pdf_su, "exact SU(n) Horn density")
    s.add_argument("--alpha", type=parse_numbers, required=True)
    s.add_argument("--beta", type=parse_numbers, required=True)
    s.add_argument("--gamma", type=parse_numbers)
    s.add_argument("--grid", type=int, help="n = 3 only: CSV on an N x N grid")

    s = add("pdf-so3", cmd_pdf_so3, "exact SO(3) density at alpha = beta = (1,0,-1)")
    s.add_argument("--gamma", type=parse_numbers, help="gamma1,gamma2")
    s.add_argument("--grid", type=int, help="CSV gamma1,gamma2,pdf,flag on N x N cells of [0,2]x[-1,1]")
    s.add_argument("--sub", type=int, default=1, help="Gauss nodes per cell side for --grid")
    s.add_argument("--singular-curves", action="store_true", help="CSV point list of the singular curves")
    s.add_argument("--resolution", type=int, default=41)

    s = add("pdf-so2", cmd_pdf_so2, "SO(2) Horn and Schur closed forms")
    s.add_argument("--alpha12", type=float)
    s.add_argument("--beta12", type=float)
    s.add_argument("--gamma12", type=float)
    s.add_argument("--schur", action="store_true")
    s.add_argument("--alpha1", type=float)
    s.add_argument("--x", type=float)

    s = add("hciz", cmd_hciz, "unitary orbital integral H(alpha, i x)")
    s.add_argument("--alpha", type=parse_numbers, required=True)
    s.add_argument("--x", type=parse_numbers, required=True)
    s.add_argument("--confluence-tol", type=float, default=None)

    for name, func, helptext, has_nu in (("lr", cmd_lr, "LR coefficient by hive counting", True),
                                        ("decompose", cmd_decompose, "full tensor product decomposition", False),
                                        ("stretch", cmd_stretch, "stretching (quasi-)polynomial", True),
                                        ("pictograph", cmd_pictograph, "enumerate pictographs", True),
                                        ("bridge", cmd_bridge, "J versus LR identities (n = 3, 4)", True)):
        s = add(name, func, helptext)
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--lambda", dest="lambda_", type=parse_labels, required=True)
        s.add_argument("--mu", type=parse_labels, required=True)
        if has_nu:
            s.add_argument("--nu", type=parse_labels, required=True)
        if name == "stretch":
            s.add_argument("--s-max", type=int, default=None)
        if name == "pictograph":
            s.add_argument("--kind", choices=["BZ-triangle", "O-blade", "isometric-honeycomb"],
                           default="BZ-triangle")
            s.add_argument("--limit", type=int, default=None)

    s = add("walls", cmd_walls, "candidate singular hyperplanes")
    s.add_argument("--alpha", type=parse_numbers, required=True)
    s.add_argument("--beta", type=parse_numbers, required=True)
    s.add_argument("--max-card", type=int, default=1)
    return p


# -- driver ------------------------------------------------------------------------


def _versions() -> dict:
    import scipy

    return {"horn": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def _echo(args) -> dict:
    return {k: _jsonable(v) for k, v in vars(args).items() if k != "func"}


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        return _error("UsageError", "--threads must be at least 1", 2)
    ctx = {"seed": None}
    start = time.time()
    try:
        result, files = args.func(args, ctx)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        return _error("UsageError", str(e), 2)
    except (HornError, ValueError, ArithmeticError, RuntimeError) as e:
        return _error(type(e).__name__, str(e), 1)
    digests = {}
    for path, text in files.items():
        data = text.encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(data)
        digests[path] = hashlib.sha256(data).hexdigest()
    if args.json:
        sys.stdout.write(json.dumps(_jsonable(result), sort_keys=True) + "\n")
    elif isinstance(result, str):
        sys.stdout.write(result if result.endswith("\n") else result + "\n")
    elif isinstance(result, dict):
        for k, v in result.items():
            sys.stdout.write(f"{k}: {json.dumps(_jsonable(v))}\n")
    else:
        sys.stdout.write(f"{_jsonable(result)}\n")
    manifest = {"subcommand": args.command, "arguments": _echo(args), "seed": ctx["seed"],
                "versions": _versions(), "wall_clock": round(time.time() - start, 6),
                "outputs": digests}
    if args.out:
        with open(args.out + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stderr.write(json.dumps(manifest, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
