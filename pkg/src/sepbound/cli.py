"""Command-line surface: bounds, table reproduction, two-point values,
Monte Carlo verification, sweeps, and dataset checking.

Exit codes: 0 success, 1 usage error, 2 theorem hypothesis violation,
3 verification/check failure, 4 compute-budget refusal.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import montecarlo as mc
from . import paper_tables as pt
from . import twopoint as tp
from .bounds import SeparabilityQuery, bound, perturbed_probability, theorem_ids
from .errors import BudgetExceeded, HypothesisViolation

DEFAULT_SEED = 20240117  # fixed documented default; --seed overrides

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3, 4

SWEEP_FIELDS = ("theorem", "n", "alpha", "delta", "log10_M", "M_display", "mode", "b_exponent", "notes")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _fmt_M(log10_m: float) -> str:
    """Paper-style display: decimals below 10, thousands below 1e7, scientific above."""
    if log10_m == -math.inf:
        return "0"
    if log10_m < 1.0:
        return f"{10.0**log10_m:.3g}"
    if log10_m < 7.0:
        return f"{10.0**log10_m:,.0f}"
    mant = 10.0 ** (log10_m - math.floor(log10_m))
    return f"{mant:.2f}e{int(math.floor(log10_m))}"


def _emit(rows: list[dict], fields: tuple, fmt: str, out: str | None) -> None:
    """Write rows as text/csv/json; machine formats carry 12 significant digits."""
    if fmt == "json":
        def conv(v):
            if isinstance(v, float):
                return float(f"{v:.12g}")
            return v
        text = json.dumps([{k: conv(r.get(k)) for k in fields} for r in rows], indent=2)
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in
                        ((k, r.get(k, "")) for k in fields)})
        text = buf.getvalue()
    else:
        widths = {k: max(len(str(k)), *(len(str(r.get(k, ""))) for r in rows)) for k in fields}
        lines = ["  ".join(str(k).ljust(widths[k]) for k in fields)]
        for r in rows:
            lines.append("  ".join(str(r.get(k, "")).ljust(widths[k]) for k in fields))
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _component_from_name(name: str, sigma0: float | None) -> tp.ComponentSpec:
    name = name.lower()
    if name in ("uniform01", "uniform"):
        return tp.Uniform01()
    if name in ("bernoulli", "symmetric_bernoulli"):
        return tp.SymmetricBernoulli()
    if name in ("three_point", "threepoint"):
        return tp.ThreePoint(sigma0 if sigma0 is not None else 0.5)
    if name == "normal":
        return tp.NormalComponent()
    if name == "laplace":
        return tp.Laplace(1.0 / math.sqrt(2.0))
    raise ValueError(f"unknown component {name!r}")


def _theorem_params(args) -> dict:
    params: dict = {}
    if args.r is not None:
        params["r"] = args.r
    if args.C is not None:
        params["C"] = args.C
    if args.gamma is not None:
        params["gamma"] = args.gamma
    if args.sigma0 is not None:
        params["sigma0"] = args.sigma0
    if args.epsilon is not None:
        params["epsilon"] = args.epsilon
    if args.R is not None:
        params["R"] = args.R
    if args.component is not None:
        params["component"] = _component_from_name(args.component, args.sigma0)
    if getattr(args, "center", None):
        params["center"] = args.center.replace("-", "_")
    if getattr(args, "slc_points", None):
        pts = []
        for chunk in args.slc_points.split(";"):
            g, mu, x0 = (chunk.split(":") + ["", ""])[:3]
            pts.append(tp.SlcParams(float(g), float(mu) if mu else None, float(x0) if x0 else 0.0))
        params["points"] = pts
    return params


_PARAM_KEYS = ("r", "C", "gamma", "sigma0", "epsilon", "R", "component", "center", "points")


def _bound_row(q: SeparabilityQuery, theorem: str, params: dict) -> tuple[dict, bool]:
    row = {"theorem": theorem, "n": q.n, "alpha": q.alpha, "delta": q.delta}
    try:
        res = bound(q, theorem, **{k: v for k, v in params.items()})
        row.update(
            log10_M=res.log10_M,
            M_display=_fmt_M(res.log10_M),
            mode=res.mode,
            b_exponent=res.b_exponent if res.b_exponent is not None else "",
            notes="; ".join(res.validity_notes),
        )
        return row, False
    except HypothesisViolation as e:
        row.update(log10_M="", M_display="", mode="", b_exponent="", notes=f"hypothesis violation: {e}")
        return row, True
    except (ValueError, TypeError) as e:
        row.update(log10_M="", M_display="", mode="", b_exponent="", notes=f"not applicable: {e}")
        return row, True


def cmd_bound(args) -> int:
    names = [t.strip() for t in args.theorem.split(",")] if args.theorem != "all" else list(theorem_ids())
    unknown = [t for t in names if t not in theorem_ids()]
    if unknown:
        print(f"error: unknown theorem id(s) {unknown}; valid: {', '.join(theorem_ids())}",
              file=sys.stderr)
        return EXIT_USAGE
    q = SeparabilityQuery(args.n, args.alpha, args.delta)
    params = _theorem_params(args)
    rows, violations = [], 0
    for name in names:
        row, violated = _bound_row(q, name, params)
        rows.append(row)
        violations += int(violated)
    _emit(rows, SWEEP_FIELDS, args.format, args.out)
    if len(names) == 1 and violations:
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_table(args) -> int:
    spec = pt.TABLES.get(args.table_id)
    if spec is None:
        print(f"error: unknown table id {args.table_id} (valid: 1..11)", file=sys.stderr)
        return EXIT_USAGE
    cells = pt.compute_table(args.table_id)
    fields = ("n",) + tuple(spec.col_labels)
    rows = []
    for r in spec.rows:
        row = {"n": r}
        for c in spec.col_labels:
            row[c] = cells[(r, c)].display()
        rows.append(row)
    print(f"Table {args.table_id}: {spec.caption}")
    _emit(rows, fields, args.format, args.out)
    if args.check:
        ok, worst, failures = pt.check_table(args.table_id)
        print(f"check: max deviation = {worst:.3f} of allowance "
              f"(rtol={spec.rtol:g} + printed ulp) -> {'PASS' if ok else 'FAIL'}")
        for (r, c, got, want, excess) in failures:
            print(f"  MISMATCH n={r} col={c}: computed {got} vs printed {want} (excess {excess:.2f})")
        if not ok:
            return EXIT_VERIFY
    return EXIT_OK


_TWO_POINT_FAMILIES = (
    "ball", "ball_upper", "ball_asymptotic", "normal", "normal_upper",
    "exponential", "exponential_asymptotic", "layer", "rot_general", "rot_simple",
    "slc", "slc_simple", "product_hoeffding", "product_bernstein", "dependent",
    "product_chernoff",
)


def _two_point(family: str, n: int, alpha: float, args) -> tuple[tp.TwoPointResult, str]:
    note = ""
    if family == "ball":
        r = tp.ball_exact(n, alpha)
    elif family == "ball_upper":
        r = tp.ball_upper(n, alpha)
    elif family == "ball_asymptotic":
        r = tp.ball_asymptotic(n, alpha)
    elif family == "normal":
        r = tp.normal_exact(n, alpha)
    elif family == "normal_upper":
        r = tp.normal_upper_iest2(n, alpha)
    elif family == "exponential":
        r = tp.exponential_exact(n, alpha)
    elif family == "exponential_asymptotic":
        r = tp.exponential_asymptotic(n, alpha)
    elif family == "layer":
        if args.R is None:
            raise ValueError("layer needs --R")
        r = tp.spherical_generic(n, alpha, tp.layer_radial_model(args.R),
                                 kinks_t=(args.R, 1.0, 1.0 / args.R))
    elif family == "rot_general":
        r = tp.rotgeneral_f(n, alpha)
    elif family == "rot_simple":
        r = tp.rotsimple_f(n, alpha)
    elif family in ("slc", "slc_simple"):
        if args.gamma is None:
            raise ValueError("slc needs --gamma")
        r = tp.slc_f(n, alpha, tp.SlcParams(args.gamma), improved=(family == "slc"))
    elif family == "product_hoeffding":
        if args.sigma0 is None:
            raise ValueError("product_hoeffding needs --sigma0")
        r = tp.product_hoeffding_f(n, alpha, args.sigma0,
                                   (args.center or "general").replace("-", "_"))
    elif family == "product_bernstein":
        if args.sigma0 is None:
            raise ValueError("product_bernstein needs --sigma0")
        r = tp.product_bernstein_f(n, alpha, args.sigma0)
    elif family == "dependent":
        if args.sigma0 is None:
            raise ValueError("dependent needs --sigma0")
        r = tp.dependent_f(n, alpha, args.sigma0)
    elif family == "product_chernoff":
        comp = _component_from_name(args.component or "uniform01", args.sigma0)
        g = tp.chernoff_gamma(comp, alpha)
        r = tp.TwoPointResult(tp.LogProb(-2.0 * g.gamma * n), "upper_bound")
        note = f"gamma={g.gamma:.8f} lambda*={g.lambda_star:.6g}"
    else:
        raise ValueError(f"unknown family {family!r}; choose from {_TWO_POINT_FAMILIES}")
    return r, note


def cmd_two_point(args) -> int:
    try:
        r, note = _two_point(args.family, args.n, args.alpha, args)
    except HypothesisViolation as e:
        print(f"hypothesis violation: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    log10_f = r.f.log_value / math.log(10.0)
    rows = [{
        "family": args.family, "n": args.n, "alpha": args.alpha,
        "f": r.f.linear, "log10_f": log10_f, "kind": r.kind,
        "numeric_error": r.numeric_error, "notes": note,
    }]
    _emit(rows, ("family", "n", "alpha", "f", "log10_f", "kind", "numeric_error", "notes"),
          args.format, args.out)
    return EXIT_OK


_VERIFY_FAMILIES = ("ball", "normal", "exponential", "layer", "slc", "cube",
                    "uniform01", "half_cube", "laplace")


def _verify_setup(args):
    """Returns (spec, center, f_theory log value or None, two_sided, note)."""
    fam = args.family
    n, alpha = args.n, args.alpha
    if fam == "ball":
        return mc.UniformBall(), None, tp.ball_exact(n, alpha).f.log_value, True, ""
    if fam == "normal":
        return mc.StandardNormal(), None, tp.normal_exact(n, alpha).f.log_value, True, ""
    if fam == "exponential":
        return mc.SphericalExponential(), None, tp.exponential_exact(n, alpha).f.log_value, True, ""
    if fam == "layer":
        if args.R is None:
            raise ValueError("layer needs --R")
        f = tp.spherical_generic(n, alpha, tp.layer_radial_model(args.R),
                                 kinks_t=(args.R, 1.0, 1.0 / args.R))
        return mc.SphericalLayer(args.R), None, f.f.log_value, True, ""
    if fam == "slc":
        if args.gamma is None:
            raise ValueError("slc needs --gamma")
        improved_ok = n > (1.0 + 2.0 * alpha**2) / (args.gamma * alpha**2)
        f = tp.slc_f(n, alpha, tp.SlcParams(args.gamma), improved=improved_ok)
        return mc.GaussianSLC(args.gamma), None, f.f.log_value, False, "one-sided upper bound"
    if fam in ("cube", "uniform01"):
        g = tp.chernoff_gamma(tp.Uniform01(), alpha)
        center = np.full(n, 0.5)
        return mc.UniformCube(), center, -2.0 * g.gamma * n, False, "one-sided Chernoff bound"
    if fam == "half_cube":
        center = np.full(n, 0.5)
        return mc.DependentHalfCube(), center, 0.0, True, "always inseparable (p = 1)"
    if fam == "laplace":
        return mc.LaplaceProduct(), None, None, False, "no theoretical reference (demonstration)"
    raise ValueError(f"unknown family {fam!r}; choose from {_VERIFY_FAMILIES}")


def cmd_verify(args) -> int:
    try:
        spec, center, log_f, two_sided, note = _verify_setup(args)
    except HypothesisViolation as e:
        print(f"hypothesis violation: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    trials = int(float(args.trials))
    theory = math.exp(log_f) if log_f is not None and log_f > -700 else (0.0 if log_f is not None else None)
    try:
        if args.mode == "two-point":
            est = mc.estimate_two_point(spec, args.n, args.alpha, center, trials, args.seed)
            got_lo, got_hi, got = est.ci_low, est.ci_high, est.p_hat
            target = theory
        else:
            if args.M is None:
                raise ValueError("--mode set needs --M")
            res = mc.estimate_set_separability(spec, args.n, args.M, args.alpha, center,
                                               trials, args.seed)
            est = res.p_separable
            got = res.mean_inseparable_pairs
            # Poisson-style 3-sigma band around the empirical mean pair count
            half = 3.0 * math.sqrt(max(res.total_pairs, 1)) / trials
            got_lo, got_hi = got - half, got + half
            target = None if theory is None else args.M * (args.M - 1) * theory
    except BudgetExceeded as e:
        print(f"budget refusal: {e}", file=sys.stderr)
        return EXIT_BUDGET

    if target is None:
        passed = True
    elif two_sided:
        passed = got_lo <= target <= got_hi
    else:
        passed = got_lo <= target  # estimate must not significantly exceed the bound

    label = "p(two-point)" if args.mode == "two-point" else "mean inseparable pairs"
    print(f"family={args.family} n={args.n} alpha={args.alpha} trials={trials} seed={args.seed}")
    if args.mode == "set":
        print(f"  separable fraction = {est.p_hat:.6g}  CI [{est.ci_low:.6g}, {est.ci_high:.6g}]")
    print(f"  estimate {label} = {got:.6g}  CI [{got_lo:.6g}, {got_hi:.6g}]")
    if target is not None:
        rel = "theoretical value" if two_sided else "theoretical upper bound"
        print(f"  {rel} = {target:.6g}  ({note})" if note else f"  {rel} = {target:.6g}")
    elif note:
        print(f"  {note}")
    print(f"  result: {'PASS' if passed else 'FAIL'} (3-sigma Wilson)")
    return EXIT_OK if passed else EXIT_VERIFY


def _sweep_delta_for_m(theorem: str, q: SeparabilityQuery, m: float, params: dict, f_log):
    if f_log is not None:
        return m * (m - 1.0) * math.exp(f_log) if f_log > -700 else m * (m - 1.0) * 0.0
    if theorem == "prototype":
        return m * params.get("C", 1.0) * (2.0 * params["r"] * q.alpha) ** (-q.n)
    if theorem == "prototype_set":
        return m * m * params.get("C", 1.0) * (2.0 * params["r"] * q.alpha) ** (-q.n)
    if theorem == "product_legacy":
        return 3.0 * (m + 1.0) ** 2 * math.exp(-0.5 * q.n * params["sigma0"] ** 4)
    if theorem == "perturbed":
        return perturbed_probability(q.n, m, params["epsilon"]).deficit
    raise ValueError(f"probability sweep unsupported for {theorem!r}")


def cmd_sweep(args) -> int:
    names = [t.strip() for t in args.theorems.split(",")]
    for name in names:
        if name not in theorem_ids():
            print(f"error: unknown theorem id {name!r}", file=sys.stderr)
            return EXIT_USAGE
    params = _theorem_params(args)
    ns = range(args.n_start, args.n_stop + 1, args.n_step)
    rows = []
    for name in names:
        for n in ns:
            q = SeparabilityQuery(n, args.alpha, args.delta)
            if args.mode == "M":
                row, _ = _bound_row(q, name, params)
                rows.append(row)
            else:
                row = {"theorem": name, "n": n, "alpha": args.alpha}
                try:
                    res = bound(q, name, **params)
                    delta_inv = _sweep_delta_for_m(name, q, float(args.M), params, res.f_log)
                    p_low = 1.0 - delta_inv
                    row.update(
                        delta=delta_inv,
                        log10_M=math.log10(args.M),
                        M_display=f"{args.M:,.0f}",
                        mode=res.mode,
                        b_exponent=res.b_exponent if res.b_exponent is not None else "",
                        notes=f"p_lower={'<0' if p_low < 0 else f'{p_low:.10g}'}",
                    )
                except HypothesisViolation as e:
                    row.update(delta="", log10_M="", M_display="", mode="", b_exponent="",
                               notes=f"hypothesis violation: {e}")
                except ValueError as e:
                    row.update(delta="", log10_M="", M_display="", mode="", b_exponent="",
                               notes=f"not applicable: {e}")
                rows.append(row)
    _emit(rows, SWEEP_FIELDS, args.format, args.out)
    return EXIT_OK


_ASSUME_FAMILIES = ("ball", "normal", "exponential")


def cmd_check_dataset(args) -> int:
    try:
        data = np.loadtxt(args.path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as e:
        print(f"error: cannot read numeric CSV {args.path!r}: {e}", file=sys.stderr)
        return EXIT_USAGE
    m, n = data.shape
    if m < 2:
        print("error: need at least two rows", file=sys.stderr)
        return EXIT_USAGE
    center_name = args.center or "origin"
    if center_name == "mean":
        c = data.mean(axis=0)
    elif center_name in ("cube-center", "cube_center"):
        c = np.full(n, 0.5)
    else:
        c = np.zeros(n)
    xc = data - c
    cov = (xc.T @ xc) / m
    frob = float(np.linalg.norm(cov - np.eye(n)))
    alpha = args.alpha
    count = mc.count_inseparable_pairs(data, alpha, c)

    # worst ordered pairs by (x-c, y-c) / (alpha (x-c, x-c))
    d = np.einsum("ij,ij->i", xc, xc)
    g = xc @ xc.T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = g / (alpha * d)[:, None]
    np.fill_diagonal(ratio, -np.inf)
    flat = np.argsort(ratio, axis=None)[::-1][:5]
    worst = [(int(i // m), int(i % m), float(ratio.flat[i])) for i in flat]

    print(f"dataset: {args.path}  M={m} points, n={n} dims, center={center_name}, alpha={alpha}")
    if frob > 0.5 * math.sqrt(n):
        print(f"  warning: empirical covariance is far from identity "
              f"(Frobenius distance {frob:.3g} > 0.5*sqrt(n) = {0.5 * math.sqrt(n):.3g}); "
              "bounds assume whitened data")
    print(f"  inseparable ordered pairs: {count}")
    print("  worst ordered pairs (x_idx, y_idx, (x,y)/(alpha(x,x))):")
    for i, j, r in worst:
        print(f"    ({i}, {j}): {r:.6g}")
    if args.assume:
        fam = args.assume
        if fam not in _ASSUME_FAMILIES:
            print(f"error: --assume supports {_ASSUME_FAMILIES}", file=sys.stderr)
            return EXIT_USAGE
        f_log = {
            "ball": lambda: tp.ball_exact(n, alpha),
            "normal": lambda: tp.normal_exact(n, alpha),
            "exponential": lambda: tp.exponential_exact(n, alpha),
        }[fam]().f.log_value
        expected = m * (m - 1) * math.exp(f_log)
        print(f"  expected pairs under {fam}: {expected:.6g} (observed {count})")
    return EXIT_OK


def build_parser() -> _Parser:
    p = _Parser(prog="sepbound", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_n=True):
        if with_n:
            sp.add_argument("--n", type=int, required=True, help="dimension")
        sp.add_argument("--alpha", type=float, default=1.0)
        sp.add_argument("--delta", type=float, default=0.01)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--sigma0", type=float)
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--R", type=float)
        sp.add_argument("--r", type=float)
        sp.add_argument("--C", type=float)
        sp.add_argument("--component", type=str)
        sp.add_argument("--center", type=str)
        sp.add_argument("--format", choices=("text", "csv", "json"), default="text")
        sp.add_argument("--out", type=str)

    sp = sub.add_parser("bound", help="compute theorem bounds for (n, alpha, delta)")
    sp.add_argument("--theorem", required=True,
                    help="comma-separated theorem ids, or 'all'")
    sp.add_argument("--slc-points", type=str,
                    help="gamma:mu:x0norm list separated by ';' for independent_slc/mixture_slc")
    common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("table", help="reproduce a reference table (1..11)")
    sp.add_argument("table_id", type=int)
    sp.add_argument("--check", action="store_true",
                    help="compare against the embedded printed values")
    sp.add_argument("--format", choices=("text", "csv", "json"), default="text")
    sp.add_argument("--out", type=str)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("two-point", help="two-point inseparability probability f(n, alpha)")
    sp.add_argument("--family", required=True, help=", ".join(_TWO_POINT_FAMILIES))
    common(sp)
    sp.set_defaults(func=cmd_two_point)

    sp = sub.add_parser("verify", help="Monte Carlo verification against theory")
    sp.add_argument("--family", required=True, help=", ".join(_VERIFY_FAMILIES))
    sp.add_argument("--mode", choices=("two-point", "set"), default="two-point")
    sp.add_argument("--trials", type=str, default="1e6", help="e.g. 1e7")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--M", type=int, help="set size for --mode set")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="CSV/JSON sweep over dimensions (figure curves)")
    sp.add_argument("--theorems", required=True)
    sp.add_argument("--n-start", type=int, required=True)
    sp.add_argument("--n-stop", type=int, required=True)
    sp.add_argument("--n-step", type=int, default=50)
    sp.add_argument("--mode", choices=("M", "probability"), default="M")
    sp.add_argument("--M", type=float, default=10000.0,
                    help="fixed set size for probability sweeps")
    sp.add_argument("--slc-points", type=str)
    common(sp, with_n=False)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("check-dataset", help="Fisher-separability report for a CSV of points")
    sp.add_argument("path")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--center", choices=("origin", "mean", "cube-center"), default="origin")
    sp.add_argument("--assume", type=str,
                    help="compare the pair count to a family's expectation: ball|normal|exponential")
    sp.set_defaults(func=cmd_check_dataset)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except BudgetExceeded as e:
        print(f"budget refusal: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except HypothesisViolation as e:
        print(f"hypothesis violation: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    return code


if __name__ == "__main__":
    sys.exit(main())
