"""Command line front end.

    vdpkit build N
    vdpkit verify {family,forms,generation,homology,all} [options]
    vdpkit realize N FORM
    vdpkit flow N I J [--t T] [--steps S] [--seed K]

Exit codes: 0 pass, 1 certificate failure, 2 usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import itertools
import sys

from vdpkit import __version__
from vdpkit.report import BudgetExceeded, Certificate, Config, Report, load_report

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

DEFAULT_REPORT = "vdpkit-report.json"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# suites


def suite_family(cfg: Config, rep: Report, n_max: int | None = None):
    from vdpkit import family
    from vdpkit.poly import order_from_name

    order = order_from_name(cfg.order)
    top = n_max or cfg.n_max_family
    for n in range(3, max(cfg.n_max_recursion, top) + 1):
        rep.add(family.check_determinant(n))
        if n >= 5:
            rep.add(family.check_recursion(n))
    for n in range(3, top + 1):
        rep.add(family.check_fiber_equation(n))
        rep.add(family.modification_decomposition(n, order, cfg.budget)[1])
        rep.add(family.check_smooth(n, order, cfg.budget))
        if n >= 4:
            rep.add(family.check_center_iso(n, order, cfg.budget))
        if n >= 5:
            rep.add(family.check_divisor_complement(n, order, cfg.budget))


FLOW_PAIRS_N5 = ((1, 2), (3, 4), (4, 5))


def flow_certificate(cfg: Config, n: int, i: int, j: int, point) -> Certificate:
    from vdpkit.flow import convergence_order, endpoint_order, flow_rk4
    from vdpkit.forms import delta, level

    X = level(n)
    xi = delta(X, i, j)
    res = flow_rk4(X, xi, point, cfg.flow_t, cfg.flow_steps, tol_on=cfg.tol_on)
    payload = res.to_dict()
    ok = (not res.blew_up and res.drift < cfg.tol_drift
          and res.volume_distortion < cfg.tol_distortion)
    if cfg.flow_t > 0:
        order, errors = endpoint_order(X, xi, point, cfg.flow_t)
        dslope, drifts = convergence_order(X, xi, point, cfg.flow_t)
        payload.update({"endpoint_order": order, "endpoint_errors": errors,
                        "drift_slope": dslope, "drifts": drifts})
        ok = ok and 3.5 <= order <= 4.5
    return Certificate("forms", "flow_rk4",
                       {"n": n, "i": i, "j": j, "start": [str(c) for c in point],
                        "t": cfg.flow_t, "steps": cfg.flow_steps}, ok, payload)


def suite_forms(cfg: Config, rep: Report, n_max: int | None = None):
    from vdpkit.family import sample_points
    from vdpkit.forms import VolumeAtlas, delta, divergence_free, level

    top = n_max or cfg.n_max_forms
    for n in range(3, top + 1):
        X = level(n)
        atlas = VolumeAtlas.build(X)
        rep.add(Certificate("forms", "chart_compatibility", {"n": n}, atlas.consistent(),
                            atlas.to_dict()))
        for i, j in itertools.combinations(range(1, n + 1), 2):
            rep.add(Certificate("forms", "divergence_free", {"n": n, "i": i, "j": j},
                                divergence_free(X, delta(X, i, j))))
    if top < 5:
        X = level(5)
        for i, j in FLOW_PAIRS_N5:
            rep.add(Certificate("forms", "divergence_free", {"n": 5, "i": i, "j": j},
                                divergence_free(X, delta(X, i, j))))
    for pt in sample_points(3, cfg.flow_samples, cfg.seed):
        rep.add(flow_certificate(cfg, 3, 1, 2, pt))


def suite_generation(cfg: Config, rep: Report, n_max: int | None = None):
    from vdpkit.generation import HEADER_NOTES, generators, realize_exact
    from vdpkit.homology import closed_form

    top = min(n_max or 4, 5)
    for note in HEADER_NOTES:
        if note not in rep.notes:
            rep.notes.append(note)
    for n in range(3, top + 1):
        # coefficient degree drops by one per level above 3
        bound = max(cfg.degree_bound - (n - 3), 0)
        rep.add(Certificate("generation", "closed_equals_exact", {"n": n},
                            closed_form(n)[n - 2] == 0,
                            {"rank_H_n-2": closed_form(n)[n - 2]}))
        for alpha in generators(n, bound):
            rep.add(realize_exact(n, alpha, max(cfg.degree_bound, 1)).to_certificate())


def suite_homology(cfg: Config, rep: Report, n_max: int | None = None):
    from vdpkit import homology as hm

    top = n_max or cfg.n_max_homology
    rep.add(hm.check_base())
    rep.add(hm.cross_check(max(top, 6)))
    for n in range(3, max(top, 6) + 1):
        led = hm.euler(n)
        rep.add(Certificate("homology", "euler", {"n": n}, led.e == hm.euler_closed(n), led.to_dict()))
    for k, l in ((1, 1), (2, 1), (3, 2)):
        t = hm.xpq_table(k, l)
        rep.add(Certificate("homology", "xpq_table", {"k": k, "l": l},
                            t.euler == k + l and t.ranks == (1, 0, k + l - 1), t.to_dict()))


SUITES = {
    "family": suite_family,
    "forms": suite_forms,
    "generation": suite_generation,
    "homology": suite_homology,
}


def cmd_verify(suite: str, cfg: Config, n_max: int | None = None) -> Report:
    rep = Report(__version__, cfg, run={"suite": suite, "n_max": n_max})
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        SUITES[name](cfg, rep, n_max)
    return rep


# ---------------------------------------------------------------------------
# argument handling


def _config(args) -> Config:
    over = {}
    for attr, key in (("budget", "budget"), ("seed", "seed"), ("degree_bound", "degree_bound"),
                      ("tol_drift", "tol_drift"), ("tol_distortion", "tol_distortion"),
                      ("order", "order")):
        v = getattr(args, attr, None)
        if v is not None:
            over[key] = v
    if getattr(args, "t", None) is not None:
        over["flow_t"] = args.t
    if getattr(args, "steps", None) is not None:
        over["flow_steps"] = args.steps
    try:
        cfg = Config.from_env(**over)
    except ValueError as exc:
        raise UsageError(str(exc))
    return cfg


def _common(p: argparse.ArgumentParser):
    p.add_argument("--budget", type=int, help="Groebner step budget (env VDPKIT_BUDGET)")
    p.add_argument("--seed", type=int)
    p.add_argument("--order", choices=["degrevlex", "lex", "deglex"])
    p.add_argument("--tol-drift", type=float)
    p.add_argument("--tol-distortion", type=float)
    p.add_argument("--report", default=None, help=f"report path (default {DEFAULT_REPORT})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vdpkit", description="Certificates for the X_n family.")
    ap.add_argument("--version", action="version", version=f"vdpkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="print p_n, its modification data and M_n")
    b.add_argument("n", type=int)

    v = sub.add_parser("verify", help="run a certificate suite")
    v.add_argument("suite", choices=["family", "forms", "generation", "homology", "all"])
    v.add_argument("--n-max", type=int)
    v.add_argument("--degree-bound", type=int)
    v.add_argument("--tex", action="store_true", help="print homology tables as a tabular block")
    v.add_argument("--from-report", metavar="PATH",
                   help="rerun with the config and n limit embedded in an earlier report")
    _common(v)

    r = sub.add_parser("realize", help="find xi with Theta(xi) = d(alpha)")
    r.add_argument("n", type=int)
    r.add_argument("form")
    r.add_argument("--degree-bound", type=int)
    _common(r)

    f = sub.add_parser("flow", help="RK4 flow of delta_ij from a seeded point")
    f.add_argument("n", type=int)
    f.add_argument("i", type=int)
    f.add_argument("j", type=int)
    f.add_argument("--t", type=float)
    f.add_argument("--steps", type=int)
    _common(f)
    return ap


def _write(rep: Report, path: str | None, out):
    path = path or DEFAULT_REPORT
    with open(path, "w") as fh:
        fh.write(rep.to_json() + "\n")
    for line in rep.summary_lines():
        print(line, file=out)
    print(f"report written to {path}", file=out)


def run_build(args, out) -> int:
    from vdpkit import family

    n = args.n
    if n < 3:
        raise UsageError("build needs n >= 3")
    rec = family.decomposition(n)
    M = family.build_matrix(n)
    print(rec.p, file=out)
    y = f"z{rec.modification_var}"
    print(f"f = {rec.f}", file=out)
    print(f"g = {rec.g}", file=out)
    print(f"p_{n} = f*{y} - g", file=out)
    for i, j in itertools.product((1, 2), repeat=2):
        print(f"M_{n}[{i},{j}] = {M[i, j]}", file=out)
    return EXIT_PASS


def run_verify(args, out) -> int:
    from vdpkit import homology as hm

    cfg = _config(args)
    if args.from_report:
        try:
            doc = load_report(args.from_report)
            cfg = Config(**doc["config"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot reuse {args.from_report}: {exc}")
        args.n_max = doc.get("run", {}).get("n_max", args.n_max)
    if args.n_max is not None and args.n_max < 3:
        raise UsageError("--n-max must be >= 3")
    rep = cmd_verify(args.suite, cfg, args.n_max)
    _write(rep, args.report, out)
    if args.suite in ("homology", "all"):
        top = max(args.n_max or cfg.n_max_homology, 6)
        tabs = hm.base_tables() + [hm.table_recursive(n) for n in range(7, top + 1)]
        print(hm.to_tex(tabs) if args.tex else hm.format_tables(tabs), file=out)
    return EXIT_PASS if rep.verdict else EXIT_FAIL


def run_realize(args, out) -> int:
    from vdpkit.forms import parse_form
    from vdpkit.generation import RealizationError, realize_exact
    from vdpkit.poly import ParseError

    cfg = _config(args)
    n = args.n
    if n < 3:
        raise UsageError("realize needs n >= 3")
    try:
        alpha = parse_form(args.form, n)
    except ParseError as exc:
        raise UsageError(f"cannot parse form: {exc}")
    if alpha.is_zero():
        alpha = alpha.__class__(alpha.X, None, n - 3)
    if alpha.degree != n - 3:
        raise UsageError(f"expected a {n - 3}-form on X_{n}")
    try:
        cert = realize_exact(n, alpha, cfg.degree_bound)
    except RealizationError as exc:
        print(f"failure: {exc}", file=out)
        return EXIT_FAIL
    print(f"expression: {cert.expr}", file=out)
    print(f"residual: {cert.residual_text()}", file=out)
    for f in cert.failures:
        print(f"unrealised: {f}", file=out)
    if args.report:
        rep = Report(__version__, cfg)
        rep.add(cert.to_certificate())
        _write(rep, args.report, out)
    return EXIT_PASS if cert.valid else EXIT_FAIL


def run_flow(args, out) -> int:
    from vdpkit.family import sample_points

    cfg = _config(args)
    n, i, j = args.n, args.i, args.j
    if n < 3:
        raise UsageError("flow needs n >= 3")
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise UsageError("need distinct indices 1 <= i, j <= n")
    if cfg.flow_t < 0:
        raise UsageError("--t must be nonnegative")
    pt = sample_points(n, 1, cfg.seed)[0]
    cert = flow_certificate(cfg, n, i, j, pt)
    p = cert.payload
    print(f"start: ({', '.join(str(c) for c in pt)})", file=out)
    print(f"drift: {p['drift']:.3e}", file=out)
    print(f"volume distortion: {p['volume_distortion']:.3e}", file=out)
    if "endpoint_order" in p:
        print(f"observed order: {p['endpoint_order']:.3f}", file=out)
    if args.report:
        rep = Report(__version__, cfg)
        rep.add(cert)
        _write(rep, args.report, out)
    return EXIT_PASS if cert.verdict else EXIT_FAIL


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"build": run_build, "verify": run_verify, "realize": run_realize, "flow": run_flow}
    try:
        return handlers[args.command](args, out)
    except UsageError as exc:
        print(f"vdpkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"vdpkit: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
