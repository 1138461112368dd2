"""Command-line entry point: ``pbkg {verify,scan,smear,divergence,lattice}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import correlators, field, modespace, pseudoboson, testfn
from .bessel import bessel_k0, bessel_k1
from .config import RunConfig, parse_angle, parse_list
from .errors import ConfigError, DivergenceError, NonNormalizableVacuumError, PBKGError

SCAN_COLUMNS = ("theta", "x", "re", "im", "err", "status")


def fmt(v):
    """17 significant digits for floats; integers and strings unchanged."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


@dataclass
class Table:
    columns: tuple
    rows: list

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def to_json(self, command):
        """JSON with ``null`` in place of NaN (CSV writes ``nan``)."""
        def enc(v):
            if isinstance(v, (np.floating, float)):
                return None if math.isnan(v) else float(v)
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, np.bool_):
                return bool(v)
            return v

        payload = {"command": command, "columns": list(self.columns),
                   "rows": [[enc(v) for v in row] for row in self.rows]}
        return json.dumps(payload, indent=1) + "\n"

    def render(self, fmt_name, command):
        return self.to_csv() if fmt_name == "csv" else self.to_json(command)


# ---------------------------------------------------------------- verify


@dataclass
class Check:
    name: str
    category: str
    value: float
    threshold: float
    passed: bool
    informational: bool = False

    @property
    def status(self):
        if self.informational:
            return "INFO"
        return "PASS" if self.passed else "FAIL"


def _le(name, category, value, threshold):
    value = float(value)
    return Check(name, category, value, threshold, bool(value <= threshold))


def _max_abs(a):
    return float(np.max(np.abs(a)))


def _algebra_checks():
    out = []
    thetas = (0.1, 0.3, math.pi / 4, 0.7)
    dims = (2, 8, 32)
    ab = bb = adj = 0.0
    for th in thetas:
        for d in dims:
            p, q = pseudoboson.pb_transform(th, d), pseudoboson.pb_transform(-th, d)
            c = modespace.annihilator(d)
            cd = c.conj().T
            ab = max(ab, _max_abs(p.A @ p.B - p.B @ p.A - (c @ cd - cd @ c)))
            bb = max(bb, _max_abs(p.B.conj().T @ p.B + p.A.conj().T @ p.A - (c @ cd + cd @ c)))
            adj = max(adj, _max_abs(p.B.conj().T - q.A))
    out.append(_le("pb.AB_commutator_equals_CCdag", "pseudoboson", ab, 1e-13))
    out.append(_le("pb.number_sum_identity", "pseudoboson", bb, 1e-13))
    out.append(_le("pb.Bdag_equals_A_minus_theta", "pseudoboson", adj, 1e-13))
    h, hm = pseudoboson.swanson_hamiltonian(0.3, 16), pseudoboson.swanson_hamiltonian(-0.3, 16)
    out.append(_le("pb.H_adjoint_is_H_minus_theta", "pseudoboson", _max_abs(h.conj().T - hm), 1e-13))
    chk = pseudoboson.pb_commutator_check(math.pi / 6, 8)
    out.append(_le("pb.A_Aneg_coefficient", "pseudoboson", abs(chk.AAneg_coeff + 1j * math.sin(math.pi / 3)), 1e-14))
    out.append(_le("modespace.single_mode_commutator", "modespace",
                   _max_abs(modespace.single_mode_commutator(4) - np.diag([1, 1, 1, -3])), 1e-14))
    fam = pseudoboson.pb_family(0.2, 64, 5)
    out.append(_le("pb.gram_defect", "pseudoboson", fam.gram_defect(), 1e-8))
    out.append(_le("pb.ladder_residuals", "pseudoboson", fam.ladder_residuals(), 1e-8))
    out.append(_le("pb.swanson_eigen_residuals", "pseudoboson", float(np.max(pseudoboson.eigen_residuals(
        pseudoboson.pb_family(0.2, 64, 3)))), 1e-6))
    out.append(_le("pb.intertwining_residual", "pseudoboson", pseudoboson.intertwining_residual(0.2, 64, 4), 1e-6))
    try:
        pseudoboson.pb_vacua(math.pi / 4, 16)
        raised = False
    except NonNormalizableVacuumError:
        raised = True
    out.append(Check("pb.boundary_vacuum_rejected", "pseudoboson", float(raised), 1.0, raised))
    return out


def _lattice_checks(cfg, rng):
    out = []
    lat = cfg.lattice()
    small = modespace.ModeLattice(M=3, dk=lat.dk, m=lat.m, d=4)
    u = modespace.random_state(small, rng)
    v = modespace.random_state(small, rng)
    adj = 0.0
    for j in range(small.M):
        adj = max(adj, abs(modespace.inner(u, modespace.apply_create(v, j))
                           - modespace.inner(modespace.apply_annihilate(u, j), v)))
    out.append(_le("modespace.ladder_adjointness", "modespace", adj, 1e-14))
    w = modespace.random_state(small, rng, max_level=small.d - 2)
    ccr = 0.0
    for j in range(small.M):
        for l in range(small.M):
            lhs = modespace.apply_annihilate(modespace.apply_create(w, l), j) \
                - modespace.apply_create(modespace.apply_annihilate(w, j), l)
            target = w if j == l else 0 * w
            ccr = max(ccr, (lhs - target).norm())
    out.append(_le("modespace.ccr_below_edge", "modespace", ccr, 1e-14))

    one = route = adjf = 0.0
    for _ in range(10):
        th, x, t, y, s = rng.uniform(-0.8, 0.8), *rng.uniform(-2, 2, size=4)
        one = max(one, abs(field.vacuum_expectation(field.phi(lat, th, x, t))),
                  abs(field.vacuum_expectation(field.pi(lat, th, x, t))))
        route = max(route, field.two_point_routes(th, x, t, y, s, lat).discrepancy)
    blk = lat.block(0, min(lat.M, 8))
    for _ in range(3):
        th, x, t = rng.uniform(-0.8, 0.8), *rng.uniform(-2, 2, size=2)
        a, b = modespace.random_state(blk, rng), modespace.random_state(blk, rng)
        lhs = modespace.inner(a, field.apply_field(field.phi(lat, th, x, t), b))
        rhs = modespace.inner(field.apply_field(field.phi(lat, -th, x, t), a), b)
        adjf = max(adjf, abs(lhs - rhs))
    out.append(_le("field.one_point_vanishes", "field", one, 1e-14))
    out.append(_le("field.two_point_routes_agree", "field", route, 1e-12))
    out.append(_le("field.adjoint_is_minus_theta", "field", adjf, 1e-14))

    rep0 = field.equal_time_commutator_check(cfg.theta_value, 0.3, -0.4, 0.0, lat)
    rep1 = field.equal_time_commutator_check(cfg.theta_value, 0.3, -0.4, 0.5, lat)
    out.append(_le("field.phi_phi_commutes", "field", max(abs(rep0.phi_phi), abs(rep1.phi_phi)), 1e-12))
    out.append(_le("field.phi_phidag_zero_at_t0", "field", abs(rep0.phi_phidag), 1e-12))
    out.append(_le("field.phi_pi_is_lattice_delta", "field", max(rep0.phi_pi_defect, rep1.phi_pi_defect), 1e-10))
    out.append(_le("field.phi_phidag_matches_kernel", "field", abs(rep1.phi_phidag - rep1.phi_phidag_kernel), 1e-12))

    ham = [field.hamiltonian_expectation(th, lat, modespace.vacuum(lat.block(0, min(lat.M, 8))))
           for th in (0.0, 0.3, math.pi / 4, 0.7)]
    spread = max(abs(h.pseudo - ham[0].pseudo) for h in ham)
    zp = abs(ham[0].pseudo - field.zero_point_sum(lat))
    out.append(_le("field.hamiltonian_theta_independent", "field", max(spread, zp), 1e-12))
    ext = field.extract_mode(0.3, lat.M // 2 + 1, 0.7, lat)
    out.append(_le("field.mode_extraction_round_trip", "field", max(ext.A_defect, ext.B_defect), 1e-8))
    out.append(Check("field.prefactor_4pi_audit", "field", ext.prefactor_4pi_defect, float("nan"),
                     True, informational=True))
    return out


def _continuum_checks(cfg):
    out = []
    quad = cfg.quad_spec()
    worst = agree = 0.0
    reg = quad.replace(tail_method="exp_regulator_extrapolation")
    for m in (0.5, 1.0, 2.0):
        for b in (0.2, 1.0, 5.0):
            ref = bessel_k0(m * b)
            q1 = correlators.bessel_integral(b, m, quad).value
            q2 = correlators.bessel_integral(b, m, reg).value
            worst = max(worst, abs(q1 - ref) / ref)
            agree = max(agree, abs(q1 - q2))
    out.append(_le("quadrature.bessel_identity_corpus", "correlators", worst, 1e-8))
    out.append(_le("quadrature.tail_methods_agree", "quadrature", agree, 1e-7))
    out.append(_le("bessel.k0_small_argument", "correlators",
                   abs(bessel_k0(1e-4) + math.log(0.5e-4) + 0.5772156649015329), 1e-7))
    out.append(_le("bessel.k1_small_argument", "correlators", abs(1e-5 * bessel_k1(1e-5) - 1.0), 1e-8))
    f2 = max(correlators.f2_pi4(x, cfg.m, quad).rel_diff for x in (0.1, 0.5, 2.0))
    out.append(_le("correlators.f2_pi4_matches_K0", "correlators", f2, 1e-8))
    slopes = 0.0
    for th in (0.0, math.pi / 8, math.pi / 6, 0.2):
        scan = correlators.divergence_scan(th, 0.5, cfg.m)
        expected = math.cos(2 * th) / (2 * math.pi)
        slopes = max(slopes, abs(scan.slope - expected) / expected)
    out.append(_le("correlators.divergence_slope", "correlators", slopes, 1e-2))
    red = 0.0
    for x, y in ((0.3, -0.2), (1.0, 2.5)):
        a = correlators.f2_equal_time(0.0, x, y, cfg.m, quad).value
        b = correlators.delta_plus(x, y, 0.0, 0.0, cfg.m, quad).value
        red = max(red, abs(a - b))
    out.append(_le("correlators.theta0_reduces_to_delta_plus", "correlators", red, 1e-10))
    g = correlators.g2_pi4_regularized(0.5, cfg.m)
    out.append(_le("correlators.g2_regularized_vs_oracle", "correlators", g.rel_diff, 1e-2))
    f = testfn.TestFunction.bump(0.2, 0.3)
    a = testfn.smear_g2(f, 1.0, cfg.m, quad)
    b = testfn.smear_g2_position(f, 1.0, cfg.m)
    out.append(_le("testfn.fourier_position_equivalence", "testfn", abs(a - b) / abs(a), 1e-6))
    member = testfn.delta_member(testfn.DeltaSequence(testfn.standard_mother(), 16))
    v = testfn.smear_g2(member, 1.0, cfg.m, quad)
    o = correlators.g2_oracle(1.0, cfg.m)
    out.append(_le("testfn.delta_sequence_smearing", "testfn", abs(v - o) / abs(o), 1e-2))
    return out


def run_checks(cfg):
    rng = np.random.default_rng(cfg.seed)
    return _algebra_checks() + _lattice_checks(cfg, rng) + _continuum_checks(cfg)


def cmd_verify(cfg):
    checks = run_checks(cfg)
    table = Table(("check", "category", "status", "value", "threshold"),
                  [(c.name, c.category, c.status, c.value, c.threshold) for c in checks])
    ok = all(c.passed for c in checks if not c.informational)
    return table, 0 if ok else 1


# ---------------------------------------------------------------- scans


def x_grid(start, stop, step):
    if not step > 0 or stop < start:
        raise ConfigError("empty x range")
    n = int(round((stop - start) / step))
    return [round(start + i * step, 12) for i in range(n + 1)]


def cmd_scan(cfg, thetas=None, xs=None):
    thetas = parse_list(cfg.scan_thetas, parse_angle) if thetas is None else thetas
    xs = x_grid(cfg.x_start, cfg.x_stop, cfg.x_step) if xs is None else xs
    if not thetas or not xs:
        raise ConfigError("scan needs at least one theta and one x")
    quad = cfg.quad_spec()
    rows = []
    for th in thetas:
        for x in xs:
            try:
                r = correlators.f2_equal_time(th, x, x, cfg.m, quad)
                rows.append((th, x, r.value.real, r.value.imag, r.abs_error_estimate,
                             "OK" if r.converged else "NOCONV"))
            except DivergenceError as exc:
                scan = exc.scan()
                rows.append((th, x, scan.slope, 0.0, scan.fit_residual, "DIV"))
    return Table(SCAN_COLUMNS, rows), 0


def cmd_smear(cfg, ns=None, ys=None):
    ns = parse_list(cfg.smear_n, int) if ns is None else ns
    ys = parse_list(cfg.smear_y) if ys is None else ys
    if not ns or not ys:
        raise ConfigError("smear needs n and y values")
    quad = cfg.quad_spec()
    mother = testfn.standard_mother()
    rows = []
    for y in ys:
        oracle = correlators.g2_oracle(y, cfg.m)
        prev = None
        for n in ns:
            v = testfn.smear_g2(testfn.delta_member(testfn.DeltaSequence(mother, n)), y, cfg.m, quad)
            inc = float("nan") if prev is None else abs(v - prev)
            rows.append((n, y, v.real, v.imag, oracle.imag, abs(v - oracle) / abs(oracle), inc))
            prev = v
    return Table(("n", "y", "re", "im", "oracle_im", "rel_error", "increment"), rows), 0


def cmd_divergence(cfg, thetas=None, x=0.5):
    thetas = parse_list(cfg.divergence_thetas, parse_angle) if thetas is None else thetas
    if not thetas:
        raise ConfigError("divergence needs at least one theta")
    rows = []
    for th in thetas:
        s = correlators.divergence_scan(th, x, cfg.m)
        rows.append((th, s.slope, pseudoboson.ThetaParam(th).cos2 / (2 * math.pi), s.intercept, s.fit_residual))
    return Table(("theta", "slope", "expected", "intercept", "fit_residual"), rows), 0


def observed_orders(values):
    """``log2`` of successive difference ratios for a halving sequence."""
    orders = [float("nan")] * len(values)
    for i in range(2, len(values)):
        a, b = abs(values[i - 2] - values[i - 1]), abs(values[i - 1] - values[i])
        orders[i] = math.log2(a / b) if a > 0 and b > 0 else float("inf")
    return orders


def cmd_lattice(cfg, dks=None):
    dks = parse_list(cfg.refinements) if dks is None else dks
    if not dks:
        raise ConfigError("lattice needs refinement values")
    th, x = cfg.theta_value, cfg.lattice_x
    oracle = correlators.f2_equal_time(th, x, x, cfg.m, cfg.quad_spec()).value
    values, gaps, sizes = [], [], []
    for dk in dks:
        lat = modespace.ModeLattice.from_window(cfg.k_max, dk, cfg.m, d=cfg.d, rule=cfg.rule)
        routes = field.two_point_routes(th, x, 0.0, x, 0.0, lat)
        values.append(routes.state_vector)
        gaps.append(routes.discrepancy)
        sizes.append(lat.M)
    orders = observed_orders(values)
    rows = [(dk, M, v.real, v.imag, oracle.real, oracle.imag, abs(v - oracle) / abs(oracle), o, g)
            for dk, M, v, o, g in zip(dks, sizes, values, orders, gaps)]
    cols = ("dk", "M", "re", "im", "oracle_re", "oracle_im", "rel_error", "order", "route_gap")
    return Table(cols, rows), 0


# ---------------------------------------------------------------- argparse


def build_parser():
    p = argparse.ArgumentParser(prog="pbkg", description="Pseudo-bosonic Klein-Gordon numerical laboratory")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key=value config file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    s = sub.add_parser("scan", parents=[common], help="equal-point F2 over theta and x")
    s.add_argument("--thetas", help="comma list of angles, e.g. '0,0.25pi'")
    s.add_argument("--x", nargs=3, type=float, metavar=("START", "STOP", "STEP"))
    s = sub.add_parser("smear", parents=[common], help="delta-sequence smearing of G2")
    s.add_argument("--n", help="comma list of sequence indices")
    s.add_argument("--y", help="comma list of positions")
    s = sub.add_parser("divergence", parents=[common], help="log-divergence slopes")
    s.add_argument("--thetas")
    s = sub.add_parser("lattice", parents=[common], help="lattice refinement study")
    s.add_argument("--dk", help="comma list of lattice spacings")
    return p


def load_config(args):
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    changes = {}
    if args.format:
        changes["format"] = args.format
    if args.out:
        changes["out"] = args.out
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.tol is not None:
        changes["abs_tol"] = args.tol
    return cfg.replace(**changes).validate()


def dispatch(args, cfg):
    c = args.command
    if c == "verify":
        return cmd_verify(cfg)
    if c == "scan":
        thetas = parse_list(args.thetas, parse_angle) if args.thetas else None
        xs = x_grid(*args.x) if args.x else None
        return cmd_scan(cfg, thetas, xs)
    if c == "smear":
        return cmd_smear(cfg, parse_list(args.n, int) if args.n else None, parse_list(args.y) if args.y else None)
    if c == "divergence":
        return cmd_divergence(cfg, parse_list(args.thetas, parse_angle) if args.thetas else None)
    return cmd_lattice(cfg, parse_list(args.dk) if args.dk else None)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        table, code = dispatch(args, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except PBKGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = table.render(cfg.format, args.command)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
