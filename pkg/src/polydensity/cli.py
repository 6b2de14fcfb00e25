"""Command-line entry point.

Every command writes a JSON report (config snapshot, input digests, result)
and, where there is a sequence, a CSV file.  Without ``--out`` the JSON
report goes to standard output.  Exit codes: 0 success, 1 a checked
invariant failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import acceptance, bernstein, classes, density, divisor, entire, extremal, weights
from .errors import InputError, InvariantViolation, NonConvergence, ParseError, ValidationError
from .measure import DiscreteMeasure, load_measure, measure_to_json

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2


@dataclass
class RunConfig:
    irls_tol: float = 1e-12
    stall_tol: float = 0.01
    tail_floor: float = 1e-6
    trunc: Optional[int] = None
    max_degree: int = 40
    p: str = "2"
    seed: int = 42
    out: Optional[str] = None
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    delta_alpha: float = 1.0
    delta_beta: float = 1.0
    C: float = 1.0
    theta_C: float = 1.0
    radius: float = 2.0

    def validate(self):
        for name in ("irls_tol", "stall_tol", "tail_floor", "alpha", "beta", "gamma", "delta_alpha",
                     "delta_beta", "C", "theta_C", "radius"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"config {name} must be positive, got {v!r}")
        if self.trunc is not None and self.trunc < 0:
            raise ValidationError("trunc must be nonnegative")
        if self.max_degree < 0:
            raise ValidationError("max-degree must be nonnegative")
        return self


def _coerce(name: str, text: str):
    f = {x.name: x for x in dataclasses.fields(RunConfig)}[name]
    kind = f.type
    if text.strip().lower() in ("none", ""):
        return None
    if kind in ("float",):
        return float(text)
    if kind in ("int", "Optional[int]"):
        return int(text)
    return text.strip()


def load_config(path: Optional[str]) -> dict:
    """``key = value`` lines (an optional ``[run]`` header is accepted)."""
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text if text.lstrip().startswith("[") else "[run]\n" + text, source=path)
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from exc
    known = {x.name for x in dataclasses.fields(RunConfig)}
    out = {}
    for section in cp.sections():
        for key, val in cp.items(section):
            k = key.replace("-", "_")
            if k not in known:
                raise ParseError(f"{path}: unknown config key {key!r}")
            try:
                out[k] = _coerce(k, val)
            except ValueError as exc:
                raise ParseError(f"{path}: {key}: {exc}") from exc
    return out


def build_config(args) -> RunConfig:
    cfg = RunConfig(**load_config(getattr(args, "config", None)))
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, v)
    return cfg.validate()


# ---------------------------------------------------------------------------
# serialization


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [_plain(obj.real), _plain(obj.imag)]
    if dataclasses.is_dataclass(obj):
        return _plain({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj) if not f.name.startswith("_")})
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return "" if v is None else str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class Emitter:
    def __init__(self, args, cfg: RunConfig, name: str):
        self.cfg = cfg
        self.name = name
        self.inputs = {}
        self.command = [args.command] + ([args.action] if getattr(args, "action", None) else [])

    def input(self, path: str) -> str:
        self.inputs[os.path.basename(path)] = "sha256:" + digest(path)
        return path

    def emit(self, result, csvs=None, text=None) -> None:
        # the output location is not part of the computation
        snapshot = {k: v for k, v in dataclasses.asdict(self.cfg).items() if k != "out"}
        report = {"command": " ".join(self.command), "config": snapshot,
                  "inputs": self.inputs, "result": result}
        payload = dumps(report)
        if self.cfg.out is None:
            sys.stdout.write(payload)
            if text:
                sys.stderr.write(text)
            return
        os.makedirs(self.cfg.out, exist_ok=True)
        with open(os.path.join(self.cfg.out, f"{self.name}.json"), "w", encoding="utf-8") as fh:
            fh.write(payload)
        for fname, (header, rows) in (csvs or {}).items():
            with open(os.path.join(self.cfg.out, fname), "w", encoding="utf-8") as fh:
                fh.write(csv_text(header, rows))
        if text:
            sys.stdout.write(text)


def _z(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ValidationError(f"cannot parse {text!r} as a complex number") from exc


def _zs(args, default):
    return [_z(t) for t in args.z] if args.z else default


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise ValidationError(f"--{name.replace('_', '-')} is required for this command")
    return v


def _load_json_file(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_density(args, cfg: RunConfig) -> int:
    em = Emitter(args, cfg, f"density_{args.action}")
    mu = load_measure(em.input(_need(args, "measure")))
    if args.action == "hamburger":
        norm = extremal.NormParam.parse(cfg.p)
        rep = density.hamburger_verdict(mu, norm, cfg.max_degree, cfg.stall_tol)
    else:
        rep = density.riesz_p2(mu, cfg.max_degree, cfg.stall_tol)
    rows = [(n, a, b) for n, (a, b) in enumerate(zip(rep.rho_alpha_seq, rep.rho_alpha2_seq))]
    em.emit({"verdict": rep.verdict, "rho_alpha": rep.rho_alpha_seq, "rho_alpha2": rep.rho_alpha2_seq,
             "diagnostics": rep.diagnostics},
            {f"density_{args.action}.csv": (["n", "rho_alpha", "rho_alpha2"], rows)},
            f"verdict: {rep.verdict}\n")
    return EXIT_OK


def cmd_extremal(args, cfg: RunConfig) -> int:
    em = Emitter(args, cfg, "extremal")
    mu = load_measure(em.input(_need(args, "measure")))
    norm = extremal.NormParam.parse(cfg.p)
    out, csvs = [], {}
    for z in _zs(args, [0j]):
        zz = z.real if z.imag == 0 else z
        seq = extremal.rho_sequence(mu, norm, zz, cfg.max_degree)
        Ms = [extremal.M_n(mu, norm, zz, n) for n in range(len(seq))]
        out.append({"z": z, "rho": seq, "M": [m.value for m in Ms],
                    "sandwich_holds": [extremal.sandwich_holds(m) for m in Ms]})
        csvs[f"extremal_{len(out)}.csv"] = (["n", "rho", "M"], [(n, r, m.value) for n, (r, m) in enumerate(zip(seq, Ms))])
    em.emit({"norm": norm.label(), "points": out}, csvs)
    return EXIT_OK


def _entire_meta(f) -> dict:
    zs = f.zeros
    t = zs.tail
    return {"stored_zeros": zs.count, "coverage_radius": zs.radius, "complete": zs.complete,
            "tail": None if t is None else {"exponent": t.exponent, "coeff": t.coeff, "symmetric": t.symmetric},
            "genus": f.genus}


def cmd_entire(args, cfg: RunConfig) -> int:
    em = Emitter(args, cfg, f"entire_{args.action}")
    f = entire.load_entire(em.input(_need(args, "zeros")))
    meta = _entire_meta(f)
    meta["trunc"] = cfg.trunc
    if args.action == "eval":
        R = f.radius_for_count(cfg.trunc)
        rows = []
        for z in _zs(args, [0.5 + 0j]):
            b = f.eval(z, R) if R is None or abs(z) < R / 2 else entire._eval_any(f, z, R)
            rows.append({"z": z, "value": complex(b.value), "bound": b.bound})
        em.emit({"meta": meta, "points": rows})
        return EXIT_OK
    if args.action == "delta":
        p = int(args.order)
        rows = []
        for z in _zs(args, [0.3 + 0j]):
            d = entire.delta_fp(f, p, z, cfg.trunc)
            rows.append({"z": z, "delta": complex(d.value), "bound": d.bound, "trend": d.notes.get("series_trend"),
                         "tolerance": max(cfg.tail_floor, d.bound)})
        em.emit({"meta": meta, "p": p, "points": rows},
                {"entire_delta.csv": (["z_re", "z_im", "delta_re", "delta_im", "bound"],
                                      [(r["z"].real, r["z"].imag, r["delta"].real, r["delta"].imag, r["bound"])
                                       for r in rows])})
        return EXIT_OK
    if args.action == "identity":
        rep = entire.check_hamburger_identity(f, _zs(args, [1.0 + 0j]), cfg.trunc)
        em.emit({"meta": meta, **rep})
        return EXIT_OK
    # classes
    d, per_q = entire.estimate_df(f)
    krein, kd = entire.class_predicate_krein(f)
    ham, hd = entire.class_predicate_hamburger(f)
    typ = entire.exp_type_estimate(f)
    em.emit({"meta": meta, "d_f": d, "d_f_trends": {q: t.trend for q, t in per_q.items()},
             "krein": krein, "krein_detail": kd, "hamburger": ham, "hamburger_detail": hd,
             "exp_type": typ})
    return EXIT_OK


def cmd_divisor(args, cfg: RunConfig) -> int:
    em = Emitter(args, cfg, f"divisor_{args.action}")
    f = entire.load_entire(em.input(_need(args, "zeros")))
    if args.action == "build":
        Ns = [float(n) for n in (args.N or [5, 10, 20])]
        rows, csv_rows = [], []
        for N in Ns:
            d = divisor.build_balanced_divisor(f, N)
            rep = divisor.verify_divisor(d, f)
            rows.append({**d.to_dict(), "verification": rep})
        conv = divisor.divisor_convergence(f, Ns, radius=cfg.radius)
        for r, e in zip(rows, conv["max_error"]):
            csv_rows.append((r["N"], r["p_N"], r["q_N"], r["S_value"], e))
        em.emit({"meta": _entire_meta(f), "divisors": rows, "convergence": conv},
                {"divisor.csv": (["N", "p_N", "q_N", "S", "max_error"], csv_rows)})
        return EXIT_OK
    plan = divisor.perturbation_plan(f)
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(int(args.trials)):
        b = plan.zeros + plan.delta * rng.uniform(-1, 1, size=plan.zeros.size)
        worst = max(worst, divisor.perturb_and_compare(f, plan, b)["max_ratio"])
    em.emit({"meta": _entire_meta(f), "plan": plan.to_dict(), "trials": int(args.trials), "max_ratio": worst})
    return EXIT_OK


def _load_family(path):
    data = _load_json_file(path)
    if not isinstance(data, list) or not data:
        raise ParseError(f"{path}: expected a nonempty JSON array of zero lists")
    fam = []
    for i, zs in enumerate(data):
        if not isinstance(zs, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in zs):
            raise ParseError(f"{path}: entry {i}: expected an array of numbers")
        try:
            fam.append(classes.StarPoly(zs))
        except InputError as exc:
            raise type(exc)(f"{path}: entry {i}: {exc}") from exc
    return fam


def cmd_classes(args, cfg: RunConfig) -> int:
    em = Emitter(args, cfg, "classes")
    fam = _load_family(em.input(_need(args, "family")))
    mu = weights.load_weight(em.input(args.weight)) if args.weight else None
    members = []
    for P in fam:
        l1, l2 = classes.lambda_functionals(P)
        row = {"zeros": P.zeros, "l1": l1, "l2": l2,
               "lemma32": classes.member_lemma32(P, cfg.alpha, cfg.beta, cfg.gamma, cfg.delta_alpha, cfg.delta_beta)}
        if mu is not None:
            row["thm33"] = classes.member_thm33(P, mu, cfg.alpha, cfg.gamma, cfg.delta_alpha)
            if cfg.beta > cfg.gamma:
                row["eq3410_sum"] = classes.eq3410_sum(P, mu, cfg.beta, cfg.gamma)
                row["eq3410"] = row["eq3410_sum"] <= cfg.C
        members.append(row)
    diag = classes.family_diagnostic(fam, cfg.radius)
    result = {"members": members, "family": diag}
    if mu is not None:
        result["weight_covers"] = [float(mu.xs[0]), float(mu.xs[-1])]
    em.emit(result, {"classes.csv": (["index", "degree", "l1", "l2", "lemma32"],
                                     [(i, P.degree, m["l1"], m["l2"], m["lemma32"]) for i, (P, m) in
                                      enumerate(zip(fam, members))])})
    return EXIT_OK


def _load_pair(path) -> bernstein.RepresentationPair:
    data = _load_json_file(path)
    if not isinstance(data, dict) or not isinstance(data.get("atoms"), list) or "p" not in data:
        raise ParseError(f"{path}: expected {{\"p\": .., \"atoms\": [{{\"x\", \"mass\", \"w\"}}]}}")
    rows = []
    for i, a in enumerate(data["atoms"]):
        if not isinstance(a, dict) or any(k not in a for k in ("x", "mass", "w")):
            raise ParseError(f"{path}: atoms[{i}]: need fields x, mass, w")
        rows.append((float(a["x"]), float(a["mass"]), float(a["w"])))
    rows.sort()
    xs, ms, ws = (np.array(c) for c in zip(*rows))
    try:
        return bernstein.RepresentationPair(ws, DiscreteMeasure(xs, ms), float(data["p"]))
    except InputError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def cmd_bernstein(args, cfg: RunConfig) -> int:
    em = Emitter(args, cfg, f"bernstein_{args.action}")
    if args.action == "sum":
        B = entire.load_entire(em.input(_need(args, "zeros")))
        w = weights.load_weight(em.input(_need(args, "weight")))
        fn = bernstein.prop41_sum if args.regularized else bernstein.debranges_sum
        rep = fn(B, w, cfg.trunc)
        em.emit({"meta": _entire_meta(B), "trend": rep.trend, "tail_estimate": rep.tail_estimate,
                 "total": rep.total, "notes": rep.notes},
                {"bernstein_sum.csv": (["k", "partial_sum"], list(enumerate(rep.partial_sums, 1)))})
        return EXIT_OK
    if args.action == "minimize":
        w = weights.load_weight(em.input(_need(args, "weight")))
        sigma = bernstein.default_sigma(w) if args.sigma is None else int(args.sigma)
        theta = bernstein.ThetaSpec(cfg.theta_C / 2, cfg.theta_C, 1.0)
        g = bernstein.lemma41_growth(range(1, cfg.max_degree + 1), w, theta, sigma, args.strategy,
                                     grid=w.xs, seed=cfg.seed)
        em.emit({"sigma": sigma, **g}, {"bernstein_minimize.csv": (["N", "value", "strategy"],
                                                                   [(r["N"], r["value"], r["strategy"])
                                                                    for r in g["sequence"]])})
        return EXIT_OK
    pair = _load_pair(em.input(_need(args, "pair")))
    built = bernstein.build_measure(pair)
    if args.action == "build":
        em.emit({"measure": json.loads(measure_to_json(built))})
        return EXIT_OK
    mu = load_measure(em.input(args.measure)) if args.measure else built
    chk = bernstein.verify_representation(mu, pair)
    em.emit({"holds": chk.holds, "witness": chk.witness, "inv_weight_norm": chk.inv_weight_norm, "atoms": chk.atoms})
    if not chk.holds:
        sys.stderr.write(f"representation fails at x={chk.witness['x']!r}\n")
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_corpus(args, cfg: RunConfig) -> int:
    em = Emitter(args, cfg, "corpus")
    only = set(args.criterion) if args.criterion else None
    results = acceptance.run(cfg.seed, only=only)
    rows = [(c.number, c.name, "PASS" if c.passed else "FAIL") for c in results]
    width = max(len(r[1]) for r in rows)
    table = "".join(f"{n:>3}  {name:<{width}}  {st}\n" for n, name, st in rows)
    em.emit({"seed": cfg.seed, "criteria": [{"number": c.number, "name": c.name, "passed": c.passed,
                                             "detail": c.detail} for c in results]},
            {"corpus_summary.csv": (["criterion", "name", "status"], rows)}, table)
    return EXIT_OK if all(c.passed for c in results) else EXIT_INVARIANT


# ---------------------------------------------------------------------------


def _common(p):
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--out", help="output directory (default: JSON report on stdout)")
    p.add_argument("--seed", type=int)
    p.add_argument("--trunc", type=int, help="number of stored zeros to use")
    p.add_argument("--max-degree", dest="max_degree", type=int)
    p.add_argument("--p", help="norm exponent, or 'sup' for the weighted sup norm")
    p.add_argument("--stall-tol", dest="stall_tol", type=float)
    p.add_argument("--irls-tol", dest="irls_tol", type=float)
    p.add_argument("--tail-floor", dest="tail_floor", type=float)
    p.add_argument("--measure")
    p.add_argument("--zeros")
    p.add_argument("--weight")
    p.add_argument("--z", action="append", help="evaluation point, e.g. 0.5 or 1+2j (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polydensity", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", help="density verdicts for a discrete measure")
    d.add_argument("action", choices=["hamburger", "riesz"])
    _common(d)

    e = sub.add_parser("extremal", help="extremal sequences rho_n and M_n")
    e.add_argument("action", nargs="?", choices=["rho"], default="rho")
    _common(e)

    f = sub.add_parser("entire", help="entire functions given by their zeros")
    f.add_argument("action", choices=["eval", "delta", "identity", "classes"])
    f.add_argument("--order", default="2", help="order p of the partial-fraction remainder")
    _common(f)

    v = sub.add_parser("divisor", help="balanced divisors and perturbation budgets")
    v.add_argument("action", choices=["build", "perturb"])
    v.add_argument("--N", action="append", type=float)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--radius", type=float)
    _common(v)

    c = sub.add_parser("classes", help="normal polynomial family predicates")
    c.add_argument("action", nargs="?", choices=["check"], default="check")
    c.add_argument("--family")
    for name in ("alpha", "beta", "gamma", "delta_alpha", "delta_beta", "C", "radius"):
        c.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    _common(c)

    b = sub.add_parser("bernstein", help="density sums, objective minimization, representation")
    b.add_argument("action", choices=["sum", "minimize", "rep"])
    b.add_argument("rep_action", nargs="?", choices=["build", "verify"])
    b.add_argument("--pair")
    b.add_argument("--regularized", action="store_true", help="use the upper regularization of the weight")
    b.add_argument("--strategy", default=bernstein.LOCAL, choices=[bernstein.LOCAL, bernstein.BRUTE])
    b.add_argument("--sigma", choices=["0", "1"])
    b.add_argument("--theta-C", dest="theta_C", type=float)
    _common(b)

    k = sub.add_parser("corpus", help="run the acceptance corpus")
    k.add_argument("action", nargs="?", choices=["run"], default="run")
    k.add_argument("--criterion", action="append", type=int)
    _common(k)
    return ap


COMMANDS = {"density": cmd_density, "extremal": cmd_extremal, "entire": cmd_entire, "divisor": cmd_divisor,
            "classes": cmd_classes, "bernstein": cmd_bernstein, "corpus": cmd_corpus}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bernstein" and args.action == "rep":
        if args.rep_action is None:
            print("error: bernstein rep needs 'build' or 'verify'", file=sys.stderr)
            return EXIT_INPUT
        args.action = args.rep_action
    try:
        cfg = build_config(args)
        extremal.IRLS_TOL = cfg.irls_tol
        return COMMANDS[args.command](args, cfg)
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NonConvergence as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
