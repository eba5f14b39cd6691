"""Command-line driver.

Every subcommand produces a list of records.  ``--format machine`` prints one
JSON object per line (sorted keys, rationals as "p/q" strings); ``human``
prints a short aligned listing.  Exit codes: 0 success, 2 parse or
configuration error, 3 domain error, 4 inconclusive certificate.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import lattice, localsing, reduction, stabilize, stratum
from .errors import ConfigurationError, EqsingError, ParseError
from .ordering import parse_ordering
from .polyring import _UNSET, format_polynomial, parse_polynomial

PRESETS = {
    "gur1-d6": ((6, 5), 6),
    "gur1-d7a": ((7, 5), 7),
    "gur1-d7b": ((6, 6), 7),
    "gur1-d8a": ((8, 5), 8),
    "gur1-d8b": ((7, 6), 8),
    "qhomn-n4d3": ((3, 3, 3, 3), 3),
    "qhomn-n3d5": ((4, 4, 4), 5),
    "synthetic-d4": ((4, 4, 3), 4),
    "case2-n3d5": ((5, 5, 2), 5),
    "case2-n2d10": ((10, 5), 10),
}


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    cap: str | None = None
    jet_cap: int = localsing.JET_ORDER_CAP
    format: str = "machine"
    seed: int = 0
    workers: int = 1

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def param_cap(self):
        if self.cap is None:
            return _UNSET
        if self.cap.strip().lower() in ("none", "off", "inf"):
            return None
        try:
            value = int(self.cap)
        except ValueError:
            raise ConfigurationError(f"--cap must be an integer or 'none', got {self.cap!r}") from None
        if value < 0:
            raise ConfigurationError("--cap must be non-negative")
        return value


# serialization

def to_jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {_key(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in x]
        return sorted(items, key=json.dumps) if isinstance(x, (set, frozenset)) else items
    return str(x)


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(v) for v in k)
    return str(k)


def emit(records, fmt: str, out) -> None:
    for rec in records:
        rec = to_jsonable(rec)
        if fmt == "machine":
            out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            if set(rec) == {"nf"}:
                out.write(f"{rec['nf']}\n")
                continue
            width = max((len(k) for k in rec), default=0)
            for k in sorted(rec):
                out.write(f"{k.ljust(width)}  {rec[k]}\n")
            out.write("\n")


# argument helpers

def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"expected a comma-separated integer list, got {text!r}") from None


def split_top_level(text: str) -> list:
    """Split on commas outside square brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p for p in (s.strip() for s in parts) if p]


def _spec(opts: dict) -> localsing.SingularitySpec:
    preset = opts.get("preset")
    alpha, d = None, opts.get("degree")
    if preset:
        if preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {preset!r}; known: {', '.join(sorted(PRESETS))}")
        alpha, pd = PRESETS[preset]
        d = pd if d is None else d
    if opts.get("alpha"):
        alpha = _int_list(opts["alpha"])
    if alpha is None:
        raise ConfigurationError("give --alpha or --preset")
    lam = None
    if opts.get("lam"):
        try:
            lam = tuple(Fraction(x) for x in opts["lam"].split(","))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad --lam {opts['lam']!r}") from None
    return localsing.SingularitySpec.make(alpha, d, lam)


def _nvars_of(*texts) -> int:
    idx = [int(m) for t in texts for m in re.findall(r"x(\d+)", t)]
    return max(idx, default=1)


# subcommands

def cmd_h1(cfg: RunConfig) -> list:
    spec = _spec(cfg.options)
    k = cfg.options.get("k")
    k = spec.d if k is None else k
    return [{
        "alpha": spec.alpha, "d": spec.d, "k": k, "tau": spec.tau,
        "h1": lattice.h1(spec, k), "h1_next": lattice.h1(spec, k + 1),
        "expected_dimension": lattice.expected_dimension(spec), "qhomn": spec.is_qhomn(),
    }]


def cmd_tjurina(cfg: RunConfig) -> list:
    opts = cfg.options
    if opts.get("poly"):
        f = parse_polynomial(opts["poly"], _nvars_of(opts["poly"]))
        label = {"poly": format_polynomial(f)}
    else:
        spec = _spec(opts)
        f = localsing.canonical_polynomial(spec)
        label = {"alpha": spec.alpha, "d": spec.d, "poly": format_polynomial(f)}
    tau = localsing.tjurina_number(f, cap=cfg.jet_cap)
    mu = localsing.milnor_number(f, cap=cfg.jet_cap)
    return [{**label, "tau": tau, "mu": mu, "quasihomogeneous_certificate": tau == mu}]


def cmd_polytope(cfg: RunConfig) -> list:
    text = cfg.options.get("poly")
    if not text:
        raise ConfigurationError("polytope needs --poly")
    f = parse_polynomial(text, _nvars_of(text))
    P = localsing.newton_polytope(f)
    return [{"poly": format_polynomial(f), "vertices": P.vertices, "weights": P.weights,
             "quasihomogeneous": P.is_quasihomogeneous}]


def cmd_castelnuovo(cfg: RunConfig) -> list:
    opts = cfg.options
    if opts.get("davis"):
        d, k = _int_list(opts["davis"])
        prof = lattice.davis_profile(d, k)
        return [{"davis": (d, k), "profile": prof.as_dict(), "t": prof.t,
                 "davis_check": lattice.davis_check(d, k)}]
    if opts.get("h1_seq"):
        seq = _int_list(opts["h1_seq"])
        prof = lattice.castelnuovo_profile(seq, opts.get("deg"), opts.get("start") or 0)
        return [{"h1_seq": seq, "profile": prof.as_dict(), "t": prof.t}]
    spec = _spec(opts)
    prof = lattice.canonical_profile(spec)
    return [{"alpha": spec.alpha, "degree": prof.degree, "profile": prof.as_dict(),
             "a": prof.a, "t": prof.t}]


def cmd_nf(cfg: RunConfig) -> list:
    opts = cfg.options
    if not opts.get("poly") or not opts.get("gens"):
        raise ConfigurationError("nf needs --poly and --gens")
    gens_text = split_top_level(opts["gens"])
    nv = _nvars_of(opts["poly"], *gens_text)
    f = parse_polynomial(opts["poly"], nv)
    gens = [parse_polynomial(g, nv) for g in gens_text]
    ordering = parse_ordering(opts.get("ord") or "dp", nv)
    G = reduction.GeneratorSet(gens, ordering)
    if ordering.is_global:
        r = reduction.red_nf_buchberger(f, G)
    else:
        hc = reduction.highest_corner(G.leading_monomials(), ordering)
        r = reduction.truncated_nf(f, G, hc)
        r = r if hasattr(r, "terms") else _poly_from_raw(r, nv)
    return [{"nf": format_polynomial(r)}]


def _poly_from_raw(raw: dict, nv: int):
    from .polyring import Polynomial
    return Polynomial(nv, {e: c.get((), 0) for e, c in raw.items()})


def cmd_stratum(cfg: RunConfig) -> list:
    spec = _spec(cfg.options)
    system = stratum.derive(spec, cfg.param_cap())
    emit_kind = cfg.options.get("emit") or "verdict"
    if emit_kind == "system":
        recs = []
        for q in system.equations:
            recs.append({"kind": q.kind, "index": q.index, "target": q.target,
                         "equation": _format_pc(q.poly)})
        return recs
    record = stratum.classify_stratum(spec, cfg.param_cap(), system).as_record()
    if emit_kind == "verdict":
        keep = ("verdict", "case", "alpha", "d", "tau", "h1", "quadratic_rank", "dim_actual", "dim_expected")
        record = {k: record[k] for k in keep}
    return [record]


def _format_pc(pc) -> str:
    from .polyring import ParamCoefficient, format_coefficient
    if isinstance(pc, dict):
        pc = ParamCoefficient._raw(pc)
    return format_coefficient(pc)


def cmd_stabilize(cfg: RunConfig) -> list:
    opts = cfg.options
    base = _spec(opts)
    m = opts.get("squares")
    m = 1 if m is None else m
    spec = stabilize.SuspensionSpec.make(base, m, base.d)
    emit_kind = opts.get("emit") or "invariants"
    if emit_kind == "invariants":
        h, tau = stabilize.check_h1_tau_preserved(spec)
        return [{"alpha": spec.base.alpha, "d": spec.d, "squares": m, "h1": h, "tau": tau}]
    system = stabilize.derive_suspended_system(spec)
    if emit_kind == "system":
        return [{"row": i, "obstructed": i in system.obstructed, "special": system.specials[i],
                 "equation": _format_pc(q)} for i, q in enumerate(system.equations)]
    rec = {"alpha": spec.base.alpha, "d": spec.d, "squares": m, "tau": spec.base.tau,
           "linear_rank": system.linear_rank(), "obstructed": len(system.obstructed),
           "blocks_separated": stabilize.blocks_separated(system)}
    if len(system.obstructed) == 1:
        rep = stabilize.quadratic_rank_report(system)
        rec.update(combined_rank=rep.combined, w0_rank=rep.w0, square_ranks=rep.per_square)
    if m >= len(system.obstructed) + 1:
        w = stabilize.witness_reduced_component(system, seed=cfg.seed)
        rec.update(witness_point={k: v for k, v in w.point.items() if v}, minor=w.minor,
                   jacobian_rank=w.jacobian_rank, splits=[list(s) for s in w.splits],
                   minor_diagonal_on_A=w.diagonal_on_A)
    return [rec]


def _sweep_one(kind: str, item):
    if kind == "squares-d":
        alpha = item
        bad = [d for d in lattice.squares_d_degrees(alpha) if not lattice.squares_d_holds(alpha, d)]
        return {"alpha": alpha, "holds": not bad, "violations": bad}
    if kind == "davis":
        d, k = item
        return {"davis": (d, k), "holds": lattice.davis_check(d, k)}
    if kind == "h1":
        alpha = item
        spec = localsing.SingularitySpec.make(alpha) if sum(alpha) - 2 * len(alpha) - 1 >= max(alpha) else None
        if spec is None:
            return {"alpha": alpha, "qhomn": False}
        return {"alpha": alpha, "qhomn": True, "d": spec.d, "tau": spec.tau, "h1": lattice.h1(spec, spec.d)}
    raise ConfigurationError(f"unknown sweep kind {kind!r}")


def cmd_sweep(cfg: RunConfig) -> list:
    opts = cfg.options
    kind = opts.get("what") or "squares-d"
    if kind == "davis":
        top = opts.get("max_sum") or 8
        items = [(d, k) for d in range(2, top + 1) for k in range(2, d + 1)]
    else:
        items = list(lattice.canonical_alphas(opts.get("max_n") or 4, opts.get("max_sum") or 24,
                                              opts.get("min_n") or 1))
    workers = max(1, cfg.workers)
    if workers == 1:
        return [_sweep_one(kind, it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda it: _sweep_one(kind, it), items))


COMMANDS = {
    "h1": cmd_h1, "tjurina": cmd_tjurina, "polytope": cmd_polytope, "castelnuovo": cmd_castelnuovo,
    "nf": cmd_nf, "stratum": cmd_stratum, "stabilize": cmd_stabilize, "sweep": cmd_sweep,
}


def run(cfg: RunConfig) -> tuple:
    """(exit status, records).  Errors become a single record with their kind."""
    if cfg.format not in ("machine", "human"):
        return 2, [{"error": "configuration", "message": f"unknown format {cfg.format!r}"}]
    try:
        return 0, COMMANDS[cfg.subcommand](cfg)
    except EqsingError as exc:
        module = type(exc).__module__
        origin = exc.__traceback__
        while origin.tb_next is not None:
            origin = origin.tb_next
        source = origin.tb_frame.f_globals.get("__name__", module)
        return exc.exit_code, [{"error": exc.kind, "message": str(exc), "module": source}]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("machine", "human"), default="machine")
    common.add_argument("--cap", help="parameter-degree cap (integer or 'none'); overrides EQSING_MAX_PARAM_DEG")
    common.add_argument("--jet-cap", type=int, default=localsing.JET_ORDER_CAP)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)

    spec_args = argparse.ArgumentParser(add_help=False)
    spec_args.add_argument("--alpha")
    spec_args.add_argument("--degree", type=int)
    spec_args.add_argument("--lambda", "--lam", dest="lam", help="comma-separated lambda_i")
    spec_args.add_argument("--preset", help="one of: " + ", ".join(sorted(PRESETS)))

    p = argparse.ArgumentParser(prog="eqsing", description="Equisingular strata of canonical singularities.")
    sub = p.add_subparsers(dest="subcommand", required=True)
    s = sub.add_parser("h1", parents=[common, spec_args], help="lattice h1 and tau")
    s.add_argument("--k", type=int)
    s = sub.add_parser("tjurina", parents=[common, spec_args], help="Tjurina and Milnor numbers")
    s.add_argument("--poly")
    s = sub.add_parser("polytope", parents=[common], help="Newton polytope")
    s.add_argument("--poly")
    s = sub.add_parser("castelnuovo", parents=[common, spec_args], help="Castelnuovo profile")
    s.add_argument("--davis")
    s.add_argument("--h1-seq", dest="h1_seq")
    s.add_argument("--deg", type=int)
    s.add_argument("--start", type=int)
    s = sub.add_parser("nf", parents=[common], help="normal form")
    s.add_argument("--poly")
    s.add_argument("--gens")
    s.add_argument("--ord")
    s = sub.add_parser("stratum", parents=[common, spec_args], help="stratum equations and verdict")
    s.add_argument("--emit", choices=("verdict", "system", "certificates"), default="certificates")
    s = sub.add_parser("stabilize", parents=[common, spec_args], help="suspension by squares")
    s.add_argument("--squares", type=int, default=1)
    s.add_argument("--emit", choices=("invariants", "system", "certificate"), default="invariants")
    s = sub.add_parser("sweep", parents=[common], help="batch sweeps")
    s.add_argument("--what", choices=("squares-d", "davis", "h1"), default="squares-d")
    s.add_argument("--max-n", dest="max_n", type=int)
    s.add_argument("--min-n", dest="min_n", type=int)
    s.add_argument("--max-sum", dest="max_sum", type=int)
    return p


GLOBAL_KEYS = ("format", "cap", "jet_cap", "seed", "workers", "subcommand")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(ns).items() if k not in GLOBAL_KEYS}
    return RunConfig(ns.subcommand, opts, ns.cap, ns.jet_cap, ns.format, ns.seed, ns.workers)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    status, records = run(cfg)
    human_error = status != 0 and cfg.format == "human"
    emit(records, cfg.format, sys.stderr if human_error else sys.stdout)
    return status


if __name__ == "__main__":
    sys.exit(main())
