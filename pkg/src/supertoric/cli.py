"""Command-line interface: ``supertoric <subcommand> ...``.

Exit codes: 0 when a verdict was computed (including negative ones),
2 for malformed input, 3 for unsupported input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any

from . import decofan as dfm
from . import ds as dsm
from . import qgr as qm
from .lattice import Fan, LatticeError, UnsupportedCone, same_support
from .superlie import SupertorusData, UndecidedAtBound

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_UNSUPPORTED = 3


class Malformed(Exception):
    pass


@dataclass
class CommandConfig:
    command: str
    degree: int
    mode: str = "general"
    fmt: str = "json"
    jobs: int = 1


# ------------------------------------------------------------------ io


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise Malformed(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise Malformed(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _guard(path: str, fn, data):
    try:
        return fn(data)
    except (dfm.UnsupportedDecoration, dfm.OutOfScope, UnsupportedCone):
        raise
    except (KeyError, TypeError, ValueError, LatticeError, ZeroDivisionError, AttributeError) as exc:
        raise Malformed(f"{path}: {exc}") from exc


def _is_sqrt(data: dict) -> bool:
    decs = data.get("decorations", {}) if isinstance(data, dict) else {}
    return any(isinstance(v, dict) and "signs" in v for v in decs.values())


def load_decorated(path: str):
    """A ``DecoratedFan``, or a ``SqrtDecoratedFan`` when decorations are irrational."""
    data = _read_json(path)
    if not isinstance(data, dict):
        raise Malformed(f"{path}: expected a JSON object")
    if _is_sqrt(data):
        fan = _guard(path, lambda d: Fan.from_json(d["fan"]), data)
        lines = []
        for i, u in enumerate(fan.rays):
            entry = data["decorations"].get(str(i))
            if entry is None:
                lines.append(None)
            elif isinstance(entry, dict) and "signs" in entry:
                lines.append(_guard(path, lambda e: dfm.sqrt_line(u, e["signs"]), entry))
            else:
                raise Malformed(f"{path}: decoration {i}: mix of sign vectors and subspaces")
        sf = dfm.SqrtDecoratedFan(fan, tuple(lines))
        torus = _guard(path, lambda d: SupertorusData.from_json(d["torus"]), data)
        if torus != SupertorusData.q1n(fan.rank):
            raise dfm.OutOfScope("sign-vector decorations need the Q(1)^n torus")
        rat = sf.rational()
        return rat if rat is not None else sf
    return _guard(path, dfm.DecoratedFan.from_json, data)


def _need_rational(obj, what: str) -> dfm.DecoratedFan:
    if isinstance(obj, dfm.SqrtDecoratedFan):
        raise dfm.UnsupportedDecoration(f"{what} needs rational decorations; this fan only supports validate/enumerate")
    return obj


def _ints(text: str, what: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise Malformed(f"--{what}: expected comma-separated integers, got {text!r}") from exc


# ------------------------------------------------------------ commands


def cmd_validate(args, cfg: CommandConfig) -> dict:
    obj = load_decorated(args.file)
    if isinstance(obj, dfm.SqrtDecoratedFan):
        ok, witness = dfm.validate_sqrt(obj)
        return {"valid": ok, "mode": "large_orbit", "exact": True, "witness": witness}
    return dfm.validate(obj, cfg.mode, cfg.degree).to_json()


def cmd_chart(args, cfg) -> dict:
    df = _need_rational(load_decorated(args.file), "chart")
    return dfm.ray_chart(df, args.ray).to_json()


def cmd_weight_space(args, cfg) -> dict:
    df = _need_rational(load_decorated(args.file), "weight-space")
    cone = df.find_cone(_ints(args.cone, "cone"))
    m = _ints(args.m, "m")
    if len(m) != df.torus.p:
        raise Malformed(f"--m must have {df.torus.p} entries")
    ws = dfm.sigma_weight_space(df, cone, m)
    out = {"cone": list(cone), "m": list(m), "dim": ws.dim, "basis": ws.render(), "route": "intersection"}
    if df.is_large_orbit:
        ind = dfm.induced_sigma_weight_space(df, cone, m)
        out["induced_dim"] = ind.dim
        out["routes_agree"] = ind.space == ws.space
    return out


def cmd_stabilizer(args, cfg) -> dict:
    df = _need_rational(load_decorated(args.file), "stabilizer")
    cone = df.find_cone(_ints(args.cone, "cone"))
    even, odd = dfm.orbit_stabilizer(df, cone)
    even2, odd2 = dfm.orbit_stabilizer_from_chart(df, cone)
    return {"cone": list(cone), "even": even.to_json(), "odd": odd.to_json(), "routes_agree": even == even2 and odd == odd2}


def cmd_smooth(args, cfg) -> dict:
    df = _need_rational(load_decorated(args.file), "smooth")
    return dfm.smooth_check(df).to_json()


def cmd_resolve(args, cfg) -> dict:
    df = _need_rational(load_decorated(args.file), "resolve")
    res, phi = dfm.resolve(df)
    out = {
        "fan": res.to_json(),
        "map": phi.to_json(),
        "smooth": dfm.smooth_check(res).smooth,
        "same_support": same_support(res.fan, df.fan),
    }
    if res.is_large_orbit and df.is_large_orbit:
        out["morphism"] = dfm.morphism_check(res, df, phi, cfg.degree).ok
    return out


def cmd_morphism(args, cfg) -> dict:
    src = _need_rational(load_decorated(args.source), "morphism")
    dst = _need_rational(load_decorated(args.target), "morphism")
    phi = _guard(args.map, dfm.MorphismData.from_json, _read_json(args.map))
    return dfm.morphism_check(src, dst, phi, cfg.degree).to_json()


def cmd_ds_check(args, cfg) -> dict:
    df = _need_rational(load_decorated(args.file), "ds-check")
    override = None
    if args.override:
        override = _guard(args.override, lambda d: dsm.parse_override(df.torus.q, d), _read_json(args.override))
    bound = args.degree or dsm.DEFAULT_BOUND
    return dsm.hr1_condition_e(df, args.ray, override, bound).to_json()


def cmd_enumerate(args, cfg) -> dict:
    fan = _guard(args.fan, Fan.from_json, _read_json(args.fan))
    torus = SupertorusData.q1n(fan.rank)
    found = dfm.enumerate_decorations(torus, fan, cfg.jobs)
    return {
        "count": len(found),
        "doubly_decorated": sum(any(f.is_doubly_decorated(c) for c in fan.maximal_cones) for f in found),
        "decorations": [f.to_json()["decorations"] for f in found],
    }


def cmd_qgr(args, cfg) -> dict:
    if args.pattern:
        sp = _guard(args.pattern, qm.SupportPattern.from_json, _read_json(args.pattern))
    else:
        if args.r is None or args.n is None:
            raise Malformed("qgr needs --r and --n, or --pattern")
        sp = qm.SupportPattern.generic(args.r, args.n)
    stab = qm.stabilizer_from_pattern(sp)
    df = qm.orbit_closure_fan(sp)
    poly = qm.orbit_closure_polytope(sp)
    back = qm.polytope_fan_roundtrip(poly)
    out = {
        "pattern": sp.to_json(),
        "stabilizer": stab.to_json(),
        "fan": df.to_json(),
        "polytope": poly.to_json(),
        "roundtrip": qm.decorated_fans_equal(df, back),
        "valid_large_orbit": dfm.validate(df, "large_orbit", cfg.degree).valid,
    }
    if sp == qm.SupportPattern.generic(sp.r, sp.n):
        hyp = qm.polytope_fan_roundtrip(qm.hypersimplex_polytope(sp.r, sp.n))
        out["matches_hypersimplex"] = qm.decorated_fans_equal(df, hyp)
    return out


def cmd_polytope_to_fan(args, cfg) -> dict:
    dp = _guard(args.file, qm.DecoratedPolytope.from_json, _read_json(args.file))
    df = qm.polytope_fan_roundtrip(dp)
    back = qm.polytope_from_fan(df, dp)
    return {"fan": df.to_json(), "roundtrip": all(a.W == b.W for a, b in zip(dp.faces, back.faces))}


def cmd_plot_data(args, cfg) -> dict:
    data = _read_json(args.file)
    if isinstance(data, dict) and "vertices" in data:
        dp = _guard(args.file, qm.DecoratedPolytope.from_json, data)
        return {"kind": "polytope", **qm.plot_data(dp)}
    obj = load_decorated(args.file)
    if isinstance(obj, dfm.SqrtDecoratedFan):
        rays = [
            {"ray": i, "coords": list(u), "label": "0" if l is None else json.dumps(l.to_json()["signs"])}
            for i, (u, l) in enumerate(zip(obj.fan.rays, obj.lines))
        ]
        return {"kind": "fan", "rank": obj.fan.rank, "rays": rays, "cones": [list(c) for c in obj.fan.maximal_cones]}
    rays = []
    for i, u in enumerate(obj.fan.rays):
        chain = obj.chains[i]
        rays.append({"ray": i, "coords": list(u), "dims": [s.dim for s in chain.spaces], "label": _chain_label(chain)})
    return {"kind": "fan", "rank": obj.fan.rank, "h_dim": obj.h.dim, "rays": rays, "cones": [list(c) for c in obj.fan.maximal_cones]}


def _chain_label(chain) -> str:
    parts = []
    for s in chain.spaces:
        if s.dim == 0:
            parts.append("0")
        elif s.dim == s.n:
            parts.append("t1")
        else:
            parts.append("<" + ", ".join(_odd_vec(r) for r in s.rows) + ">")
    return " ⊇ ".join(parts)


def _odd_vec(v) -> str:
    from .exterior import ExteriorElement

    return ExteriorElement.linear(v).render([f"θ{i + 1}" for i in range(len(v))])


COMMANDS = {
    "validate": cmd_validate,
    "chart": cmd_chart,
    "weight-space": cmd_weight_space,
    "stabilizer": cmd_stabilizer,
    "smooth": cmd_smooth,
    "resolve": cmd_resolve,
    "morphism": cmd_morphism,
    "ds-check": cmd_ds_check,
    "enumerate": cmd_enumerate,
    "qgr": cmd_qgr,
    "polytope-to-fan": cmd_polytope_to_fan,
    "plot-data": cmd_plot_data,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", type=int, default=None, help="degree bound (default: $SUPERTORIC_DEGREE or 2; ds-check: 6)")
    common.add_argument("--mode", choices=["general", "large_orbit"], default="general")
    common.add_argument("--format", choices=["json", "text"], default="json", dest="fmt")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=None, help="accepted and ignored")

    p = argparse.ArgumentParser(prog="supertoric", description="Decorated fans of toric supervarieties.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("validate", "smooth", "resolve", "polytope-to-fan", "plot-data"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("file")
    s = sub.add_parser("chart", parents=[common])
    s.add_argument("file")
    s.add_argument("--ray", type=int, required=True)
    s = sub.add_parser("weight-space", parents=[common])
    s.add_argument("file")
    s.add_argument("--cone", required=True, help="comma-separated ray indices")
    s.add_argument("--m", required=True, help="comma-separated character")
    s = sub.add_parser("stabilizer", parents=[common])
    s.add_argument("file")
    s.add_argument("--cone", required=True)
    s = sub.add_parser("morphism", parents=[common])
    s.add_argument("source")
    s.add_argument("target")
    s.add_argument("--map", required=True)
    s = sub.add_parser("ds-check", parents=[common])
    s.add_argument("file")
    s.add_argument("--ray", type=int, required=True)
    s.add_argument("--override", default=None)
    s = sub.add_parser("enumerate", parents=[common])
    s.add_argument("--fan", required=True)
    s = sub.add_parser("qgr", parents=[common])
    s.add_argument("--r", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--pattern", default=None)
    return p


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, ensure_ascii=False)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {json.dumps(v, sort_keys=True, ensure_ascii=False)}" for v in obj)
    return f"{pad}{obj}"


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    degree = args.degree if args.degree is not None else dfm.default_degree()
    if degree < 1:
        print("error: --degree must be at least 1", file=sys.stderr)
        return EXIT_MALFORMED
    cfg = CommandConfig(args.command, degree, args.mode, args.fmt, max(args.jobs, 1))
    try:
        result = COMMANDS[args.command](args, cfg)
    except Malformed as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (dfm.UnsupportedDecoration, dfm.OutOfScope, UnsupportedCone, UndecidedAtBound) as exc:
        print(f"error: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except dsm.DSConsistencyError as exc:
        print(f"error: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (dfm.DecoratedFanError, qm.QGrError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    if cfg.fmt == "json":
        out.write(json.dumps(result, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(_text(result) + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
