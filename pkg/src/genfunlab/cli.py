"""Batch front end: parse net specs, run the test suites, emit reports.

Reports are plain JSON (schema "report_v1") with the full configuration
embedded, so identical flags and seed reproduce byte-identical output.
Exit codes: 0 when every expected verdict matched, 1 for numeric failures
or verdict mismatches (with diagnostics), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import DEFAULT_CONFIG, EpsGrid, LabConfig
from .core import GeneralizedFunction
from .distributions import BadSpec, UnsupportedAlpha, parse_spec
from .embed import embed
from .fourier import fourier, probe_family, weak_zero_check
from .gallery import (
    UnknownName,
    abs_power,
    angular_power,
    gallery,
    gallery_names,
    monomial,
    radial_power,
)
from .homogeneity import (
    _normalized_u0,
    decompose_1d,
    etau_repair,
    radial_mean,
    reconstruction_check,
    u0_independence,
    weak_homogeneity_test,
)
from .mollifier import build_mollifier
from .pairing import make_battery, pair, weak_equal
from .scales import BUILTIN_SCALES, classify_against, dump_net_csv, estimate_order
from .testfun import Battery, bump, plateau


class UsageError(ValueError):
    pass


# ---------------- tiny DSLs ----------------

def _safe_scalar_expr(expr: str):
    """Compile an expression of eps with a small whitelist."""
    allowed_names = {"eps", "sin", "cos", "log", "ln", "abs", "exp", "pi", "sqrt"}
    tree = ast.parse(expr, mode="eval")
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id not in allowed_names:
            raise UsageError(f"unknown name {node.id!r} in scalar net expression")
        if isinstance(node, (ast.Attribute, ast.Subscript, ast.Lambda, ast.Call)) \
                and isinstance(node, ast.Call) \
                and (not isinstance(node.func, ast.Name) or node.func.id not in allowed_names):
            raise UsageError("only sin/cos/log/exp/abs/sqrt calls allowed")
        if isinstance(node, (ast.Attribute, ast.Subscript, ast.Lambda)):
            raise UsageError("disallowed syntax in scalar net expression")
    env = {"sin": math.sin, "cos": math.cos, "log": math.log, "ln": math.log,
           "abs": abs, "exp": math.exp, "pi": math.pi, "sqrt": math.sqrt}
    code = compile(tree, "<net>", "eval")
    return lambda eps: complex(eval(code, {"__builtins__": {}}, {**env, "eps": eps}))


def parse_scalar_net(text: str, config: LabConfig):
    """const:<expr(eps)> -> sampled scalar net on the grid."""
    kind, _, rest = text.partition(":")
    if kind != "const" or not rest:
        raise UsageError(f"classify expects const:<expr(eps)>, got {text!r}")
    f = _safe_scalar_expr(rest)
    return [(e, f(e)) for e in config.grid.array]


def parse_net(text: str, config: LabConfig) -> GeneralizedFunction:
    """Net DSL: embed:<spec>, gallery:<name>, const:<c>, poly:<k>, abs:<alpha>,
    radial_power:<alpha>, angular:<alpha,mode,kind>."""
    kind, _, rest = text.partition(":")
    if kind == "embed":
        try:
            return embed(parse_spec(rest if "(" in rest or rest in
                                    ("heaviside",) else rest + "(0)"
                                    if rest == "delta" else rest), config=config)
        except (BadSpec, UnsupportedAlpha) as exc:
            raise UsageError(str(exc))
    if kind == "gallery":
        name, _, opt = rest.partition("@")
        kw = {"dim": 2} if opt == "2" else {}
        try:
            return gallery(name, config=config, **kw).gf
        except UnknownName as exc:
            raise UsageError(str(exc))
    if kind == "const":
        from .core import constant_function
        return constant_function(complex(rest or "1"))
    if kind == "poly":
        return monomial(int(rest))
    if kind == "abs":
        return abs_power(float(rest))
    if kind == "radial_power":
        return radial_power(float(rest))
    if kind == "angular":
        a, mode, trig = rest.split(",")
        return angular_power(float(a), int(mode), trig)
    raise UsageError(f"unknown net spec {text!r}")


def parse_test(text: str):
    """Test-function DSL: bump:<center>,<half> or plateau:<center>,<in>,<out>."""
    kind, _, rest = text.partition(":")
    parts = [float(t) for t in rest.split(",")] if rest else []
    if kind == "bump":
        c, h = (parts + [0.0, 1.0])[:2] if parts else (0.0, 1.0)
        return bump(c, h)
    if kind == "plateau":
        c, i, o = (parts + [0.0, 0.5, 1.0])[:3] if parts else (0.0, 0.5, 1.0)
        return plateau(c, i, o)
    raise UsageError(f"unknown test spec {text!r}")


# ---------------- report plumbing ----------------

def _config_block(config: LabConfig, args) -> dict:
    moll = build_mollifier(config=config).describe()
    return {
        "grid": config.grid.describe(),
        "threshold": config.m_star,
        "battery": getattr(args, "battery", None),
        "domain": getattr(args, "domain", None),
        "seed": getattr(args, "seed", 0),
        "mollifier": moll,
    }


def _emit(report: dict, args) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text)
        for name, csv in report.get("csv_files", {}).items():
            (out / name).write_text(csv)
        print(f"wrote {out / 'report.json'}")
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def _battery_for(args, config: LabConfig, dim: int = 1) -> Battery:
    policy = args.battery or ("polar" if dim == 2 else "bump")
    domain = args.domain or ("pierced" if dim == 2 else "full")
    return make_battery(domain, policy, dim=dim, config=config, seed=args.seed)


def _resolve_config(args) -> LabConfig:
    config = DEFAULT_CONFIG
    if args.grid:
        try:
            k_min, k_max = (int(t) for t in args.grid.split(":"))
        except ValueError:
            raise UsageError(f"--grid expects k_min:k_max, got {args.grid!r}")
        config = config.with_grid(EpsGrid.geometric(k_min, k_max))
    if args.threshold:
        config = config.with_(m_star=int(args.threshold))
    if args.seed:
        config = config.with_(battery_seed=int(args.seed))
    return config


# ---------------- subcommands ----------------

def _cmd_classify(args, config) -> tuple[dict, bool]:
    samples = parse_scalar_net(args.net, config)
    scale = BUILTIN_SCALES.get(args.scale or "polynomial")
    if scale is None:
        raise UsageError(f"unknown scale {args.scale!r}; builtins: {sorted(BUILTIN_SCALES)}")
    rep = classify_against(samples, scale, config=config)
    result = {"net": args.net, "scale": scale.name, **rep.describe()}
    report = {"schema": "report_v1", "command": "classify",
              "config": _config_block(config, args), "result": result,
              "csv_files": {"net.csv": dump_net_csv(samples)}}
    return report, True


def _cmd_pair(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net, config)
    phi = parse_test(args.test)
    c = pair(f, phi, config=config)
    result = {"net": args.net, "test": args.test, **c.order.describe(),
              "head_value": complex(c.samples[0])}
    report = {"schema": "report_v1", "command": "pair",
              "config": _config_block(config, args), "result": result,
              "csv_files": {"pairing.csv": dump_net_csv(c.pairs())}}
    return report, True


def _cmd_weak_equal(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net_a, config)
    g = parse_net(args.net_b, config)
    battery = _battery_for(args, config, f.dim)
    rep = weak_equal(f, g, battery, config=config)
    result = {"lhs": args.net_a, "rhs": args.net_b,
              "battery_descriptor": rep.battery_descriptor,
              "per_test": [{"test_id": lab, "slope": r.fitted_slope,
                            "residual": r.fit_residual, "verdict": str(r.verdict)}
                           for lab, r in rep.per_test],
              "overall": "WeaklyEqual" if rep.weakly_equal else "NotWeaklyEqual"}
    report = {"schema": "report_v1", "command": "weak-equal",
              "config": _config_block(config, args), "result": result}
    return report, rep.weakly_equal


def _cmd_fourier(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net, config)
    probes = probe_family(f.dim, args.probes or 3, config=config)
    rows = []
    csvs = {}
    for i, xi in enumerate(probes):
        c = fourier(f, xi, config=config)
        rows.append({"probe_id": xi.label, "family": xi.family_tag,
                     "slope": c.order.fitted_slope, "verdict": str(c.order.verdict)})
        csvs[f"probe_{i:02d}.csv"] = dump_net_csv(c.pairs())
    report = {"schema": "report_v1", "command": "fourier",
              "config": _config_block(config, args),
              "result": {"net": args.net, "probes": rows},
              "csv_files": csvs}
    return report, True


def _cmd_weak_zero(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net, config)
    battery = _battery_for(args, config, f.dim) if f.dim == 1 else \
        make_battery(args.domain or "pierced", "polar", dim=2, config=config)
    rep = weak_zero_check(f, battery, config=config)
    report = {"schema": "report_v1", "command": "weak-zero",
              "config": _config_block(config, args),
              "result": {"net": args.net, **rep.describe()}}
    return report, rep.agreement


def _cmd_homog(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net, config)
    battery = _battery_for(args, config, f.dim)
    v = weak_homogeneity_test(f, args.alpha, battery=battery, config=config)
    report = {"schema": "report_v1", "command": "homog",
              "config": _config_block(config, args),
              "result": {"net": args.net, **v.describe()}}
    return report, v.weakly_homogeneous


def _cmd_decompose(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net, config)
    battery = _battery_for(args, config, 1)
    d = decompose_1d(f, args.alpha, battery, config=config)
    result = {"net": args.net, **d.describe(),
              "c1": dump_net_csv(d.c1.pairs()), "c2": dump_net_csv(d.c2.pairs())}
    report = {"schema": "report_v1", "command": "decompose-1d",
              "config": _config_block(config, args), "result": result,
              "csv_files": {"c1.csv": dump_net_csv(d.c1.pairs()),
                            "c2.csv": dump_net_csv(d.c2.pairs())}}
    ok = d.residual_report is None or d.residual_report.weakly_equal
    return report, ok


def _cmd_radial(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net, config)
    if f.dim != 2:
        raise UsageError("radial mean needs a plane net (e.g. angular:0.5,2,sin)")
    u0 = _normalized_u0(*(float(t) for t in args.u0.split(","))) if args.u0 \
        else _normalized_u0()
    rm = radial_mean(f, args.alpha, u0, config=config)
    battery = make_battery(args.domain or "pierced", "polar", dim=2, config=config)
    rep = reconstruction_check(f, rm, battery, config=config)
    result = {"net": args.net, "alpha": args.alpha,
              "angles": rm.angles.tolist(),
              "g_head": [complex(v) for v in rm.samples[0]],
              "reconstruction": "WeaklyEqual" if rep.weakly_equal else "NotWeaklyEqual"}
    report = {"schema": "report_v1", "command": "radial",
              "config": _config_block(config, args), "result": result}
    return report, rep.weakly_equal


def _cmd_etau(args, config) -> tuple[dict, bool]:
    f = parse_net(args.net, config)
    out = etau_repair(f, args.alpha, config=config)
    result = {"net": args.net, "alpha": args.alpha,
              "tempered": out["tempered"],
              "weak_equal": out["weak_equal"].weakly_equal,
              "growth": {str(k): v for k, v in out["growth"].items()}}
    report = {"schema": "report_v1", "command": "etau",
              "config": _config_block(config, args), "result": result}
    return report, out["tempered"] and out["weak_equal"].weakly_equal


def _cmd_gallery(args, config) -> tuple[dict, bool]:
    if args.verb == "list":
        result = {"names": gallery_names()}
    elif args.verb == "describe":
        if not args.name:
            raise UsageError("gallery describe needs a name")
        entry = gallery(args.name, config=config)
        meta = {k: v for k, v in entry.meta.items() if k not in ("phi0", "gen_test_object")}
        result = {"name": args.name, "label": entry.label, "meta": meta}
    else:
        raise UsageError(f"unknown gallery verb {args.verb!r}")
    report = {"schema": "report_v1", "command": "gallery",
              "config": _config_block(config, args), "result": result}
    return report, True


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="genfunlab",
                                description="numerical tests for generalized-function nets")
    p.add_argument("--config", help="file of key=value lines mirroring flags")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", help="k_min:k_max for the geometric eps grid")
    common.add_argument("--threshold", type=int, help="negligibility order m*")
    common.add_argument("--battery", help="battery policy (bump|tensor|polar|gen_scaled)")
    common.add_argument("--domain", help="battery domain (full|pierced)")
    common.add_argument("--seed", type=int, default=0, help="battery seed")
    common.add_argument("--out", help="directory for report files")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("classify", parents=[common])
    sp.add_argument("net")
    sp.add_argument("--scale", default="polynomial")
    sp = sub.add_parser("pair", parents=[common])
    sp.add_argument("net")
    sp.add_argument("test")
    sp = sub.add_parser("weak-equal", parents=[common])
    sp.add_argument("net_a")
    sp.add_argument("net_b")
    sp = sub.add_parser("fourier", parents=[common])
    sp.add_argument("net")
    sp.add_argument("--probes", type=int, default=3)
    sp = sub.add_parser("weak-zero", parents=[common])
    sp.add_argument("net")
    sp = sub.add_parser("homog", parents=[common])
    sp.add_argument("net")
    sp.add_argument("--alpha", type=float, required=True)
    sp = sub.add_parser("decompose-1d", parents=[common])
    sp.add_argument("net")
    sp.add_argument("--alpha", type=float, required=True)
    sp = sub.add_parser("radial", parents=[common])
    sp.add_argument("net")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--u0", help="center,halfwidth of the averaging bump")
    sp = sub.add_parser("etau", parents=[common])
    sp.add_argument("net")
    sp.add_argument("--alpha", type=float, required=True)
    sp = sub.add_parser("gallery", parents=[common])
    sp.add_argument("verb", choices=["list", "describe"])
    sp.add_argument("name", nargs="?")
    return p


_COMMANDS = {
    "classify": _cmd_classify,
    "pair": _cmd_pair,
    "weak-equal": _cmd_weak_equal,
    "fourier": _cmd_fourier,
    "weak-zero": _cmd_weak_zero,
    "homog": _cmd_homog,
    "decompose-1d": _cmd_decompose,
    "radial": _cmd_radial,
    "etau": _cmd_etau,
    "gallery": _cmd_gallery,
}


def _apply_config_file(argv: list[str]) -> list[str]:
    """Prepend flags from --config key=value lines (explicit flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = Path(argv[i + 1])
    extra: list[str] = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        extra += [f"--{key.strip()}", value.strip()]
    head = argv[: i] + argv[i + 2:]
    # insert defaults right after the subcommand arguments they apply to
    return head + extra


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
    except (OSError, IndexError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        report, matched = _COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.format == "csv" and report.get("csv_files"):
        first = next(iter(report["csv_files"].values()))
        if args.out:
            _emit(report, args)
        else:
            sys.stdout.write(first)
    else:
        _emit(report, args)
    return 0 if matched else 1


if __name__ == "__main__":
    sys.exit(main())
