"""``petal`` command-line front end.

Exit status: 0 on success, 1 when a computed artifact breaks its invariant
(or a module fails to converge), 2 on usage errors.  Failures are reported
as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import io as pio
from .config import DEFAULT, Tolerances
from .errors import CombNotFixed, DomainError, PetalError
from .family import FAMILIES, FamilyId
from .fatou import DouadyFatou, _petal_samples, parabolic_chart, phase_B
from .fixed_points import default_disk, find_pair, lambda_coordinate
from .param_ray import landing_report, trace_parameter_ray
from .rays import Combinatorics, landing_estimate, trace_ray
from .verify import SUITES, replay, run_suite

COMMANDS = ("fixed-points", "fatou", "phase-b", "ray", "param-ray", "verify")
USAGE_ERRORS = (DomainError, CombNotFixed)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"not a complex number: {text!r}") from None


def _address(text):
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [p.strip() for p in str(text).split(",")]
    try:
        return [int(p) for p in items]
    except (TypeError, ValueError):
        raise UsageError(f"malformed external address {text!r}; expected comma-separated integers") from None


def _angle(text):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed external angle {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="petal", description="Parabolic bifurcation and landing of parameter rays.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with option values and a 'tolerances' object")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--c")
    p.add_argument("--param")
    p.add_argument("--angle")
    p.add_argument("--address")
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--seed", help="starting parameter for param-ray (default: real bisection)")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--name", help="file stem for artifacts (default: the command name)")
    p.add_argument("--suite", choices=(*SUITES, "all"))
    p.add_argument("--replay", help="re-check an emitted CSV")
    return p


def load_config(args) -> dict:
    """Merge the optional JSON config with flags; flags win."""
    cfg = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        if "lambda" in cfg:
            cfg["lam"] = cfg.pop("lambda")
    for key, value in vars(args).items():
        if value is not None and key != "config":
            cfg[key] = value
    try:
        cfg["tol"] = Tolerances.from_dict(cfg.pop("tolerances", {}) or {})
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _family(cfg) -> FamilyId:
    return FamilyId(cfg.get("family", "normalized"), int(cfg.get("n", 1)))


def _parameter(cfg, fid, required=True):
    given = [cfg[k] for k in ("param", "lam", "c") if cfg.get(k) is not None]
    if len(given) > 1:
        raise UsageError("give at most one of --param, --lambda, --c")
    if not given:
        if required:
            raise UsageError("this command needs a parameter (--lambda, --c or --param)")
        return fid.a0
    return _complex(given[0])


def _comb(cfg, fid):
    if cfg.get("angle") is not None and cfg.get("address") is not None:
        raise UsageError("give either --angle or --address")
    if cfg.get("address") is not None:
        return Combinatorics.external_address(_address(cfg["address"]), cfg["tol"])
    if cfg.get("angle") is not None:
        return Combinatorics.external_angle(_angle(cfg["angle"]))
    if fid.name == "exponential":
        return Combinatorics.external_address([0], cfg["tol"])
    return Combinatorics.external_angle(0)


def _paths(cfg, command):
    out = cfg.get("out", ".")
    stem = os.path.join(out, cfg.get("name") or command)
    return stem


def _emit_json(stem, payload):
    pio.atomic_write(stem + ".json", pio.json_text(payload))
    sys.stdout.write(pio.json_text(payload))


def _c(z):
    return [complex(z).real, complex(z).imag]


def cmd_fixed_points(cfg):
    fid = _family(cfg)
    m = fid.member(_parameter(cfg, fid), cfg["tol"])
    pair = find_pair(m, default_disk(m, cfg["tol"]), cfg["tol"])
    payload = {
        "member": m.to_json(),
        "z1": _c(pair.z1),
        "z2": _c(pair.z2),
        "mu1": _c(pair.mu1),
        "mu2": _c(pair.mu2),
        "disk": {"center": _c(pair.disk.center), "radius": pair.disk.radius},
    }
    if fid.name == "normalized" and pair.mu1 != 1:
        lc = lambda_coordinate(pair.mu1, fid.n)
        payload["lambda_coordinate"] = _c(lc.lam)
    _emit_json(_paths(cfg, "fixed-points"), payload)
    return 0


def cmd_fatou(cfg):
    tol = cfg["tol"]
    fid = _family(cfg)
    m = fid.member(_parameter(cfg, fid, required=False), tol)
    payload = {"member": m.to_json()}
    ok = True
    if m.a == fid.a0:
        for side in ("incoming", "outgoing"):
            ch = parabolic_chart(m, side, tol)
            pts = _petal_samples(ch, 50)
            res = ch.abel_residual(pts)
            ok &= res <= tol.abel_tol
            payload[side] = ch.to_json(pts[:5]) | {"abel_residual_50": res}
    else:
        df = DouadyFatou(m, tol)
        spread, _ = df.gate_constancy()
        payload["gate_constancy"] = spread
        payload["fixed_points"] = {"outgoing": _c(df.z_out), "incoming": _c(df.z_in)}
        for side in ("outgoing", "incoming"):
            res = df.abel_residual(side)
            payload[side] = {"abel_residual": res}
            ok &= res <= tol.abel_tol
        ok &= spread <= tol.constancy_tol
    _emit_json(_paths(cfg, "fatou"), payload)
    return 0 if ok else 1


def cmd_phase_b(cfg):
    tol = cfg["tol"]
    fid = _family(cfg)
    m = fid.member(_parameter(cfg, fid), tol)
    pb = phase_B(m, tol)
    payload = {"member": m.to_json()} | pb.to_json()
    _emit_json(_paths(cfg, "phase-b"), payload)
    return 0 if abs(pb.mu_check - pb.mu_direct) <= tol.mu_tol else 1


def _write_curve(stem, header, rows, meta, points, title):
    pio.atomic_write(stem + ".csv", pio.csv_text(header, rows))
    pio.atomic_write(stem + ".json", pio.json_text(meta))
    pio.atomic_write(stem + ".svg", pio.svg_polyline(points, title))


def cmd_ray(cfg):
    tol = cfg["tol"]
    fid = _family(cfg)
    m = fid.member(_parameter(cfg, fid), tol)
    comb = _comb(cfg, fid)
    r = trace_ray(m, comb, float(cfg.get("t_start", 5.0)), float(cfg.get("t_end", -5.0)),
                  float(cfg.get("step", tol.ray_step)), tol)
    meta = r.sidecar()
    try:
        land, unc = landing_estimate(r)
        meta["landing"], meta["landing_uncertainty"] = _c(land), unc
    except PetalError:
        pass
    stem = _paths(cfg, "ray")
    _write_curve(stem, pio.RAY_HEADER, r.to_rows(), meta, [(z.real, z.imag) for z in r.z],
                 f"{fid.name} a={m.a} {comb.label()}")
    sys.stdout.write(pio.json_text(meta))
    bound = 1e-12 if fid.name == "quadratic" and m.a == 0 else tol.invariance_tol
    return 0 if r.invariance_residual <= bound else 1


def cmd_param_ray(cfg):
    tol = cfg["tol"]
    fid = _family(cfg)
    comb = _comb(cfg, fid)
    seed = _complex(cfg["seed"]) if cfg.get("seed") is not None else None
    pr = trace_parameter_ray(fid, comb, float(cfg.get("t_start", 1.0)), float(cfg.get("t_end", -12.0)),
                             float(cfg.get("step", 1.0)), seed, tol)
    meta = pr.sidecar()
    try:
        meta["landing_report"] = landing_report(pr, fid.a0)
    except PetalError as exc:
        meta["landing_report"] = {"error": exc.to_dict()}
    stem = _paths(cfg, "param-ray")
    _write_curve(stem, pio.PARAM_HEADER, pr.to_rows(), meta, [(a.real, a.imag) for a in pr.a],
                 f"{fid.name} parameter ray {comb.label()}")
    sys.stdout.write(pio.json_text(meta))
    return 0 if max(pr.residual) <= tol.defect_tol else 1


def cmd_verify(cfg):
    tol = cfg["tol"]
    if cfg.get("replay"):
        checks = replay(cfg["replay"], tol)
    else:
        checks = run_suite(cfg.get("suite", "all"), tol)
    payload = {"checks": [c.to_json() for c in checks], "ok": all(c.ok for c in checks)}
    sys.stdout.write(pio.json_text(payload))
    return 0 if payload["ok"] else 1


HANDLERS = {
    "fixed-points": cmd_fixed_points,
    "fatou": cmd_fatou,
    "phase-b": cmd_phase_b,
    "ray": cmd_ray,
    "param-ray": cmd_param_ray,
    "verify": cmd_verify,
}


def _diag(code, message, status):
    sys.stderr.write(json.dumps({"error": code, "message": message, "exit": status}, sort_keys=True) + "\n")
    return status


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args)
        return HANDLERS[args.command](cfg)
    except UsageError as exc:
        return _diag("UsageError", str(exc), 2)
    except USAGE_ERRORS as exc:
        return _diag(exc.code, str(exc), 2)
    except PetalError as exc:
        return _diag(exc.code, str(exc), 1)
    except OSError as exc:
        return _diag("OSError", str(exc), 2)


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
