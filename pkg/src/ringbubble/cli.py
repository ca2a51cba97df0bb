"""Command-line front door.

Subcommands: constants | check-bubble | energy-scan | expansion-check |
error-decay | critical-point | export-profile.

Every output file carries a header with the sha256 of the effective config
and the seed, so artifacts are traceable; with --no-timestamp reruns are
byte-identical.  All numbers are emitted with 17 significant digits.  Exit
codes: 0 success, 1 config error, 2 numerical failure, 3 inadmissible regime.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .bubble import (
    BubbleField,
    BubbleParams,
    KernelField,
    RingConfig,
    bubble_eval,
    kernel_eval,
    residual,
)
from .coeffs import compute_constants, lambda0
from .energy import (
    MCSpec,
    WeightedNormSpec,
    decay_fit,
    error_field,
    expansion_check,
    weighted_norm,
    F_reduced,
)
from .errors import (
    InadmissibleRegime,
    NotAdmissible,
    NumericalError,
    ValidationError,
)
from .model import ProblemParams, curvature_H, curvature_K, mu, regime, validate
from .quad import QuadratureSpec
from .solver import box_dj, construct_report

__all__ = ["RunConfig", "main", "run"]

_DESK_PARAMS = {"N": 5, "m": 2.0, "n": 2.0, "c0": -1.0, "d0": 1.0}


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _dump_json(obj, indent: int = 0) -> str:
    """JSON with every float at 17 significant digits, sorted keys."""
    pad = "  " * indent
    pad2 = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad2}"{k}": {_dump_json(obj[k], indent + 1)}' for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad2}{_dump_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    return json.dumps(obj)


@dataclass
class RunConfig:
    params: ProblemParams
    quad: QuadratureSpec
    mc: MCSpec
    norm: WeightedNormSpec
    k_list: tuple
    out: str | None
    format: str            # "csv" | "json"
    no_timestamp: bool

    @classmethod
    def load(cls, args) -> "RunConfig":
        raw = {}
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
            if not isinstance(raw, dict):
                raise ValidationError("config root must be a JSON object")
        known = {"params", "quad", "mc", "norm", "k_list", "output"}
        unknown = set(raw) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        params = validate(ProblemParams.from_dict(raw.get("params", _DESK_PARAMS)))
        try:
            quad = QuadratureSpec(**raw.get("quad", {}))
            mc = MCSpec(**raw.get("mc", {}))
            norm = WeightedNormSpec(**raw.get("norm", {}))
        except TypeError as exc:
            raise ValidationError(f"bad config section: {exc}") from exc
        norm.validated(params.N)
        if args.seed is not None:
            mc = MCSpec(samples=mc.samples, seed=args.seed)
        k_list = tuple(raw.get("k_list", (6, 8, 12, 16)))
        if getattr(args, "k", None):
            k_list = tuple(int(s) for s in str(args.k).split(","))
        output = raw.get("output", {})
        out = args.out if args.out is not None else output.get("path")
        fmt = args.format or output.get("format") or _default_format(args.command)
        if fmt not in ("csv", "json"):
            raise ValidationError(f"format must be csv or json, got {fmt!r}")
        return cls(params=params, quad=quad, mc=mc, norm=norm, k_list=k_list,
                   out=out, format=fmt, no_timestamp=args.no_timestamp)

    def config_hash(self) -> str:
        blob = json.dumps(
            {
                "params": json.loads(self.params.to_json()),
                "quad": asdict(self.quad),
                "mc": asdict(self.mc),
                "norm": asdict(self.norm),
                "k_list": list(self.k_list),
            },
            sort_keys=True,
        ).encode()
        return hashlib.sha256(blob).hexdigest()


def _default_format(command: str) -> str:
    return "csv" if command in ("expansion-check", "error-decay",
                                "energy-scan", "export-profile") else "json"


def _meta(cfg: RunConfig) -> dict:
    meta = {"config_sha256": cfg.config_hash(), "seed": cfg.mc.seed}
    if not cfg.no_timestamp:
        meta["generated"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return meta


def _emit(cfg: RunConfig, text: str, summary: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    print(summary)


def _csv_text(cfg: RunConfig, header_comments: list, columns: list,
              rows: list, footer_comments: list | None = None) -> str:
    meta = _meta(cfg)
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    lines += [f"# {c}" for c in header_comments]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    for c in footer_comments or []:
        lines.append(f"# {c}")
    return "\n".join(lines) + "\n"


def _json_text(cfg: RunConfig, payload: dict) -> str:
    return _dump_json({"meta": _meta(cfg), **payload}) + "\n"


# --- subcommands -----------------------------------------------------------------

def _cmd_constants(cfg: RunConfig, args) -> int:
    c = compute_constants(cfg.params, cfg.quad)
    payload = {"constants": c.as_dict(),
               "regime": regime(cfg.params).tag.value}
    reg = regime(cfg.params)
    if reg.admissible:
        payload["lambda0"] = lambda0(reg, c, cfg.params)
    _emit(cfg, _json_text(cfg, payload),
          f"constants: A={_fmt(c.A)} B={_fmt(c.B)} B1={_fmt(c.B1)}")
    return 0


def _cmd_check_bubble(cfg: RunConfig, args) -> int:
    # the bubble solves the constant-curvature problem, so residuals are
    # checked against the flat profile (c0 = d0 = 0) at the same N, Dfrak
    p0 = cfg.params
    flat = ProblemParams(N=p0.N, m=p0.m, n=p0.n, c0=0.0, d0=0.0,
                         r0=p0.r0, Dfrak=p0.Dfrak)
    N = flat.N
    rng = np.random.default_rng(cfg.mc.seed)
    n_pts = 200
    b = BubbleParams(center=tuple(np.zeros(N - 1)), Lambda=1.0,
                     Dfrak=flat.Dfrak, N=N)

    interior = rng.standard_normal((n_pts, N)) * 3.0
    interior[:, -1] = np.abs(interior[:, -1])
    bdry = interior.copy()
    bdry[:, -1] = 0.0

    fld = BubbleField(b)
    res_in = residual(interior, fld, "interior", flat)
    ref_in = bubble_eval(interior, b) ** ((N + 2.0) / (N - 2.0))
    res_bd = residual(bdry, fld, "boundary", flat)
    ref_bd = bubble_eval(bdry, b) ** (N / (N - 2.0))
    max_in = float(np.max(np.abs(res_in / ref_in)))
    max_bd = float(np.max(np.abs(res_bd / ref_bd)))

    kernel_max = 0.0
    for idx in range(N):
        kf = KernelField(idx, flat.Dfrak, N)
        r_in = residual(interior, kf, "linearized_interior", flat)
        scale = np.abs(bubble_eval(interior, b) ** (4.0 / (N - 2.0))
                       * kernel_eval(interior, idx, flat.Dfrak, N)) + 1e-300
        kernel_max = max(kernel_max, float(np.max(np.abs(r_in / scale))))

    payload = {
        "n_points": n_pts,
        "max_interior_residual": max_in,
        "max_boundary_residual": max_bd,
        "max_kernel_residual": kernel_max,
        "tolerance": 1e-8,
        "passed": bool(max_in <= 1e-8 and max_bd <= 1e-8 and kernel_max <= 1e-8),
    }
    _emit(cfg, _json_text(cfg, payload),
          f"check-bubble: interior={_fmt(max_in)} boundary={_fmt(max_bd)} "
          f"kernel={_fmt(kernel_max)} passed={payload['passed']}")
    return 0 if payload["passed"] else 2


def _cmd_energy_scan(cfg: RunConfig, args) -> int:
    k = int(cfg.k_list[0])
    c = compute_constants(cfg.params, cfg.quad)
    box = box_dj(k, c, cfg.params)
    n = int(args.grid)
    rows = []
    for r in np.linspace(box.r_lo, box.r_hi, n):
        for L in np.linspace(box.L_lo, box.L_hi, n):
            rows.append((r, L, F_reduced(float(r), float(L), k, c, cfg.params)))
    p = cfg.params
    text = _csv_text(
        cfg,
        [f"k = {k}", f"mu = k^((N-2)/(N-2-frakm)) = {_fmt(mu(k, p))}",
         f"box r in [{_fmt(box.r_lo)}, {_fmt(box.r_hi)}], "
         f"Lambda in [{_fmt(box.L_lo)}, {_fmt(box.L_hi)}]"],
        ["r", "Lambda", "F_reduced"],
        rows,
    )
    _emit(cfg, text, f"energy-scan: {len(rows)} grid values for k={k}")
    return 0


def _cmd_expansion_check(cfg: RunConfig, args) -> int:
    c = compute_constants(cfg.params, cfg.quad)
    rows = []
    all_passed = True
    for k in cfg.k_list:
        chk = expansion_check(int(k), c, cfg.params, cfg.quad, cfg.mc,
                              tolerance=args.tolerance)
        rows.append((chk.k, mu(chk.k, cfg.params), chk.J_full_value,
                     chk.J_full_error, chk.leading_value, chk.residual, chk.gate))
        all_passed = all_passed and chk.passed
    text = _csv_text(
        cfg,
        [f"mu = k^((N-2)/(N-2-frakm)), frakm = {_fmt(cfg.params.frak_m)}",
         "bound = max(3*mc_error, tolerance*k*mu^-frakm)"],
        ["k", "mu", "J_full", "J_err", "leading", "residual", "bound"],
        rows,
        [f"all_passed = {all_passed}"],
    )
    _emit(cfg, text, f"expansion-check: k={list(cfg.k_list)} all_passed={all_passed}")
    return 0 if all_passed else 2


def _cmd_error_decay(cfg: RunConfig, args) -> int:
    p = cfg.params
    rows = []
    for k in cfg.k_list:
        k = int(k)
        mu_val = mu(k, p)
        ring = RingConfig(k=k, r=mu_val * p.r0, Lambda=args.Lambda, params=p)
        n_in = weighted_norm(lambda pts: error_field(pts, ring, p, "in"),
                             ring, "dstar", cfg.norm)
        n_bd = weighted_norm(lambda pts: error_field(pts, ring, p, "bd"),
                             ring, "tstar", cfg.norm)
        rows.append((k, mu_val, n_in, n_bd))
    fit_in = decay_fit(cfg.k_list, p, "in", Lambda=args.Lambda, normspec=cfg.norm)
    fit_bd = decay_fit(cfg.k_list, p, "bd", Lambda=args.Lambda, normspec=cfg.norm)
    text = _csv_text(
        cfg,
        [f"mu = k^((N-2)/(N-2-frakm)), frakm = {_fmt(p.frak_m)}",
         f"Lambda = {_fmt(args.Lambda)}"],
        ["k", "mu", "norm_in", "norm_bd"],
        rows,
        [f"slope_in = {_fmt(fit_in['slope'])} (r2 = {_fmt(fit_in['r2'])})",
         f"slope_bd = {_fmt(fit_bd['slope'])} (r2 = {_fmt(fit_bd['r2'])})"],
    )
    _emit(cfg, text,
          f"error-decay: slope_in={_fmt(fit_in['slope'])} "
          f"slope_bd={_fmt(fit_bd['slope'])}")
    return 0


def _cmd_critical_point(cfg: RunConfig, args) -> int:
    k = int(cfg.k_list[0])
    rep = construct_report(k, cfg.params, full=args.full,
                           objective=args.objective,
                           quadspec=cfg.quad, mc_spec=cfg.mc)
    _emit(cfg, _json_text(cfg, {"report": rep.to_dict()}),
          f"critical-point: k={k} converged={rep.converged} "
          f"signature={rep.hessian_signature}")
    return 0 if (rep.converged or k < 6) else 2


def _cmd_export_profile(cfg: RunConfig, args) -> int:
    p = cfg.params
    rs = np.linspace(0.0, args.rmax, int(args.n))
    rows = [(float(r), curvature_K(float(r), p), curvature_H(float(r), p))
            for r in rs]
    text = _csv_text(
        cfg,
        [f"K(r) = 1 - c0 |r-r0|^m, H(r) = H0 - d0 |r-r0|^n, "
         f"clamped outside |r-r0| < delta = {_fmt(p.delta)}"],
        ["r", "K", "H"],
        rows,
    )
    _emit(cfg, text, f"export-profile: {len(rows)} samples to r={_fmt(args.rmax)}")
    return 0


# --- dispatch ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ringbubble",
        description="Ring-ansatz reduced-energy toolkit for half-space bubbles",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="RunConfig JSON file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--no-timestamp", action="store_true")

    common(sub.add_parser("constants"))
    common(sub.add_parser("check-bubble"))

    sp = sub.add_parser("energy-scan")
    common(sp)
    sp.add_argument("--k", default=None, help="ring size (first of k list)")
    sp.add_argument("--grid", type=int, default=21)

    sp = sub.add_parser("expansion-check")
    common(sp)
    sp.add_argument("--k", default=None, help="comma-separated ring sizes")
    sp.add_argument("--tolerance", type=float, default=0.05)

    sp = sub.add_parser("error-decay")
    common(sp)
    sp.add_argument("--k", default=None, help="comma-separated ring sizes")
    sp.add_argument("--Lambda", type=float, default=1.0)

    sp = sub.add_parser("critical-point")
    common(sp)
    sp.add_argument("--k", default=None, help="ring size (first of k list)")
    sp.add_argument("--full", action="store_true")
    sp.add_argument("--objective", default="reduced",
                    choices=("reduced", "reduced_plus_modeled_error"))

    sp = sub.add_parser("export-profile")
    common(sp)
    sp.add_argument("--rmax", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=101)

    return ap


_HANDLERS = {
    "constants": _cmd_constants,
    "check-bubble": _cmd_check_bubble,
    "energy-scan": _cmd_energy_scan,
    "expansion-check": _cmd_expansion_check,
    "error-decay": _cmd_error_decay,
    "critical-point": _cmd_critical_point,
    "export-profile": _cmd_export_profile,
}


def run(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = RunConfig.load(args)
    except (OSError, json.JSONDecodeError, ValidationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return _HANDLERS[args.command](cfg, args)
    except (NotAdmissible, InadmissibleRegime) as exc:
        print(f"inadmissible regime: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
