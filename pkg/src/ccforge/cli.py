"""Command line front end.

Exit codes: 0 when every verdict passes, 1 on a failed verification, 2 on
a usage or input error.  Truncation order resolves as ``--order`` flag,
then ``order=`` in ``--config``, then ``CCFORGE_DEFAULT_ORDER``, then 8.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from . import oracle
from .bundles import (
    FormalBundle,
    chern_character,
    common_ring,
    koszul_alternating_ch,
    todd,
    todd_inverse,
    top_chern,
    total_chern,
)
from .projective import ProjCompletion
from .quadrature import ToleranceNotReached
from .report import Report
from .series import DEFAULT_TRUNCATION, OneVarSeries, SeriesError
from .singular_bc import (
    BCTheory,
    class_pair_defect,
    derive_phi_from_fiber_integrals,
    genus_from_class,
    harmonic,
    phi_homogeneous,
)

ENV_ORDER = "CCFORGE_DEFAULT_ORDER"

DEFAULT_TOL = {"harmonic": 1e-10, "polar": 1e-8, "c0": 1e-8, "lelong": 1e-9}


class UsageError(Exception):
    pass


def read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def resolve_order(flag: int | None, config: dict[str, str]) -> int:
    if flag is not None:
        value, source = flag, "--order"
    elif "order" in config:
        value, source = config["order"], "config"
    elif os.environ.get(ENV_ORDER):
        value, source = os.environ[ENV_ORDER], ENV_ORDER
    else:
        return DEFAULT_TRUNCATION
    try:
        order = int(value)
    except ValueError:
        raise UsageError(f"order from {source} is not an integer: {value!r}") from None
    if order < 0:
        raise UsageError("order must be non-negative")
    return order


def resolve_tol(flag: float | None, config: dict[str, str], default: float) -> float:
    if flag is not None:
        tol = flag
    elif "tol" in config:
        try:
            tol = float(config["tol"])
        except ValueError:
            raise UsageError(f"tol in config is not a number: {config['tol']!r}") from None
    else:
        tol = default
    if not tol > 0:
        raise UsageError("tol must be positive")
    return tol


def load_json_arg(value: str) -> Any:
    """Inline JSON, or a path to a JSON file."""
    text = value.strip()
    if not text.startswith(("[", "{")):
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {value}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {value[:40]!r}: {exc}") from exc


# -- commands ---------------------------------------------------------------


def cmd_phi(args, rep: Report) -> None:
    order = resolve_order(args.order, args.cfg)
    phi = phi_homogeneous(order)
    derived = derive_phi_from_fiber_integrals(None, order)
    rep.inputs.update(order=order)
    rep.outputs["coefficients"] = phi.to_json()
    rep.verdicts["fiber-integral derivation reproduces the closed form"] = derived == phi


def cmd_defect(args, rep: Report) -> None:
    try:
        s_prof = OneVarSeries.from_json(load_json_arg(args.s_genus))
        F = FormalBundle.from_json(load_json_arg(args.f))
        N = FormalBundle.from_json(load_json_arg(args.n))
    except (SeriesError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad defect input: {exc}") from exc
    F, N = common_ring(F, N)
    order = N.truncation if args.order is None else resolve_order(args.order, args.cfg)
    T = BCTheory.from_genus(s_prof, order)
    d = class_pair_defect(T, F, N)
    rep.inputs.update(s_genus=s_prof.to_json(), F=F.to_json(), N=N.to_json(), order=order)
    rep.outputs["parity"] = d.parity
    rep.outputs["defect"] = d.value.to_json()
    rep.outputs["homogeneous"] = T.homogeneous


def cmd_genus_from_class(args, rep: Report) -> None:
    try:
        psi = OneVarSeries.from_json(load_json_arg(args.psi))
    except (SeriesError, TypeError) as exc:
        raise UsageError(f"bad psi: {exc}") from exc
    order = psi.order if args.order is None else min(psi.order, resolve_order(args.order, args.cfg))
    g = genus_from_class(psi, order)
    rep.inputs.update(psi=psi.to_json(), order=order)
    rep.outputs["s_genus"] = g.profile.to_json()
    T = BCTheory.from_genus(g, order)
    rep.outputs["homogeneous"] = T.homogeneous
    rep.verdicts["round trip phi_h + Td^-1 S reproduces psi"] = T.phi == psi.truncate(order)


def _atomic(rank: int, prefix: str, order: int) -> FormalBundle:
    if rank < 1:
        raise UsageError("rank must be >= 1")
    try:
        return FormalBundle.universal(rank, prefix, order)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_verify(args, rep: Report) -> None:
    order = resolve_order(args.order, args.cfg)
    N = _atomic(args.rank, "c", order)
    rep.inputs.update(identity=args.identity, rank=args.rank, order=order)
    if args.identity == "borel-serre":
        residual = koszul_alternating_ch(N).ch - top_chern(N) * todd_inverse(N)
        ok = residual.is_zero()
        label = "sum (-1)^k ch(Lambda^k E^vee) = c_r(E) Td^-1(E)"
    else:
        if args.identity == "grr-zero-section":
            F = _atomic(args.f_rank, "f", order)
            N, F = common_ring(N, F)
            rep.inputs["f_rank"] = args.f_rank
            v = ProjCompletion(N).verify_grr_zero_section(F)
            label = "Koszul ch of F = i_*(ch(F) Td^-1(N))"
        elif args.identity == "taut-todd":
            v = ProjCompletion(N).verify_taut_todd()
            label = "pi_*(c_r(Q) Td^-1(Q)) = Td^-1(N)"
        else:
            v = ProjCompletion(N).verify_normalization()
            label = "pi_*(c_r(Q) Td(O(-1))) = 1"
        residual, ok = v.residual, v.passed
    rep.outputs["fiber_convention"] = "xi = c1(O(1)); c1(O(-1)) = -xi"
    rep.outputs["residual"] = residual.to_json()
    rep.verdicts[label] = ok


SERIES_CLASSES: dict[str, Callable[[FormalBundle], Any]] = {
    "ch": lambda E: chern_character(E).ch,
    "td": todd,
    "td-inverse": todd_inverse,
    "total-chern": total_chern,
    "top-chern": top_chern,
    "koszul": lambda E: koszul_alternating_ch(E).ch,
}


def cmd_series(args, rep: Report) -> None:
    order = resolve_order(args.order, args.cfg)
    if args.bundle:
        try:
            E = FormalBundle.from_json(load_json_arg(args.bundle))
        except (SeriesError, KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad bundle: {exc}") from exc
        rep.inputs["bundle"] = E.to_json()
    else:
        E = _atomic(args.rank, "c", order)
        rep.inputs["rank"] = args.rank
    rep.inputs.update({"class": args.cls, "order": E.truncation})
    rep.outputs["series"] = SERIES_CLASSES[args.cls](E).to_json()


def _oracle_outputs(rep: Report, res: oracle.QuadratureResult, target: float, tol: float, label: str) -> None:
    ok = abs(res.value - target) <= tol
    rep.outputs.update(value=res.value, err=res.abs_error_estimate, evals=res.evaluations, target=target,
                       **{"pass": ok})
    rep.verdicts[label] = ok


def cmd_oracle(args, rep: Report) -> None:
    kind = args.kind
    tol = resolve_tol(args.tol, args.cfg, DEFAULT_TOL[kind])
    rep.inputs.update(kind=kind, tol=tol)
    if kind == "harmonic":
        rep.inputs["n"] = args.n
        res = oracle.harmonic_integral(args.n, tol)
        _oracle_outputs(rep, res, -float(harmonic(args.n)), tol, f"n int log(1-w) w^(n-1) = -H_{args.n}")
    elif kind == "polar":
        rep.inputs["n"] = args.n
        res = oracle.polar_fiber_integral(args.n, tol)
        target = -float(harmonic(args.n) / args.n)
        _oracle_outputs(rep, res, target, tol, f"polar fiber integral = -H_{args.n}/{args.n}")
    elif kind == "c0":
        rep.inputs["h_scale"] = args.h_scale
        res = oracle.c0_homogeneous_coefficient(tol, args.h_scale)
        target = float(phi_homogeneous(0)[0])
        _oracle_outputs(rep, res, target, tol, "degree-zero coefficient = -1/4")
    else:
        rep.inputs["test"] = args.test
        rep.inputs["h_scale"] = args.h_scale
        res = oracle.poincare_lelong_check(args.test, tol, args.h_scale)
        _oracle_outputs(rep, res, 0.0, tol, f"Poincare-Lelong residual for {args.test!r}")


# -- parser -----------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _non_negative_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--config", help="key=value file with defaults (order, tol)")
    common.add_argument("--timing", action="store_true", help="include wall time in JSON output")
    order = argparse.ArgumentParser(add_help=False)
    order.add_argument("--order", type=_non_negative_int, help="truncation degree")

    p = argparse.ArgumentParser(prog="ccforge", description="Characteristic-class calculus for singular Bott-Chern theory.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("phi", parents=[common, order], help="line profile of the homogeneous theory")
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("defect", parents=[common, order], help="ch(F) Td^-1(N) S_T(N)")
    sp.add_argument("--s-genus", required=True, help='JSON list of "p/q" coefficients (or a path)')
    sp.add_argument("--f", required=True, help="bundle JSON for F (or a path)")
    sp.add_argument("--n", required=True, help="bundle JSON for N (or a path)")
    sp.set_defaults(func=cmd_defect)

    sp = sub.add_parser("genus-from-class", parents=[common, order], help="recover S_T from a line profile")
    sp.add_argument("--psi", required=True, help='JSON list of "p/q" coefficients (or a path)')
    sp.set_defaults(func=cmd_genus_from_class)

    sp = sub.add_parser("verify", help="exact identity checks")
    vsub = sp.add_subparsers(dest="identity", required=True)
    for name in ("taut-todd", "normalization", "grr-zero-section", "borel-serre"):
        vp = vsub.add_parser(name, parents=[common, order])
        vp.add_argument("--rank", type=_positive_int, default=2)
        if name == "grr-zero-section":
            vp.add_argument("--f-rank", type=_positive_int, default=1)
        vp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("oracle", help="numeric fiber integrals")
    osub = sp.add_subparsers(dest="kind", required=True)
    for name in ("harmonic", "polar"):
        op = osub.add_parser(name, parents=[common])
        op.add_argument("--n", type=_positive_int, required=True)
        op.add_argument("--tol", type=_positive_float)
        op.set_defaults(func=cmd_oracle)
    op = osub.add_parser("c0", parents=[common])
    op.add_argument("--h-scale", type=_positive_float, default=1.0)
    op.add_argument("--tol", type=_positive_float)
    op.set_defaults(func=cmd_oracle)
    op = osub.add_parser("lelong", parents=[common])
    op.add_argument("--test", choices=sorted(oracle.BUILTIN_TEST_FUNCTIONS), default="one")
    op.add_argument("--h-scale", type=_positive_float, default=1.0)
    op.add_argument("--tol", type=_positive_float)
    op.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("series", help="characteristic-class series")
    ssub = sp.add_subparsers(dest="action", required=True)
    ep = ssub.add_parser("eval", parents=[common, order])
    ep.add_argument("--class", dest="cls", choices=sorted(SERIES_CLASSES), required=True)
    ep.add_argument("--rank", type=_positive_int, default=1)
    ep.add_argument("--bundle", help="bundle JSON (or a path); overrides --rank")
    ep.set_defaults(func=cmd_series)
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> tuple[int, Report | None]:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    rep = Report(command=argv)
    start = time.perf_counter()
    try:
        args.cfg = read_config(args.config)
        args.func(args, rep)
    except UsageError as exc:
        print(f"ccforge: error: {exc}", file=stderr)
        return 2, None
    except ToleranceNotReached as exc:
        print(f"ccforge: {exc}", file=stderr)
        return 1, None
    rep.wall_time_s = time.perf_counter() - start
    if args.json:
        print(rep.dumps(timing=args.timing), file=stdout)
    else:
        print(rep.render_text(), file=stdout)
    return (0 if rep.passed else 1), rep


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
