"""Command-line interface.

Exit codes: 0 valid / yes / ok, 2 invalid / no / verification failed,
3 undecided, 64 usage error, 65 malformed input file, 70 internal error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys

import numpy as np

from . import __version__
from .channels import (
    apply,
    compose,
    env_mode_bound,
    fd_counterexample,
    transpose_map_params,
    validity,
)
from .dilation import build_dilation, induced_channel, verify_dilation
from .exceptions import GaussianChannelError, InvalidChannel
from .interferometer import Status, decide
from .io import (
    MalformedInput,
    channel_to_dict,
    digest,
    dumps,
    load_channel,
    load_dilation,
    load_state,
    read_json,
    state_to_dict,
    store,
    write_json,
)
from .numerics import ToleranceConfig
from .selftest import run_selftest

EXIT_OK, EXIT_NO, EXIT_UNDECIDED = 0, 2, 3
EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 64, 65, 70

_DEFAULTS = ToleranceConfig()


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=_DEFAULTS.residual_tol, help="residual tolerance")
    p.add_argument("--eig-tol", type=float, default=_DEFAULTS.eig_tol, help="relative eigenvalue tolerance")
    p.add_argument("--eps", type=float, default=_DEFAULTS.reg_eps, help="regularization for singular Y")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=None, help="random states / samples per check")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--out", default=None, help="write the produced object (or report) here")
    p.add_argument("--json", action="store_true", help="print the machine-readable report")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="gaussian-channels", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_, *files):
        p = sub.add_parser(name, help=help_, parents=[common])
        for f in files:
            p.add_argument(f)
        return p

    add("check", "validity certificate of a channel", "channel")
    add("evolve", "apply a channel to a state", "channel", "state")
    p = add("dilate", "build a symplectic Stinespring dilation", "channel")
    p.add_argument("--singular", choices=("deflate", "regularize"), default="deflate")
    add("verify", "compare a dilation with its channel on random states", "channel", "dilation")
    add("interferometer", "decide passive (interferometer) implementability", "channel")
    add("compose", "channel for SECOND applied after FIRST", "first", "second")
    add("modes", "environment-mode upper bound", "channel")
    for name, help_ in (
        ("counterexample", "channel in F_d(X) but not in F_d^0(X)"),
        ("transpose-map", "covariance data of the transpose map"),
    ):
        p = add(name, help_)
        p.add_argument("--d", type=int, default=1)
    add("selftest", "run the reduced property suites")
    return parser


def _report(args, argv, inputs, results):
    tol = {"eig_tol": args.eig_tol, "residual_tol": args.tol, "reg_eps": args.eps}
    return {
        "command": args.command,
        "argv": list(argv),
        "inputs_digest": digest(inputs),
        "results": results,
        "tolerances": tol,
        "seed": args.seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def _cmd_check(args, cfg):
    ch = load_channel(args.channel, cfg)
    rep = validity(ch, cfg)
    res = {
        "valid": rep.valid,
        "min_eig_minus": rep.min_eig_minus,
        "min_eig_plus": rep.min_eig_plus,
        "y_min_eig": rep.y_min_eig,
        "scale": rep.scale,
    }
    return (EXIT_OK if rep.valid else EXIT_NO), [channel_to_dict(ch)], res, None


def _cmd_evolve(args, cfg):
    ch, st = load_channel(args.channel, cfg), load_state(args.state, cfg)
    out = apply(ch, st, cfg)
    return EXIT_OK, [channel_to_dict(ch), state_to_dict(st)], {"state": state_to_dict(out)}, out


def _cmd_dilate(args, cfg):
    ch = load_channel(args.channel, cfg)
    dil = build_dilation(ch, cfg, singular=args.singular)
    ind = induced_channel(dil)
    res = {
        "d_in": dil.d_in,
        "d_env": dil.d_env,
        "symplectic_residual": dil.residual(),
        "y_residual": float(np.abs(ind.y - ch.y).max()),
        "x_exact": bool(np.array_equal(ind.x, ch.x)),
        "singular": args.singular,
    }
    return EXIT_OK, [channel_to_dict(ch)], res, dil


def _cmd_verify(args, cfg):
    ch = load_channel(args.channel, cfg)
    raw = read_json(args.dilation)
    dil = load_dilation(args.dilation)
    n = args.samples or 20
    dev = verify_dilation(dil, ch, n, args.seed, cfg)
    ok = dev <= args.tol
    res = {"max_deviation": dev, "n_states": n, "passed": ok, "symplectic_residual": dil.residual()}
    return (EXIT_OK if ok else EXIT_NO), [channel_to_dict(ch), raw], res, None


def _cmd_interferometer(args, cfg):
    ch = load_channel(args.channel, cfg)
    dec = decide(ch, restarts=args.restarts, iters=args.iters, seed=args.seed, cfg=cfg)
    res = {
        "status": dec.status.value,
        "reason": dec.reason,
        "failed": list(dec.failed),
        "symmetry_residual": dec.symmetry_residual if np.isfinite(dec.symmetry_residual) else None,
    }
    if dec.status is Status.YES:
        res["q"] = dec.q.tolist()
        res["l_inv"] = dec.l_inv.tolist()
    code = {Status.YES: EXIT_OK, Status.NO: EXIT_NO, Status.UNDECIDED: EXIT_UNDECIDED}[dec.status]
    return code, [channel_to_dict(ch)], res, None


def _cmd_compose(args, cfg):
    a, b = load_channel(args.first, cfg), load_channel(args.second, cfg)
    ab = compose(a, b)
    res = {"channel": channel_to_dict(ab), "valid": validity(ab, cfg).valid}
    return EXIT_OK, [channel_to_dict(a), channel_to_dict(b)], res, ab


def _cmd_modes(args, cfg):
    ch = load_channel(args.channel, cfg)
    res = {"env_mode_bound": env_mode_bound(ch, cfg), "note": "upper bound only"}
    return EXIT_OK, [channel_to_dict(ch)], res, None


def _require_d(args):
    if args.d < 1:
        raise UsageError("--d must be at least 1")


def _cmd_counterexample(args, cfg):
    _require_d(args)
    ch, rep = fd_counterexample(args.d)
    res = {
        "d": rep.d,
        "min_eig": rep.min_eig,
        "fd0_member": rep.fd0_member,
        "fd_sufficient": rep.fd_sufficient,
        "channel": channel_to_dict(ch),
    }
    return EXIT_OK, [args.d], res, ch


def _cmd_transpose_map(args, cfg):
    _require_d(args)
    ch = transpose_map_params(args.d)
    rep = validity(ch, cfg)
    res = {"valid": rep.valid, "min_eig_minus": rep.min_eig_minus, "channel": channel_to_dict(ch)}
    return EXIT_OK, [args.d], res, ch


def _cmd_selftest(args, cfg):
    n = args.samples or 10
    res = run_selftest(args.seed, n, cfg)
    ok = all(r["passed"] for r in res.values())
    return (EXIT_OK if ok else EXIT_NO), [args.seed, n], res, None


_COMMANDS = {
    "check": _cmd_check,
    "evolve": _cmd_evolve,
    "dilate": _cmd_dilate,
    "verify": _cmd_verify,
    "interferometer": _cmd_interferometer,
    "compose": _cmd_compose,
    "modes": _cmd_modes,
    "counterexample": _cmd_counterexample,
    "transpose-map": _cmd_transpose_map,
    "selftest": _cmd_selftest,
}


def _summary(report, code):
    lines = [f"{report['command']}: exit {code}"]
    for k, v in report["results"].items():
        if isinstance(v, (bool, int, float, str)) or v is None:
            lines.append(f"  {k}: {v}")
        elif isinstance(v, dict) and "passed" in v:
            lines.append(f"  {k}: {'PASS' if v['passed'] else 'FAIL'} (max_error={v['max_error']:.3e})")
    return "\n".join(lines)


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI on ``argv`` and return the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = ToleranceConfig(eig_tol=args.eig_tol, residual_tol=args.tol, reg_eps=args.eps)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"gaussian-channels: error: {exc}", file=stderr)
        return EXIT_USAGE
    try:
        code, inputs, results, product = _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"gaussian-channels: error: {exc}", file=stderr)
        return EXIT_USAGE
    except MalformedInput as exc:
        print(f"gaussian-channels: malformed input: {exc}", file=stderr)
        return EXIT_DATA
    except InvalidChannel as exc:
        print(f"gaussian-channels: invalid channel: {exc}", file=stderr)
        return EXIT_NO
    except GaussianChannelError as exc:
        print(f"gaussian-channels: internal error: {exc}", file=stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort exit code contract
        print(f"gaussian-channels: internal error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INTERNAL
    report = _report(args, argv, inputs, results)
    if args.out:
        if product is not None:
            store(product, args.out)
        else:
            write_json(report, args.out)
    if args.json:
        print(dumps(report, indent=1), file=stdout)
    else:
        print(_summary(report, code), file=stdout)
    return code


def main():
    sys.exit(run())
