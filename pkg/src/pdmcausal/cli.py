"""Command-line interface.

Subcommands
-----------
``sweep-theta``     partial-swap strength sweep at fixed polarization
``sweep-lambda``    polarization sweep at fixed partial-swap strength
``sweep-decohere``  polarization sweep through the fully decohering channel
``infer``           classify a PDM or correlator-table JSON file
``pdm``             build a PDM from a named channel and state, write JSON

Sweep outputs are CSV (default) or JSON; for fixed flags (and seed, when
sampling) the written bytes are identical across runs. When ``--out`` is a
relative path and ``PDMCAUSAL_OUTDIR`` is set, files land in that
directory.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .channels import (
    ChannelCJ,
    DensityMatrix,
    UnitaryGate,
    basis_state,
    cj_from_unitary,
    density_matrix,
    fully_decohering_cj,
    maximally_mixed,
    mediated_partial_swap_cj,
    plus_state,
    polarized_plus_state,
)
from .extraction import ExtractionError
from .inference import SweepSpec, infer_from_pdm, run_sweep
from .pdm import pdm_closed_form, pdm_from_correlators
from .serialize import (
    channel_from_jsonable,
    dumps_json,
    matrix_from_jsonable,
    parse_angle,
    parse_grid,
    pdm_from_jsonable,
    pdm_to_jsonable,
    records_to_csv,
    records_to_jsonable,
    table_from_jsonable,
)
from .tensor import qubit_layout


def named_channel(text: str) -> ChannelCJ:
    """Resolve a channel spec: identity | decohering | partial-swap:<angle> | file:<path>."""
    if text == "identity":
        return cj_from_unitary(UnitaryGate(np.eye(2, dtype=complex), qubit_layout(1)))
    if text == "decohering":
        return fully_decohering_cj()
    if text.startswith("partial-swap:"):
        return mediated_partial_swap_cj(parse_angle(text.split(":", 1)[1]))
    if text.startswith("file:"):
        with open(text.split(":", 1)[1], encoding="utf-8") as fh:
            return channel_from_jsonable(json.load(fh))
    raise ValueError(
        f"unknown channel {text!r}; use identity, decohering, partial-swap:<angle>, or file:<path>"
    )


def named_state(text: str) -> DensityMatrix:
    """Resolve a state spec: maximally-mixed | zero | plus | polarized:<lam> | file:<path>."""
    if text == "maximally-mixed":
        return maximally_mixed(1)
    if text == "zero":
        return basis_state("0")
    if text == "plus":
        return plus_state()
    if text.startswith("polarized:"):
        return polarized_plus_state(float(text.split(":", 1)[1]))
    if text.startswith("file:"):
        with open(text.split(":", 1)[1], encoding="utf-8") as fh:
            return density_matrix(matrix_from_jsonable(json.load(fh)))
    raise ValueError(
        f"unknown state {text!r}; use maximally-mixed, zero, plus, polarized:<lam>, or file:<path>"
    )


def _resolve_out(out: str) -> Path:
    path = Path(out)
    outdir = os.environ.get("PDMCAUSAL_OUTDIR")
    if outdir and not path.is_absolute():
        path = Path(outdir) / path
    return path


def _emit(text: str, out: str):
    if out is None:
        sys.stdout.write(text)
        return
    path = _resolve_out(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _add_sweep_options(sub):
    sub.add_argument("--grid", help="start:stop:count (pi expressions allowed) or comma list")
    sub.add_argument("--shots", type=int, help="sample each correlator with this many shots")
    sub.add_argument("--seed", type=int, help="base RNG seed for shot sampling")
    sub.add_argument("--epsilon", type=float, help="classification threshold (default 1e-6, or 3/sqrt(shots))")
    sub.add_argument("--via", choices=("closed-form", "scattering"), default="closed-form",
                     help="PDM construction route (default closed-form)")
    sub.add_argument("--out", help="output file (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def _run_sweep_cmd(args, family: str, fixed: dict, default_grid: str) -> int:
    spec = SweepSpec(
        family=family,
        grid=parse_grid(args.grid if args.grid else default_grid),
        fixed=fixed,
        shots=args.shots,
        seed=args.seed,
        epsilon=args.epsilon,
        via_scattering=args.via == "scattering",
    )
    records = run_sweep(spec)
    if args.format == "csv":
        _emit(records_to_csv(records), args.out)
    else:
        _emit(dumps_json(records_to_jsonable(records)), args.out)
    return 0


def _cmd_sweep_theta(args) -> int:
    return _run_sweep_cmd(args, "theta_sweep", {"lambda": args.lam}, "0:pi:17")


def _cmd_sweep_lambda(args) -> int:
    return _run_sweep_cmd(args, "lambda_sweep", {"theta": parse_angle(args.theta)}, "0:1:11")


def _cmd_sweep_decohere(args) -> int:
    return _run_sweep_cmd(args, "decohere_sweep", {}, "0:1:5")


def _cmd_infer(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, list):
        r = pdm_from_correlators(table_from_jsonable(doc))
    elif isinstance(doc, dict) and "re" in doc:
        r = pdm_from_jsonable(doc)
    else:
        raise ValueError("input must be a PDM object or a correlator-table array")
    epsilon = args.epsilon if args.epsilon is not None else 1e-6
    verdict = infer_from_pdm(r, epsilon)
    lines = [
        verdict.kind,
        f"f_pdm = {verdict.f_pdm!r}",
        f"f_forward = {verdict.f_forward!r}",
        f"f_reverse = {verdict.f_reverse!r}",
        f"epsilon = {verdict.epsilon!r}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_pdm(args) -> int:
    channel = named_channel(args.channel)
    state = named_state(args.state)
    r = pdm_closed_form(state, channel)
    _emit(dumps_json(pdm_to_jsonable(r)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdmcausal",
        description="Two-time PDM causal inference: sweeps, extraction, classification.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sweep_theta = subs.add_parser("sweep-theta", help="sweep the partial-swap strength")
    sweep_theta.add_argument("--lambda", dest="lam", type=float, default=0.7,
                             help="input polarization (default 0.7)")
    _add_sweep_options(sweep_theta)
    sweep_theta.set_defaults(func=_cmd_sweep_theta)

    sweep_lambda = subs.add_parser("sweep-lambda", help="sweep the input polarization")
    sweep_lambda.add_argument("--theta", default="3pi/8",
                              help="partial-swap strength (default 3pi/8)")
    _add_sweep_options(sweep_lambda)
    sweep_lambda.set_defaults(func=_cmd_sweep_lambda)

    sweep_dec = subs.add_parser("sweep-decohere",
                                help="sweep the polarization through the decohering channel")
    _add_sweep_options(sweep_dec)
    sweep_dec.set_defaults(func=_cmd_sweep_decohere)

    infer = subs.add_parser("infer", help="classify a PDM or correlator-table JSON file")
    infer.add_argument("--in", dest="infile", required=True, help="input JSON file")
    infer.add_argument("--epsilon", type=float, help="classification threshold (default 1e-6)")
    infer.add_argument("--out", help="output file (default: stdout)")
    infer.set_defaults(func=_cmd_infer)

    build = subs.add_parser("pdm", help="build a PDM from a channel and a state")
    build.add_argument("--channel", default="identity",
                       help="identity | decohering | partial-swap:<angle> | file:<path>")
    build.add_argument("--state", default="maximally-mixed",
                       help="maximally-mixed | zero | plus | polarized:<lam> | file:<path>")
    build.add_argument("--out", help="output file (default: stdout)")
    build.set_defaults(func=_cmd_pdm)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ExtractionError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
