"""Command-line interface: ``pencilrank <subcommand> ...``.

Every randomized subcommand takes ``--seed`` (default 0) and echoes it in
its output document, so a fixed command line always prints the same bytes.

Exit codes: 0 success, 2 usage, 3 unreadable or malformed input,
4 dimension mismatch, 5 perturbation failed, 6 inconclusive verdict,
7 singular input, 8 eigenvalue iteration did not converge.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from .approximation import build_leap_family, leap_report, rank_n_approximate
from .exceptions import (
    AllSliceCombinationsSingular,
    DimensionError,
    FormatError,
    NoConvergence,
    PerturbationFailed,
    Singular,
)
from .group_action import GLTriple, act
from .oracle import als_fit
from .rank import Verdict, bi_rank_check

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DIMENSION = 4
EXIT_PERTURBATION = 5
EXIT_INCONCLUSIVE = 6
EXIT_SINGULAR = 7
EXIT_NO_CONVERGENCE = 8

SAMPLES = ("example", "w", "random")


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def sample_tensor(name: str, seed: int = 0, dims=(2, 2, 2)) -> np.ndarray:
    """Named sample tensors: the 2x2x2 pencil of rank 2, the W tensor, or a random one."""
    if name == "example":
        return np.stack([[[1, 0], [0, -1]], [[0, -1], [-1, 0]]], axis=2).astype(complex)
    if name == "w":
        return np.stack([np.eye(2), [[0, 1], [0, 0]]], axis=2).astype(complex)
    if name == "random":
        rng = np.random.default_rng(seed)
        return rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
    raise ValueError(f"unknown sample {name!r}; choose from {', '.join(SAMPLES)}")


def _read_tensor(path: str) -> np.ndarray:
    try:
        return io.read_tensor(path)
    except OSError as exc:
        raise CLIError(EXIT_PARSE, f"{path}: cannot read tensor file: {exc.strerror}") from exc


def _read_matrix(path: str, flag: str) -> np.ndarray:
    try:
        return io.read_matrix(path)
    except OSError as exc:
        raise CLIError(EXIT_PARSE, f"{path} ({flag}): cannot read matrix file: {exc.strerror}") from exc
    except FormatError as exc:
        raise CLIError(EXIT_PARSE, f"{flag}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _k_list(text: str) -> list:
    values = []
    for part in text.split(","):
        part = part.strip()
        try:
            k = int(part)
        except ValueError:
            k = float(part)
            if k.is_integer():
                k = int(k)
        if k <= 0:
            raise argparse.ArgumentTypeError(f"k must be positive, got {part!r}")
        values.append(k)
    return values


def _dims(text: str) -> tuple[int, int, int]:
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 3 or min(parts) < 1:
        raise argparse.ArgumentTypeError(f"dims must be three positive integers, got {text!r}")
    return tuple(parts)


def cmd_rank(args) -> int:
    A = _read_tensor(args.tensor)
    try:
        cert = bi_rank_check(
            A,
            gap_tol=args.gap_tol,
            rank_tol=args.rank_tol,
            sim_tol=args.sim_tol,
            comm_tol=args.comm_tol,
            seed=args.seed,
        )
        doc = cert.to_doc()
        code = EXIT_INCONCLUSIVE if cert.verdict is Verdict.INCONCLUSIVE else EXIT_OK
    except AllSliceCombinationsSingular as exc:
        doc = {
            "verdict": Verdict.INCONCLUSIVE.value,
            "m": A.shape[0],
            "seed": args.seed,
            "justification": f"no invertible slice combination: {exc}",
        }
        code = EXIT_INCONCLUSIVE
    doc["input"] = args.tensor
    _emit(io.dumps(doc), args.output)
    return code


def cmd_approx(args) -> int:
    A = _read_tensor(args.tensor)
    result = rank_n_approximate(A, args.eps, seed=args.seed, max_attempts=args.max_attempts)
    if args.tensor_out:
        io.write_tensor(result.B, args.tensor_out)
    doc = {
        "input": args.tensor,
        "eps": args.eps,
        "seed": args.seed,
        "deviation_l1": result.deviation,
        "attempts": result.outcome.attempts,
        "tensor": io.tensor_to_doc(result.B),
        "certificate": result.certificate.to_doc(),
    }
    _emit(io.dumps(doc), args.output)
    return EXIT_OK


def cmd_leap(args) -> int:
    family = build_leap_family(args.n, eigenvalue_seed=args.seed)
    doc = leap_report(family, args.k, seed=args.seed)
    doc["seed"] = args.seed
    _emit(io.dumps(doc), args.output)
    return EXIT_OK


def cmd_act(args) -> int:
    A = _read_tensor(args.tensor)
    L = _read_matrix(args.l, "--l")
    M = _read_matrix(args.m, "--m")
    N = _read_matrix(args.n, "--n")
    g = GLTriple(L, M, N)
    _emit(io.dumps_tensor(act(g, A)), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    A = _read_tensor(args.tensor)
    report = als_fit(
        A, args.r, restarts=args.restarts, max_iters=args.max_iters, seed=args.seed
    )
    doc = report.to_doc()
    doc["input"] = args.tensor
    _emit(io.dumps(doc), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    A = sample_tensor(args.name, args.seed, args.dims)
    _emit(io.dumps_tensor(A), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pencilrank",
        description="Tensor rank certificates, rank-n approximation and rank-leap demonstrations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("-o", "--output", help="write the output document here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    p = sub.add_parser("rank", help="certify rank == m for an m x m x n tensor")
    p.add_argument("tensor")
    p.add_argument("--gap-tol", type=float, default=None, help="relative eigenvalue gap threshold")
    p.add_argument("--rank-tol", type=float, default=None, help="relative singular value threshold")
    p.add_argument("--sim-tol", type=float, default=1e-6)
    p.add_argument("--comm-tol", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("approx", help="certified rank-n tensor within eps of an n x n x 2 tensor")
    p.add_argument("tensor")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--max-attempts", type=int, default=256)
    p.add_argument("--tensor-out", help="also write the approximating tensor as a tensor file")
    common(p)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("leap", help="rank-leap family report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=_k_list, required=True, help="comma separated k values")
    common(p)
    p.set_defaults(func=cmd_leap)

    p = sub.add_parser("act", help="apply (L, M, N) to a tensor")
    p.add_argument("tensor")
    p.add_argument("--l", required=True, help="matrix file for mode 1")
    p.add_argument("--m", required=True, help="matrix file for mode 2")
    p.add_argument("--n", required=True, help="matrix file for mode 3")
    common(p, seed=False)
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("oracle", help="ALS evidence for rank <= r")
    p.add_argument("tensor")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=2000)
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="emit a sample tensor file")
    p.add_argument("name", choices=SAMPLES)
    p.add_argument("--dims", type=_dims, default=(2, 2, 2), help="l,m,n for 'random'")
    common(p)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        message, code = str(exc), exc.code
    except FormatError as exc:
        message, code = str(exc), EXIT_PARSE
    except DimensionError as exc:
        message, code = f"dimension error: {exc}", EXIT_DIMENSION
    except PerturbationFailed as exc:
        message, code = f"perturbation failed: {exc}", EXIT_PERTURBATION
    except Singular as exc:
        message, code = f"singular input: {exc}", EXIT_SINGULAR
    except NoConvergence as exc:
        message, code = f"no convergence: {exc}", EXIT_NO_CONVERGENCE
    except ValueError as exc:
        message, code = str(exc), EXIT_PARSE
    print(f"pencilrank {args.command}: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
