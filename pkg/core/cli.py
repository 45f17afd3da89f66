#
# core/cli.py
#
# command-line front end. exit codes: 0 pass, 1 verification failure,
# 2 input error (bad flags, config or model file).
#

import argparse
import sys

from dataclasses import dataclass
from typing import (
    IO,
    List,
    Optional,
    Tuple
)

import core
import offdiag.exceptions

from offdiag.schedule import DepthRange, EpsilonSchedule, Grid


COMMANDS = ('classify', 'eigs', 'verify', 'scan')

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2



class ArgumentError(Exception):
    """ Raised in place of argparse's own exit. """


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise ArgumentError(message)



@dataclass(frozen=True)
class RunConfig:
    """ One command invocation; flags left unset fall back to config.yaml. """
    model: str
    command: str
    lambdas: Tuple[float, ...] = ()
    grid: Optional[Grid] = None
    eps: Optional[EpsilonSchedule] = None
    tol: Optional[float] = None
    depths: Optional[DepthRange] = None
    format: str = 'json'
    seed: int = 0
    config: Optional[str] = None
    interval: Optional[Tuple[float, float]] = None
    fault: float = 0.0
    workers: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise offdiag.exceptions.InvalidConfigValue("cmd", f"expected one of {', '.join(COMMANDS)}, got '{self.command}'")
        if self.tol is not None and not self.tol > 0:
            raise offdiag.exceptions.InvalidConfigValue("tol", f"must be positive, got {self.tol}")
        if self.workers is not None and self.workers < 1:
            raise offdiag.exceptions.InvalidConfigValue("workers", f"must be >= 1, got {self.workers}")
        if self.interval is not None and not self.interval[0] <= self.interval[1]:
            raise offdiag.exceptions.InvalidConfigValue("interval", f"need l <= r, got {self.interval[0]}:{self.interval[1]}")


def parse_interval(text: str) -> Tuple[float, float]:
    try:
        l, r = (float(part) for part in text.split(':'))
    except ValueError:
        raise offdiag.exceptions.InvalidConfigValue("interval", f"expected l:r, got '{text}'")
    return l, r


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog='offdiag',
        description="Spectral classification and Riccati checks for rank-one off-diagonal perturbations. "
                    "Negative ranges must be attached with '=', e.g. --grid=-2:2:41.")
    p.add_argument("--model", required=True, help="Model file (YAML or JSON).")
    p.add_argument("--cmd", required=True, choices=COMMANDS, dest="command", help="Command to run.")
    p.add_argument("--lambda", type=float, action="append", default=[], dest="lambdas",
                   help="Spectral parameter; may be repeated.")
    p.add_argument("--grid", type=str, default=None, help="Lambda grid start:stop:count.")
    p.add_argument("--eps", type=str, default=None, help="Epsilon ladder exponents k0:k1 (eps = W 2^-k).")
    p.add_argument("--tol", type=float, default=None,
                   help="Classification tolerance (classify/scan) or residual tolerance (verify).")
    p.add_argument("--depths", type=str, default=None, help="Refinement depths d0..d1 (verify).")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="Output format (default: json).")
    p.add_argument("--seed", type=int, default=0, help="Seed for randomized test vectors (default: 0).")
    p.add_argument("--config", type=str, default=None, help="Configuration file (default: built-in values).")
    p.add_argument("--interval", type=str, default=None, help="Eigenvalue search interval l:r (eigs/verify).")
    p.add_argument("--inject-fault", type=float, default=0.0, dest="fault",
                   help="Perturb X_lambda by this multiple of V* before verifying (control run).")
    p.add_argument("--workers", type=int, default=None, help="Threads for grid commands.")
    return p


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        model=args.model,
        command=args.command,
        lambdas=tuple(args.lambdas),
        grid=Grid.parse(args.grid) if args.grid is not None else None,
        eps=EpsilonSchedule.parse(args.eps) if args.eps is not None else None,
        tol=args.tol,
        depths=DepthRange.parse(args.depths) if args.depths is not None else None,
        format=args.format,
        seed=args.seed,
        config=args.config,
        interval=parse_interval(args.interval) if args.interval is not None else None,
        fault=args.fault,
        workers=args.workers,
    )



def main(argv: Optional[List[str]] = None, out: Optional[IO[str]] = None) -> int:
    if out is None: out = sys.stdout
    try:
        cfg = parse_args(argv)
    except (ArgumentError, offdiag.exceptions.ConfigError) as e:
        print(f"offdiag: error: {e}", file=sys.stderr)
        return EXIT_INPUT

    try:
        runner = core.Core(config_path=cfg.config)
    except offdiag.exceptions.ConfigError as e:
        print(f"offdiag: config error: {e}", file=sys.stderr)
        return EXIT_INPUT

    try:
        return runner.run(cfg, out)
    except offdiag.exceptions.ModelFileError as e:
        print(f"offdiag: model error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (offdiag.exceptions.ModelError, offdiag.exceptions.ConfigError) as e:
        print(f"offdiag: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        runner.stop()
