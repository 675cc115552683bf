"""Command-line front end: ``drshadow <command> [flags]``.

Every command prints its DataFrame as line-delimited JSON records on stdout.
Exit status is 0 on success, 1 when a verdict fails and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import pandas as pd

from .drshadow_api import DRShadow
from .src.datastruct import Perturbation, Suite, SystemName

VERDICT_COLUMNS = {'verify': 'verdict', 'shadow': 'ok', 'lift': 'ok', 'limits': 'certified'}


def _common(parser: argparse.ArgumentParser, *flags: str) -> None:
    if 'space' in flags:
        parser.add_argument('--space', default='cantor', help='nat, cantor or cantor-minus:<point>')
    if 'sys' in flags:
        parser.add_argument('--sys', default='vls', choices=[s.value for s in SystemName])
    if 'seed' in flags:
        parser.add_argument('--seed', type=int, default=None)
    if 'orbit' in flags:
        parser.add_argument('--len', dest='length', type=int, default=5)
        parser.add_argument('--delta-level', type=int, default=3)
        parser.add_argument('--policy', default=Perturbation.FLIP.value, choices=[p.value for p in Perturbation])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='drshadow', description='Exact W₀ words, inverse limits and shadowing.')
    parser.add_argument('--config', default=None, help='path to a config.json')
    parser.add_argument('--log-level', default=None)
    commands = parser.add_subparsers(dest='command', required=True)

    dist = commands.add_parser('dist', help='distance between two points or two words')
    _common(dist, 'space')
    dist.add_argument('--x', required=True)
    dist.add_argument('--y', required=True)
    dist.add_argument('--bound', type=int, default=None)

    member = commands.add_parser('member', help='membership in a clopen set or cylinder')
    _common(member, 'space')
    member.add_argument('--set', dest='clopen', required=True)
    member.add_argument('--x', required=True)

    basis = commands.add_parser('basis', help='enumerated basis set and tuple')
    _common(basis, 'space')
    basis.add_argument('--index', type=int, required=True)
    basis.add_argument('--x', default=None, help='word whose alpha bits are printed')
    basis.add_argument('--bound', type=int, default=None)

    orbit = commands.add_parser('orbit', help='forward orbit under f')
    _common(orbit, 'sys')
    orbit.add_argument('--x', required=True)
    orbit.add_argument('--steps', type=int, default=8)

    pseudo = commands.add_parser('pseudo', help='seeded pseudo-orbit')
    _common(pseudo, 'sys', 'seed', 'orbit')

    shadow = commands.add_parser('shadow', help='pseudo-orbit and its exact shadow orbit')
    _common(shadow, 'sys', 'seed', 'orbit')

    lift = commands.add_parser('lift', help='pseudo-orbit lifted to the inverse limit')
    _common(lift, 'sys', 'seed', 'orbit')
    lift.add_argument('--level', type=int, required=True, help='number l of tuples that must agree')
    lift.add_argument('--depth', type=int, default=None)
    lift.add_argument('--skip-step', type=int, default=None)

    limits = commands.add_parser('limits', help='limit words with convergence certificates')
    _common(limits, 'sys')
    limits.add_argument('--depth', type=int, default=None)
    limits.add_argument('--horizon', type=int, default=None)

    verify = commands.add_parser('verify', help='run an invariant suite')
    _common(verify, 'space', 'seed')
    verify.add_argument('--sys', default='vls', choices=[s.value for s in SystemName])
    verify.add_argument('--suite', required=True, choices=[s.value for s in Suite])
    verify.add_argument('--samples', type=int, default=None)
    return parser


def dispatch(api: DRShadow, args: argparse.Namespace) -> pd.DataFrame | None:
    match args.command:
        case 'dist':
            return api.get_distance(args.space, args.x, args.y, args.bound)
        case 'member':
            return api.get_membership(args.space, args.clopen, args.x)
        case 'basis':
            return api.get_basis(args.space, args.index, args.x, args.bound)
        case 'orbit':
            return api.get_orbit(args.sys, args.x, args.steps)
        case 'pseudo':
            return api.get_pseudo_orbit(args.sys, args.length, args.delta_level, args.policy, args.seed)
        case 'shadow':
            return api.get_shadow(args.sys, args.length, args.delta_level, args.policy, args.seed)
        case 'lift':
            return api.get_lift(args.sys, args.length, args.delta_level, args.level, args.depth, args.skip_step,
                                args.policy, args.seed)
        case 'limits':
            return api.get_limits(args.sys, args.depth, args.horizon)
        case 'verify':
            return api.verify(args.suite, args.space, args.sys, args.samples, args.seed)


def failed(command: str, report: pd.DataFrame) -> bool:
    column = VERDICT_COLUMNS.get(command)
    if column is None or column not in report:
        return False
    if column == 'verdict':
        return bool((report[column] != 'pass').any())
    return not bool(report[column].astype(bool).all())


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        api = DRShadow(args.config)
    except (OSError, ValueError) as e:
        print(f'drshadow: cannot read config {args.config}: {e}', file=sys.stderr)
        return 2
    logging.basicConfig(level=(args.log_level or api.log_level).upper(), stream=sys.stderr,
                        format='%(levelname)s %(message)s')
    report = dispatch(api, args)
    if report is None:
        return 2
    text = report.to_json(orient='records', lines=True, force_ascii=False)
    sys.stdout.write(text if text.endswith('\n') else text + '\n')
    return 1 if failed(args.command, report) else 0


if __name__ == '__main__':
    sys.exit(main())
