"""
Command line interface
"""

import argparse
import asyncio
import json
import sys

from . import __project_name__, __version__, _config, _errors, _stages

import logging  # isort:skip
_log = logging.getLogger(__name__)


def _common_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('-c', '--config', metavar='FILE', help='TOML configuration file')
    parser.add_argument(
        '-s', '--set', metavar='SECTION.KEY=VALUE', action='append', default=[], dest='overrides',
        help='Override configuration value (may be given multiple times)',
    )
    parser.add_argument(
        '-o', '--output', metavar='DIR',
        help=f'Output directory (default: ${_config.OUTPUT_DIR_ENV} or output.dir)',
    )
    parser.add_argument('-j', '--jobs', type=int, metavar='N', help='Number of parallel workers')
    parser.add_argument('--seed', type=int, metavar='N', help='Seed for Louvain, training and synthesis')
    parser.add_argument('--timeout', type=float, metavar='SECONDS', help='Timeout per stage')
    parser.add_argument('-v', '--verbose', action='store_true', help='Log debugging messages')
    return parser


def make_parser():
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog=__project_name__,
        description='Normative EEG brain networks from cross-spectral cohorts',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)

    for cls in _stages.stages():
        sub = commands.add_parser(cls.name, parents=[common], help=cls.label)
        if cls is _stages.TrainStage:
            sub.add_argument(
                '--sweep', action='store_true', default=None,
                help='Also cross-validate architecture variants',
            )
        elif cls is _stages.GenerateNormStage:
            sub.add_argument(
                '--age', type=float, action='append', default=[], dest='ages', metavar='YEARS',
                help='Age of the normative network (may be given multiple times)',
            )
            sub.add_argument('--band', help='Band the model was trained on')
            sub.add_argument('--lifespan', action='store_true', help='Generate networks for lifespan ages')

    run = commands.add_parser('run', parents=[common], help='Run several stages in order')
    run.add_argument(
        'stages', nargs='*', metavar='STAGE',
        help='Stages to run (default: every stage except synth)',
    )
    return parser


def _overrides(args):
    overrides = list(args.overrides)
    if args.jobs is not None:
        overrides.append(f'run.jobs={args.jobs}')
    if args.timeout is not None:
        overrides.append(f'run.timeout={args.timeout}')
    if args.seed is not None:
        overrides.extend(f'{key}={args.seed}' for key in ('louvain.seed', 'training.seed', 'synth.seed'))
    return overrides


def _stage_kwargs(name, args):
    if name == 'train':
        return {'sweep': getattr(args, 'sweep', None)}
    elif name == 'generate-norm':
        return {
            'ages': getattr(args, 'ages', ()),
            'band': getattr(args, 'band', None),
            'lifespan': getattr(args, 'lifespan', False),
        }
    return {}


async def run_stages(config, names, args=None):
    """
    Run stages one after another

    :return: Mapping of stage name to summary
    """
    summaries = {}
    for name in names:
        kwargs = _stage_kwargs(name, args) if args is not None else {}
        summaries[name] = await _stages.stage(name, config, **kwargs).run()
    return summaries


def main(argv=None):
    """
    Entry point of the ``eegnorm`` command

    :return: Exit code
    """
    args = make_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s %(name)s %(message)s',
        datefmt='%H:%M:%S',
    )

    if args.command == 'run':
        names = args.stages or [n for n in _stages.PIPELINE if n != 'synth']
    else:
        names = [args.command]

    try:
        config = _config.load_config(args.config, overrides=_overrides(args))
        if args.output:
            config.output.dir = args.output
        summaries = asyncio.run(run_stages(config, names, args))

    except _errors.Error as e:
        _log.debug('%s failed', args.command, exc_info=True)
        sys.stderr.write(json.dumps(e.as_record(), sort_keys=True, default=str) + '\n')
        return 1

    except Exception as e:
        _log.debug('%s crashed', args.command, exc_info=True)
        record = {'error': type(e).__name__, 'message': str(e)}
        sys.stderr.write(json.dumps(record, sort_keys=True) + '\n')
        return 1

    sys.stdout.write(json.dumps(summaries, sort_keys=True, indent=2, default=str) + '\n')
    return 0
