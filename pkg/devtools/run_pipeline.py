#!/usr/bin/env python3

# Run the whole pipeline on a synthetic cohort and print what each stage did
#
# Usage: devtools/run_pipeline.py [section.key=value ...]
# Example: devtools/run_pipeline.py synth.n=120 synth.patients=30 training.max_epochs=50

import asyncio
import json
import os
import sys
import time

import logging

import eegnorm

logging.basicConfig(
    level=logging.DEBUG,
    format='%(asctime)s %(name)s %(message)s',
    datefmt='%H:%M:%S',
)
_log = logging.getLogger(__name__)


async def run(config):
    print(':::::: Output directory:', config.output.dir)
    for cls in eegnorm.stages():
        stage = cls(config)
        start = time.monotonic()
        try:
            summary = await stage.run()
        except eegnorm.Error as e:
            print(':::::: FAILED:', json.dumps(e.as_record(), default=str))
            return 1
        print(f':::::: {stage.label} took {time.monotonic() - start:.1f} seconds')
        subjects = summary.get('subjects')
        if subjects:
            print('>>>>>>', subjects)
        for excluded in summary.get('excluded', ()):
            print('>>>>>> Excluded:', excluded['subject_id'], excluded['reason'])

    cohort_path = os.path.join(config.output.dir, 'report', 'cohort.json')
    with open(cohort_path) as f:
        cohort = json.load(f)
    for group, info in cohort['groups'].items():
        print(f':::::: {group}: n={info["n"]} mean MFCS deviation={info["mfcs_mean"]:.4f}')
    for test in cohort['tests']:
        print(f':::::: {test["group_a"]} vs {test["group_b"]}: p={test["pvalue"]:.3g}')
    return 0


def parse_args(args):
    overrides = []
    for arg in args:
        if '=' not in arg:
            raise ValueError(f'{arg}: Argument syntax is "section.key=value", e.g. "synth.n=100"')
        overrides.append(arg)
    return overrides


overrides = [
    'dataset.manifest="devtools/run/dataset/manifest.json"',
    'output.dir="devtools/run/out"',
    'synth.patients=50',
    *parse_args(sys.argv[1:]),
]
config = eegnorm.load_config(overrides=overrides)
sys.exit(asyncio.run(run(config)))
