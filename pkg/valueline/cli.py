#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Command-line interface.

The program ``valueline`` groups a number of commands::

    valueline --seed 42 --out pool.csv generate --n-per-class 100
    valueline --seed 42 --out values.json value pool.csv --method shapley
    valueline --seed 42 --out curve.csv select pool.csv values.json
    valueline --config presets/optimality_gap.yaml --out results experiment
    valueline --out gaps.json report results

Commands reading a dataset split it into training, validation and test sets
using ``--train``, ``--valid``, ``--test`` and the seed. Options given on the
command line override the ones read from the files passed with
``--config``.

The exit code is 0 on success, 2 if the input or the configuration is
invalid, 3 if a resource cap or budget is exceeded, and 4 if a numerical
problem occurred.'''

import logging as log
import math
import os
import sys
from typing import Any, List, Optional

import click
import numpy as np

import valueline.fileio as fio
import valueline.harness as hn
from valueline.bipartite import greedy_select, learn_graph
from valueline.core import Dataset, memoize, rank_by_value, selection_curve
from valueline.datasets import generate_gmm, message_passing, split_dataset
from valueline.dp import solve_dp
from valueline.errors import (InvalidInputError, NumericalError, ResourceCapError,
                              UtilityEvaluationError)
from valueline.paramfile import load_config_files
from valueline.utilities import ModelUtility, curvature

EXIT_SUCCESS = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4

LOG_FORMAT = '%(asctime)s %(levelname)s] %(message)s'


class Settings:
    '''Options shared by all the commands.'''

    def __init__(self, config: hn.ExperimentConfig, out: Optional[str], threads: int):
        self.config = config
        self.out = out
        self.threads = threads

    def output(self, default: str) -> str:
        return self.out if self.out else default

    def splits(self, dataset_csv: str, train, valid, test):
        '''Read the pool and split it according to the configuration.'''

        for name, value in (('train_size', train), ('valid_size', valid),
                            ('test_size', test)):
            if value is not None:
                setattr(self.config, name, value)

        pool = fio.read_dataset(dataset_csv)
        # Single commands do not run the configured methods
        self.config.copy(methods=['random']).validate(num_of_rows=len(pool))
        pool = message_passing(pool, self.config.message_passing)
        return split_dataset(pool, self.config.train_size, self.config.valid_size,
                             self.config.test_size, seed=self.config.base_seed)

    def model_utility(self, train: Dataset, other: Dataset):
        return ModelUtility(train, other, config=self.config.trainer)


def split_options(func):
    for option in reversed([
            click.option('--train', type=int, default=None, help='Size of the training set'),
            click.option('--valid', type=int, default=None, help='Size of the validation set'),
            click.option('--test', type=int, default=None, help='Size of the test set')]):
        func = option(func)
    return func


def _nan_to_none(values) -> List[Any]:
    return [None if math.isnan(x) else x for x in values]


@click.group()
@click.option('--seed', type=int, default=None, help='Base seed (overrides the configuration)')
@click.option('--out', default=None, help='Output file or directory')
@click.option('--config', 'config_files', multiple=True,
              help='YAML or JSON configuration file (can be repeated)')
@click.option('--threads', type=int, default=1, help='Number of worker threads')
@click.option('--verbose', is_flag=True, help='Print debugging messages')
@click.pass_context
def cli(ctx, seed, out, config_files, threads, verbose):
    if verbose:
        log.getLogger().setLevel(log.DEBUG)
    if threads < 1:
        raise InvalidInputError('the number of threads must be positive')

    config = hn.ExperimentConfig()
    config.load(load_config_files(config_files))
    if seed is not None:
        config.base_seed = seed

    ctx.obj = Settings(config=config, out=out, threads=threads)


@cli.command()
@click.option('--n-per-class', type=int, default=None)
@click.option('--classes', type=int, default=None)
@click.option('--dims', type=int, default=None)
@click.option('--separation', type=float, default=None)
@click.option('--sigma', type=float, default=None)
@click.option('--message-passing', 'proportion', type=float, default=None,
              help='Move points towards their class mean by this proportion')
@click.pass_obj
def generate(settings: Settings, n_per_class, classes, dims, separation, sigma, proportion):
    'Sample a dataset from a mixture of Gaussians and save it as CSV.'

    config = settings.config
    for name, value in (('n_per_class', n_per_class), ('classes', classes),
                        ('dims', dims), ('separation', separation), ('sigma', sigma)):
        if value is not None:
            setattr(config, name, value)

    dataset = generate_gmm(n_per_class=config.n_per_class, classes=config.classes,
                           d=config.dims, separation=config.separation,
                           seed=config.base_seed, sigma=config.sigma)
    if proportion is not None:
        dataset = message_passing(dataset, proportion)
    fio.write_dataset(settings.output('dataset.csv'), dataset)


@cli.command()
@click.argument('dataset_csv')
@click.option('--method', default='shapley', help='Valuation method (e.g., "beta:16,1")')
@split_options
@click.pass_obj
def value(settings: Settings, dataset_csv, method, train, valid, test):
    'Compute the values of the training points and save them as JSON.'

    train_set, valid_set, _ = settings.splits(dataset_csv, train, valid, test)
    values = hn.compute_values(hn.parse_method(method), train_set, valid_set,
                               settings.config, settings.config.base_seed,
                               settings.model_utility, threads=settings.threads)
    fio.write_values(settings.output('values.json'), values)


@cli.command()
@click.argument('dataset_csv')
@split_options
@click.pass_obj
def dp(settings: Settings, dataset_csv, train, valid, test):
    'Find the optimal selection sequence by dynamic programming.'

    train_set, valid_set, _ = settings.splits(dataset_csv, train, valid, test)
    solution = solve_dp(memoize(settings.model_utility(train_set, valid_set)),
                        cap=settings.config.exact_cap, threads=settings.threads)
    fio.write_json(settings.output('dp.json'), solution.to_dict())


@cli.command()
@click.argument('dataset_csv')
@click.argument('values_json')
@split_options
@click.pass_obj
def select(settings: Settings, dataset_csv, values_json, train, valid, test):
    'Rank the training points by value and save the test selection curve.'

    train_set, _, test_set = settings.splits(dataset_csv, train, valid, test)
    values = fio.read_values(values_json)
    if len(values) != len(train_set):
        raise InvalidInputError('{0} values for {1} training points'
                                .format(len(values), len(train_set)))

    curve = selection_curve(rank_by_value(values),
                            memoize(settings.model_utility(train_set, test_set)),
                            threads=settings.threads)
    log.info('objective: %.6f', curve.objective)
    fio.write_curve(settings.output('curve.csv'), curve)


@cli.command()
@click.argument('dataset_csv')
@split_options
@click.pass_obj
def bipartite(settings: Settings, dataset_csv, train, valid, test):
    '''Learn the coverage graph and select points greedily.

    The output directory will contain the graph (graph.json), the threshold
    sweep (sweep.csv), the values (values.json) and the test selection
    curve (curve.csv).'''

    config = settings.config
    train_set, valid_set, test_set = settings.splits(dataset_csv, train, valid, test)
    graph, report = learn_graph(train_set, valid_set,
                                utility=settings.model_utility(train_set, valid_set),
                                num_of_subsets=config.num_of_subsets,
                                num_of_thresholds=config.num_of_thresholds,
                                subset_size=config.subset_size,
                                seed=config.base_seed, threads=settings.threads)
    selection = greedy_select(graph)
    curve = selection_curve(selection.perm,
                            memoize(settings.model_utility(train_set, test_set)),
                            threads=settings.threads)

    out_dir = settings.output('bipartite')
    fio.write_json(os.path.join(out_dir, 'graph.json'), graph.to_dict())
    fio.write_sweep(os.path.join(out_dir, 'sweep.csv'), report.thresholds, report.errors)
    fio.write_values(os.path.join(out_dir, 'values.json'), selection.values)
    fio.write_curve(os.path.join(out_dir, 'curve.csv'), curve)


@cli.command(name='curvature')
@click.argument('dataset_csv')
@click.option('--utility', 'utility_kind', type=click.Choice(['model', 'coverage']),
              default='model', help='Utility whose curvature is measured')
@click.option('--skip-null', is_flag=True, help='Ignore points with zero singleton gain')
@split_options
@click.pass_obj
def curvature_command(settings: Settings, dataset_csv, utility_kind, skip_null,
                      train, valid, test):
    '''Measure the curvature of a utility on the training set.

    With "--utility coverage", the curvature is averaged over random probes
    of the learned coverage graph (see the probe_size and num_of_probes
    configuration keys).'''

    config = settings.config
    train_set, valid_set, _ = settings.splits(dataset_csv, train, valid, test)

    if utility_kind == 'coverage':
        c = hn.probe_curvature(train_set, valid_set, config.base_seed,
                               config.num_of_probes, config.probe_size,
                               utility=settings.model_utility(train_set, valid_set),
                               num_of_subsets=config.num_of_subsets,
                               num_of_thresholds=config.num_of_thresholds,
                               subset_size=config.subset_size,
                               threads=settings.threads)
        result = {'utility': 'coverage', 'c': c}
    else:
        report = curvature(settings.model_utility(train_set, valid_set),
                           skip_null=skip_null)
        result = {'utility': 'model',
                  'c': report.c,
                  'argmin_index': report.argmin_index,
                  'ratios': _nan_to_none(report.ratios.tolist()),
                  'skipped': report.skipped}

    log.info('curvature: %.6f', result['c'])
    fio.write_json(settings.output('curvature.json'), result)


@cli.command()
@click.pass_obj
def sweep(settings: Settings):
    '''Run experiments on progressively smoother datasets.

    The output directory will contain sweep.json, with the curvature and the
    mean objective of each method for each proportion, and one
    subdirectory per proportion with the full results.'''

    report = hn.curvature_sweep(settings.config, threads=settings.threads)
    out_dir = settings.output(settings.config.output_dir)

    fio.write_json(os.path.join(out_dir, 'config.json'), settings.config.to_dict())
    fio.write_json(os.path.join(out_dir, 'sweep.json'), report.to_dict())
    for entry in report.entries:
        hn.write_result(entry.result,
                        os.path.join(out_dir, 'lambda_{0:g}'.format(entry.proportion)))


@cli.command()
@click.pass_obj
def experiment(settings: Settings):
    'Run the experiment described by the configuration.'

    result = hn.run_experiment(settings.config, threads=settings.threads)
    hn.write_result(result, settings.output(settings.config.output_dir),
                    config=settings.config)


@cli.command()
@click.argument('result_dir')
@click.pass_obj
def report(settings: Settings, result_dir):
    'Compute the gaps between each method and dynamic programming.'

    gaps = hn.gap_report(hn.load_result(result_dir))
    fio.write_json(settings.output(os.path.join(result_dir, 'gaps.json')), gaps)


def run(args=None) -> int:
    '''Run the command line interface on `args` and return the exit code.'''

    try:
        exit_code = cli.main(args=args, prog_name='valueline', standalone_mode=False)
    except click.exceptions.Abort:
        log.error('aborted')
        return EXIT_INVALID
    except click.ClickException as exc:
        exc.show()
        return EXIT_INVALID
    except InvalidInputError as exc:
        log.error('invalid input: %s', exc)
        return EXIT_INVALID
    except ResourceCapError as exc:
        log.error('resource limit exceeded: %s', exc)
        return EXIT_RESOURCE
    except (NumericalError, UtilityEvaluationError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        log.error('numerical failure: %s', exc)
        return EXIT_NUMERICAL
    except (OSError, ValueError, KeyError) as exc:
        log.error('invalid input: %s', exc)
        return EXIT_INVALID

    return exit_code if isinstance(exit_code, int) else EXIT_SUCCESS


def main():
    log.basicConfig(level=log.INFO, format=LOG_FORMAT)
    sys.exit(run())


if __name__ == '__main__':
    main()
