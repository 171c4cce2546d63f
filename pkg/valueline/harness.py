#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Experiments comparing valuation methods on sequential selection.

An experiment repeats the following steps for a number of runs, each with
its own seed:

1. split the dataset into training, validation and test sets;
2. compute the values of the training points with each method, using the
   validation set to measure utilities;
3. rank the training points by value and measure the test-set utility of
   every prefix of the ranking.

The per-run curves are then averaged. The parameters of an experiment are
kept in a :class:`ExperimentConfig` object, which can be saved to and read
from YAML files::

    import valueline.harness as hn

    config = hn.ExperimentConfig(methods=['dp', 'shapley', 'random'],
                                 train_size=10, valid_size=50, test_size=100,
                                 n_runs=5)
    result = hn.run_experiment(config)
    print(hn.gap_report(result)['shapley']['objective_gap'])

Runs can be spread over MPI processes by passing a communicator (e.g.,
``mpi4py.MPI.COMM_WORLD``) as `comm`: each process handles a contiguous
chunk of runs, and the results are gathered in run order.'''

import logging as log
import os
import time
from typing import Any, Callable, Dict, List, NamedTuple, Optional

import numpy as np
import yaml
from scipy.stats import spearmanr

import valueline.fileio as fio
from valueline.bipartite import (DEFAULT_NUM_OF_SUBSETS, DEFAULT_NUM_OF_THRESHOLDS,
                                 greedy_select, learn_graph)
from valueline.classifier import TrainerConfig
from valueline.core import (DEFAULT_EXACT_CAP, HARD_EXACT_CAP, BudgetedUtility,
                            Dataset, RestrictedUtility, UtilityFunction,
                            ValueAssignment, memoize, rank_by_value,
                            selection_curve, values_from_sequence)
from valueline.datasets import generate_gmm, message_passing, split_dataset
from valueline.dp import solve_dp
from valueline.errors import (CurvatureUndefinedError, InvalidInputError,
                              ResourceCapError, ValuelineError)
from valueline.parallel import indices_for_rank, map_ordered
from valueline.semivalues import (EXACT_SEMIVALUE_CAP, exact_semivalue, mc_semivalue,
                                  parse_scheme)
from valueline.surrogate import EXHAUSTIVE_FIT_CAP, fit_wls, kernel_weights
from valueline.utilities import CoverageUtility, ModelUtility, curvature

SEED_STEP = 10
EARLY_STEPS = 5
METHOD_KINDS = ('dp', 'shapley', 'beta', 'banzhaf', 'loo', 'wls', 'bipartite', 'random')


class MethodSpec(NamedTuple):
    '''A valuation method, as written in configuration files.

    `argument` is the Beta Shapley parameters for ``beta`` (e.g. ``16,1``)
    and the kernel for ``wls`` (e.g. ``shapley``).'''

    kind: str
    argument: str = ''

    @property
    def id(self) -> str:
        return '{0}:{1}'.format(self.kind, self.argument) if self.argument else self.kind


def parse_method(text: str) -> MethodSpec:
    '''Parse a method string like ``dp``, ``beta:16,1`` or ``wls:shapley``.'''

    text = str(text).strip().lower()
    kind, _, argument = text.partition(':')
    argument = argument.strip()

    if kind not in METHOD_KINDS:
        raise InvalidInputError('unknown method "{0}"'.format(text))

    if kind == 'beta':
        scheme = parse_scheme(text)
        return MethodSpec('beta', '{0:g},{1:g}'.format(scheme.alpha, scheme.beta))

    if kind == 'wls':
        argument = argument or 'shapley'
        # Raise an error now if the kernel is unknown
        kernel_weights(argument, 2)
        return MethodSpec('wls', argument)

    if argument:
        raise InvalidInputError('method "{0}" takes no argument'.format(kind))
    return MethodSpec(kind)


def method_file_name(method_id: str) -> str:
    'Turn a method id into a string that can be safely used as a file name'
    return method_id.replace(':', '_').replace(',', '_')


class ExperimentConfig:
    '''Parameters of an experiment.

    Like :class:`valueline.classifier.TrainerConfig`, but mutable, so that
    command-line options can override values read from a file. The following
    parameters are accepted:

    - `dataset_path`: CSV file with the pool of points; if ``None``, the pool
      is drawn from a Gaussian mixture with `n_per_class` points for each of
      `classes` classes in `dims` dimensions, whose centres are `separation`
      apart and whose spread is `sigma`;
    - `train_size`, `valid_size`, `test_size`: size of the three splits;
    - `methods`: list of method strings (see :func:`parse_method`);
    - `n_runs`: number of repetitions; run ``r`` uses seed
      ``base_seed + 10 r``;
    - `budget`: maximum number of utility evaluations for each method and
      run (dynamic programming is exempt);
    - `exact_cap`: largest training set accepted by dynamic programming;
    - `message_passing`: proportion λ used to smooth the pool (see
      :func:`valueline.datasets.message_passing`);
    - `num_of_subsets`, `num_of_thresholds`, `subset_size`: parameters of
      the graph learning step of the ``bipartite`` method;
    - `iterations`, `step_size`, `l2`: parameters of the classifier;
    - `proportions`, `num_of_probes`, `probe_size`: parameters of
      :func:`curvature_sweep`;
    - `output_dir`: where results are saved.

    The class implements YAML serialization through the methods
    :meth:`load` and :meth:`save`.'''

    def __init__(self,
                 dataset_path=None,
                 n_per_class=200,
                 classes=3,
                 dims=3,
                 separation=3.0,
                 sigma=1.0,
                 train_size=20,
                 valid_size=100,
                 test_size=300,
                 methods=('dp', 'shapley', 'banzhaf', 'loo', 'random'),
                 n_runs=20,
                 base_seed=10,
                 budget=1000,
                 exact_cap=DEFAULT_EXACT_CAP,
                 message_passing=0.0,
                 num_of_subsets=DEFAULT_NUM_OF_SUBSETS,
                 num_of_thresholds=DEFAULT_NUM_OF_THRESHOLDS,
                 subset_size=None,
                 iterations=TrainerConfig().iterations,
                 step_size=TrainerConfig().step_size,
                 l2=TrainerConfig().l2,
                 proportions=(0.0, 0.25, 0.5, 0.75, 1.0),
                 num_of_probes=10,
                 probe_size=8,
                 output_dir='results'):
        self.dataset_path = dataset_path
        self.n_per_class = n_per_class
        self.classes = classes
        self.dims = dims
        self.separation = separation
        self.sigma = sigma
        self.train_size = train_size
        self.valid_size = valid_size
        self.test_size = test_size
        self.methods = list(methods)
        self.n_runs = n_runs
        self.base_seed = base_seed
        self.budget = budget
        self.exact_cap = exact_cap
        self.message_passing = message_passing
        self.num_of_subsets = num_of_subsets
        self.num_of_thresholds = num_of_thresholds
        self.subset_size = subset_size
        self.iterations = iterations
        self.step_size = step_size
        self.l2 = l2
        self.proportions = list(proportions)
        self.num_of_probes = num_of_probes
        self.probe_size = probe_size
        self.output_dir = output_dir

    KEYS = ('dataset_path', 'n_per_class', 'classes', 'dims', 'separation', 'sigma',
            'train_size', 'valid_size', 'test_size', 'methods', 'n_runs',
            'base_seed', 'budget', 'exact_cap', 'message_passing',
            'num_of_subsets', 'num_of_thresholds', 'subset_size', 'iterations',
            'step_size', 'l2', 'proportions', 'num_of_probes', 'probe_size',
            'output_dir')

    @property
    def trainer(self) -> TrainerConfig:
        return TrainerConfig(iterations=int(self.iterations),
                             step_size=float(self.step_size),
                             l2=float(self.l2))

    def method_specs(self) -> List[MethodSpec]:
        return [parse_method(x) for x in self.methods]

    def validate(self, num_of_rows=None):
        '''Raise an InvalidInputError if the configuration is invalid.

        If `num_of_rows` is given, check that the splits fit in a pool of
        that size.'''

        if self.dataset_path is None:
            for name in ('n_per_class', 'classes', 'dims'):
                value = getattr(self, name)
                if not isinstance(value, int) or value < 1:
                    raise InvalidInputError('invalid value for {0} ({1})'.format(name, value))
            if self.separation < 0.0 or self.sigma <= 0.0:
                raise InvalidInputError('invalid mixture parameters')
            if num_of_rows is None:
                num_of_rows = self.n_per_class * self.classes

        for name in ('train_size', 'valid_size', 'n_runs', 'budget', 'test_size'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InvalidInputError('invalid value for {0} ({1})'.format(name, value))

        if num_of_rows is not None and \
                self.train_size + self.valid_size + self.test_size > num_of_rows:
            raise InvalidInputError(
                'splits need {0} points, but only {1} are available'
                .format(self.train_size + self.valid_size + self.test_size, num_of_rows))

        if not isinstance(self.exact_cap, int) or not 1 <= self.exact_cap <= HARD_EXACT_CAP:
            raise InvalidInputError('invalid value for exact_cap ({0})'.format(self.exact_cap))

        if not self.methods:
            raise InvalidInputError('no methods given')
        specs = self.method_specs()
        if len({x.id for x in specs}) != len(specs):
            raise InvalidInputError('methods must not be repeated')
        if any(x.kind == 'dp' for x in specs) and self.train_size > self.exact_cap:
            raise InvalidInputError(
                'dynamic programming needs train_size ≤ {0} (got {1})'
                .format(self.exact_cap, self.train_size))

        for value in [self.message_passing] + list(self.proportions):
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError('message passing proportions must lie in [0, 1]')

        if self.num_of_probes < 1 or self.probe_size < 1:
            raise InvalidInputError('invalid curvature probe parameters')

        if self.subset_size is not None and not 1 <= self.subset_size <= self.train_size:
            raise InvalidInputError('invalid value for subset_size ({0})'
                                    .format(self.subset_size))

    def to_dict(self) -> Dict[str, Any]:
        result = {key: getattr(self, key) for key in self.KEYS}
        result['methods'] = list(self.methods)
        result['proportions'] = list(self.proportions)
        return result

    def save(self, stream):
        '''Write a YAML representation of `self` into the stream.'''

        yaml.safe_dump(self.to_dict(), stream=stream,
                       explicit_start=True, explicit_end=True)

    def load(self, input):
        '''Set the parameters from a YAML representation.

        The parameter "input" can either be a file object, a dictionary or a
        string. Keys that are not present keep their current value.'''

        if isinstance(input, dict):
            d = input
        else:
            d = yaml.safe_load(input)

        unknown = set(d.keys()) - set(self.KEYS)
        if unknown:
            raise InvalidInputError('unknown configuration keys: {0}'
                                    .format(', '.join(sorted(unknown))))

        for key, value in d.items():
            setattr(self, key, value)
        self.methods = list(self.methods)
        self.proportions = list(self.proportions)
        return self

    def copy(self, **kwargs) -> 'ExperimentConfig':
        result = ExperimentConfig().load(self.to_dict())
        for key, value in kwargs.items():
            setattr(result, key, value)
        return result


UtilityFactory = Callable[[Dataset, Dataset], UtilityFunction]


def load_pool(config: ExperimentConfig) -> Dataset:
    '''Return the pool of points described by `config`, before any smoothing.'''

    if config.dataset_path is not None:
        return fio.read_dataset(config.dataset_path)

    return generate_gmm(n_per_class=config.n_per_class,
                        classes=config.classes,
                        d=config.dims,
                        separation=config.separation,
                        seed=config.base_seed,
                        sigma=config.sigma)


def model_utility_factory(config: ExperimentConfig) -> UtilityFactory:
    'Return a factory of classifier-accuracy utilities using the trainer of `config`'
    trainer = config.trainer

    def factory(train: Dataset, other: Dataset) -> UtilityFunction:
        return ModelUtility(train, other, config=trainer)

    return factory


def run_seed(config: ExperimentConfig, run_index: int) -> int:
    return config.base_seed + SEED_STEP * run_index


def compute_values(method: MethodSpec, train: Dataset, valid: Dataset,
                   config: ExperimentConfig, seed: int,
                   utility_factory: UtilityFactory, threads=1) -> ValueAssignment:
    '''Compute the values of the points in `train` with `method`.

    Utilities are measured on `valid`. Every method but ``dp`` may call the
    utility at most ``config.budget`` times (each distinct subset counts
    once). Exact algorithms are used when they fit in the budget; otherwise
    Monte Carlo estimators or sampled fits are used.'''

    n = len(train)
    if method.kind == 'random':
        perm = np.random.default_rng(seed).permutation(n)
        return values_from_sequence(perm, method_id='random')

    base_utility = utility_factory(train, valid)
    if method.kind == 'dp':
        return solve_dp(memoize(base_utility), cap=config.exact_cap,
                        threads=threads).optimal_values

    utility = memoize(BudgetedUtility(base_utility, config.budget))
    exhaustive = (1 << n) <= config.budget

    if method.kind in ('shapley', 'beta', 'banzhaf', 'loo'):
        scheme = parse_scheme(method.id)
        if scheme.kind == 'loo' or (exhaustive and n <= EXACT_SEMIVALUE_CAP):
            values = exact_semivalue(utility, scheme, threads=threads)
        else:
            if scheme.kind == 'banzhaf':
                num_of_samples = config.budget // (n + 1)
            else:
                num_of_samples = (config.budget - 1) // n
            if num_of_samples < 1:
                raise ResourceCapError('a budget of {0} evaluations is too small for {1} points'
                                       .format(config.budget, n))
            log.warning('%s: %d points do not fit in a budget of %d evaluations, '
                        'using %d Monte Carlo samples',
                        method.id, n, config.budget, num_of_samples)
            values = mc_semivalue(utility, scheme, num_of_samples, seed=seed,
                                  threads=threads)

    elif method.kind == 'wls':
        if exhaustive and n <= EXHAUSTIVE_FIT_CAP:
            surrogate = fit_wls(utility, kernel=method.argument, threads=threads)
        else:
            log.warning('%s: fitting on %d sampled subsets', method.id, config.budget - 2)
            surrogate = fit_wls(utility, kernel=method.argument, mode='sampled',
                                num_of_samples=config.budget - 2, seed=seed,
                                threads=threads)
        values = surrogate.values()

    elif method.kind == 'bipartite':
        graph, _ = learn_graph(train, valid, utility=utility,
                               num_of_subsets=config.num_of_subsets,
                               num_of_thresholds=config.num_of_thresholds,
                               subset_size=config.subset_size,
                               seed=seed, threads=threads)
        values = greedy_select(graph).values

    else:
        raise InvalidInputError('unknown method "{0}"'.format(method.id))

    log.debug('%s: %d distinct utility evaluations', method.id, utility.evaluations)
    return ValueAssignment(values.values, method_id=method.id, stderr=values.stderr)


class RunResult(NamedTuple):
    '''Outcome of one method in one run.'''

    run_index: int
    seed: int
    method_id: str
    values: Any
    perm: Any
    curve: Any

    @property
    def objective(self) -> float:
        return float(np.mean(self.curve))

    def to_dict(self) -> Dict[str, Any]:
        return {'run': self.run_index,
                'seed': self.seed,
                'method': self.method_id,
                'values': self.values,
                'perm': self.perm,
                'curve': self.curve,
                'objective': self.objective}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> 'RunResult':
        return cls(run_index=int(d['run']),
                   seed=int(d['seed']),
                   method_id=d['method'],
                   values=np.array(d['values'], dtype=np.float64),
                   perm=np.array(d['perm'], dtype=np.int64),
                   curve=np.array(d['curve'], dtype=np.float64))


def run_once(config: ExperimentConfig, pool: Dataset, run_index: int,
             utility_factory: UtilityFactory, threads=1) -> List[RunResult]:
    '''Run all the methods of `config` on the split of run `run_index`.'''

    seed = run_seed(config, run_index)
    train, valid, test = split_dataset(pool, config.train_size, config.valid_size,
                                       config.test_size, seed=seed)
    test_utility = memoize(utility_factory(train, test))

    result = []
    for method in config.method_specs():
        start = time.perf_counter()
        try:
            values = compute_values(method, train, valid, config, seed,
                                    utility_factory, threads=threads)
            perm = rank_by_value(values)
            curve = selection_curve(perm, test_utility, threads=threads)
        except ValuelineError as exc:
            log.error('run %d (seed %d), method "%s" failed: %s',
                      run_index, seed, method.id, exc)
            exc.run_index = run_index
            exc.method = method.id
            raise

        log.info('run %d, method "%s": objective %.6f (%.2f s)',
                 run_index, method.id, curve.objective, time.perf_counter() - start)
        result.append(RunResult(run_index=run_index, seed=seed, method_id=method.id,
                                values=values.values.copy(), perm=perm,
                                curve=curve.utilities))

    return result


class ExperimentResult:
    '''Per-run curves of each method, and their averages.

    `runs[method_id]` is the list of :class:`RunResult` objects of that
    method, sorted by run index.'''

    def __init__(self, methods: List[str], runs: Dict[str, List[RunResult]]):
        self.methods = list(methods)
        self.runs = runs

    @property
    def n_runs(self) -> int:
        return len(self.runs[self.methods[0]]) if self.methods else 0

    @property
    def seeds(self) -> List[int]:
        return [x.seed for x in self.runs[self.methods[0]]]

    def curves(self, method_id: str) -> Any:
        'Return a matrix with one curve per run'
        return np.array([x.curve for x in self.runs[method_id]])

    def mean_curve(self, method_id: str) -> Any:
        return np.mean(self.curves(method_id), axis=0)

    def std_curve(self, method_id: str) -> Any:
        return np.std(self.curves(method_id), axis=0)

    def objectives(self, method_id: str) -> Any:
        return np.array([x.objective for x in self.runs[method_id]])

    def mean_objective(self, method_id: str) -> float:
        return float(np.mean(self.objectives(method_id)))

    def summary(self) -> Dict[str, Any]:
        return {method_id: {'mean_objective': self.mean_objective(method_id),
                            'std_objective': float(np.std(self.objectives(method_id))),
                            'n_runs': self.n_runs,
                            'seeds': self.seeds}
                for method_id in self.methods}


def run_experiment(config: ExperimentConfig,
                   utility_factory: Optional[UtilityFactory] = None,
                   pool: Optional[Dataset] = None,
                   comm=None, threads=1) -> ExperimentResult:
    '''Run the experiment described by `config`.

    `utility_factory` receives a training set and an evaluation set and
    returns the utility to use; by default, the accuracy of a logistic
    regression. If `pool` is ``None``, the dataset is loaded (or generated)
    according to `config`. With an MPI communicator in `comm`, runs are
    spread over the processes and every process returns the full result.'''

    if pool is None:
        pool = load_pool(config)
    config.validate(num_of_rows=len(pool))
    pool = message_passing(pool, config.message_passing)

    if utility_factory is None:
        utility_factory = model_utility_factory(config)

    if comm:
        run_indices = indices_for_rank(config.n_runs, comm.Get_rank(), comm.Get_size())
    else:
        run_indices = list(range(config.n_runs))

    outer_threads = min(threads, max(len(run_indices), 1))
    inner_threads = 1 if outer_threads > 1 else threads
    log.info('starting %d runs of %d methods', len(run_indices), len(config.methods))

    local_runs = map_ordered(
        lambda idx: run_once(config, pool, idx, utility_factory, threads=inner_threads),
        run_indices, outer_threads)

    if comm:
        # Chunks are contiguous, so concatenating them in rank order
        # restores the run order
        all_runs = [x for chunk in comm.allgather(local_runs) for x in chunk]
    else:
        all_runs = local_runs

    methods = [x.id for x in config.method_specs()]
    runs = {method_id: [] for method_id in methods}
    for cur_run in all_runs:
        for cur_result in cur_run:
            runs[cur_result.method_id].append(cur_result)

    return ExperimentResult(methods, runs)


def gap_report(result: ExperimentResult) -> Dict[str, Dict[str, Any]]:
    '''Compare the mean curve of each method with the one of ``dp``.

    For each method, return the gap curve curve_dp(k) − curve_m(k), the gap
    in the objective, and the mean gap over the first five steps
    (``early_gap``).'''

    if 'dp' not in result.runs:
        raise InvalidInputError('a gap report needs the "dp" method')

    reference = result.mean_curve('dp')
    report = {}
    for method_id in result.methods:
        gaps = reference - result.mean_curve(method_id)
        report[method_id] = {'gap_curve': gaps,
                             'objective_gap': float(np.mean(gaps)),
                             'early_gap': float(np.mean(gaps[:EARLY_STEPS]))}
    return report


def write_result(result: ExperimentResult, output_dir: str,
                 config: Optional[ExperimentConfig] = None):
    '''Save `result` in `output_dir`.

    The directory will contain ``config.json``, ``summary.json``, the mean
    curves in ``curves/<method>.csv`` and the per-run details in
    ``runs/<r>/<method>.json``.'''

    if config is not None:
        fio.write_json(os.path.join(output_dir, 'config.json'), config.to_dict())

    for method_id in result.methods:
        fio.write_curve(os.path.join(output_dir, 'curves',
                                     method_file_name(method_id) + '.csv'),
                        result.mean_curve(method_id),
                        std=result.std_curve(method_id))
        for cur_run in result.runs[method_id]:
            fio.write_json(os.path.join(output_dir, 'runs', str(cur_run.run_index),
                                        method_file_name(method_id) + '.json'),
                           cur_run.to_dict())

    fio.write_json(os.path.join(output_dir, 'summary.json'),
                   {'methods': result.methods, 'summary': result.summary()})


def load_result(output_dir: str) -> ExperimentResult:
    '''Read a result saved by :func:`write_result`.'''

    summary = fio.read_json(os.path.join(output_dir, 'summary.json'))
    methods = summary['methods']
    runs = {method_id: [] for method_id in methods}

    runs_dir = os.path.join(output_dir, 'runs')
    for run_name in sorted(os.listdir(runs_dir), key=int):
        for method_id in methods:
            file_name = os.path.join(runs_dir, run_name, method_file_name(method_id) + '.json')
            runs[method_id].append(RunResult.from_dict(fio.read_json(file_name)))

    return ExperimentResult(methods, runs)


def probe_curvature(train: Dataset, valid: Dataset, seed: int,
                    num_of_probes: int, probe_size: int,
                    utility: Optional[UtilityFunction] = None, **kwargs) -> float:
    '''Measure the curvature of the coverage utility learned on `train`.

    The graph is learned with :func:`valueline.bipartite.learn_graph`
    (additional keyword arguments are passed to it); then the curvature is
    computed on `num_of_probes` random subsets of `probe_size` training
    points and averaged. Points that cover nothing are skipped.'''

    graph, _ = learn_graph(train, valid, utility=utility, seed=seed, **kwargs)
    coverage = CoverageUtility(graph)
    probe_size = min(probe_size, graph.n_train)

    rng = np.random.default_rng(seed)
    results = []
    for _ in range(num_of_probes):
        indices = np.sort(rng.choice(graph.n_train, size=probe_size, replace=False))
        try:
            report = curvature(RestrictedUtility(coverage, indices), skip_null=True)
        except CurvatureUndefinedError:
            log.warning('curvature probe with no covering point skipped')
            continue
        if report.skipped:
            log.warning('%d points with no coverage skipped in a curvature probe',
                        len(report.skipped))
        results.append(report.c)

    if not results:
        raise CurvatureUndefinedError(0, 0.0)
    return float(np.mean(results))


class SweepEntry(NamedTuple):
    proportion: float
    curvature: float
    objectives: Dict[str, float]
    result: ExperimentResult


class SweepReport(NamedTuple):
    '''Result of :func:`curvature_sweep`.

    `rho` is the Spearman correlation between proportions and measured
    curvatures (``None`` if the curvature does not change).'''

    entries: List[SweepEntry]
    rho: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {'rho': self.rho,
                'entries': [{'proportion': x.proportion,
                             'curvature': x.curvature,
                             'objectives': x.objectives}
                            for x in self.entries]}


def curvature_sweep(config: ExperimentConfig,
                    utility_factory: Optional[UtilityFactory] = None,
                    comm=None, threads=1) -> SweepReport:
    '''Run the same experiment on progressively smoother versions of the pool.

    For each proportion λ in ``config.proportions``, the pool is smoothed with
    :func:`valueline.datasets.message_passing`, the curvature of the
    resulting utility is measured (averaged over the runs, see
    :func:`probe_curvature`), and :func:`run_experiment` is called.'''

    base_pool = load_pool(config)
    config.validate(num_of_rows=len(base_pool))

    entries = []
    for proportion in config.proportions:
        cur_config = config.copy(message_passing=proportion)
        pool = message_passing(base_pool, proportion)

        curvatures = []
        for run_index in range(config.n_runs):
            seed = run_seed(config, run_index)
            train, valid, _ = split_dataset(pool, config.train_size, config.valid_size,
                                            config.test_size, seed=seed)
            probe_utility = (utility_factory or model_utility_factory(config))(train, valid)
            curvatures.append(probe_curvature(train, valid, seed,
                                              config.num_of_probes, config.probe_size,
                                              utility=probe_utility,
                                              num_of_subsets=config.num_of_subsets,
                                              num_of_thresholds=config.num_of_thresholds,
                                              subset_size=config.subset_size))
        measured = float(np.mean(curvatures))
        log.info('proportion %g: curvature %.4f', proportion, measured)

        result = run_experiment(cur_config, utility_factory=utility_factory,
                                pool=base_pool, comm=comm, threads=threads)
        entries.append(SweepEntry(proportion=float(proportion),
                                  curvature=measured,
                                  objectives={x: result.mean_objective(x)
                                              for x in result.methods},
                                  result=result))

    measured = [x.curvature for x in entries]
    rho = None
    if len(entries) > 1 and np.ptp(measured) > 0.0:
        rho = float(spearmanr([x.proportion for x in entries], measured)[0])

    return SweepReport(entries=entries, rho=rho)
