#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

import os
import tempfile
import threading
import unittest as ut
from concurrent.futures import ThreadPoolExecutor
from io import StringIO

import numpy as np

import valueline.harness as hn
import valueline.presetdb as pdb
from valueline.errors import InvalidInputError
from valueline.paramfile import load_config_files
from valueline.utilities import CallableUtility, LinearUtility


def small_config(**kwargs):
    config = hn.ExperimentConfig(n_per_class=10, classes=2, dims=2, separation=2.0,
                                 train_size=6, valid_size=8, test_size=4,
                                 methods=['dp', 'shapley', 'random'], n_runs=3,
                                 num_of_subsets=5, num_of_thresholds=4,
                                 num_of_probes=3, probe_size=4)
    for key, value in kwargs.items():
        setattr(config, key, value)
    return config


def linear_factory(train, other):
    'Utility whose weights only depend on the training points'
    return LinearUtility(np.abs(train.features[:, 0]) + 1.0)


def cardinality_factory(train, other):
    return CallableUtility(len(train), lambda idx: float(len(idx)))


class FakeComm:
    '''Minimal stand-in for an MPI communicator whose ranks are threads.'''

    def __init__(self, rank, size, shared, barrier):
        self.rank = rank
        self.size = size
        self.shared = shared
        self.barrier = barrier

    def Get_rank(self):
        return self.rank

    def Get_size(self):
        return self.size

    def allgather(self, obj):
        self.shared[self.rank] = obj
        self.barrier.wait()
        return list(self.shared)


class TestMethods(ut.TestCase):
    def test_parse(self):
        self.assertEqual(hn.parse_method('dp'), hn.MethodSpec('dp'))
        self.assertEqual(hn.parse_method('Beta:16, 1').id, 'beta:16,1')
        self.assertEqual(hn.parse_method('wls').id, 'wls:shapley')
        self.assertEqual(hn.parse_method('wls:banzhaf').id, 'wls:banzhaf')
        self.assertEqual(hn.method_file_name('beta:16,1'), 'beta_16_1')

        for text in ['tmc', 'dp:3', 'wls:uniform', 'beta:1']:
            with self.assertRaises(InvalidInputError, msg=text):
                hn.parse_method(text)


class TestConfig(ut.TestCase):
    def test_defaults(self):
        config = hn.ExperimentConfig()
        config.validate()
        self.assertEqual(config.trainer.iterations, 500)

    def test_validate(self):
        for kwargs in [{'train_size': 21},
                       {'methods': ['shapley', 'shapley']},
                       {'methods': []},
                       {'message_passing': 1.5},
                       {'n_runs': 0},
                       {'exact_cap': 30},
                       {'train_size': 15, 'valid_size': 5, 'test_size': 1}]:
            config = small_config(**kwargs)
            with self.assertRaises(InvalidInputError, msg=str(kwargs)):
                config.validate()

        # Without "dp", large training sets are fine
        small_config(methods=['random'], n_per_class=20, train_size=25).validate()

    def test_yaml(self):
        config = small_config(methods=['dp', 'beta:16,1'], subset_size=3)
        stream = StringIO()
        config.save(stream)

        copy = hn.ExperimentConfig().load(StringIO(stream.getvalue()))
        self.assertEqual(copy.to_dict(), config.to_dict())

        with self.assertRaises(InvalidInputError):
            hn.ExperimentConfig().load({'runs': 3})

    def test_copy(self):
        config = small_config()
        copy = config.copy(message_passing=0.5)
        self.assertEqual(copy.message_passing, 0.5)
        self.assertEqual(config.message_passing, 0.0)
        copy.methods.append('loo')
        self.assertEqual(config.methods, ['dp', 'shapley', 'random'])


class TestComputeValues(ut.TestCase):
    def setUp(self):
        self.config = small_config()
        pool = hn.load_pool(self.config)
        self.train = pool.subset(range(6))
        self.valid = pool.subset(range(6, 11), split_tag='valid')

    def test_exact(self):
        for text in ('dp', 'shapley', 'loo', 'wls:shapley'):
            values = hn.compute_values(hn.parse_method(text), self.train, self.valid,
                                       self.config, seed=1, utility_factory=linear_factory)
            self.assertEqual(values.method_id, hn.parse_method(text).id)
            self.assertTrue(np.array_equal(values.ranking(),
                                           np.argsort(-np.abs(self.train.features[:, 0]),
                                                      kind='stable')),
                            msg=text)

    def test_budget(self):
        # 2^6 subsets do not fit: Monte Carlo estimates are used instead
        config = small_config(budget=40)
        for text in ('shapley', 'banzhaf', 'wls:shapley'):
            values = hn.compute_values(hn.parse_method(text), self.train, self.valid,
                                       config, seed=1, utility_factory=linear_factory)
            self.assertTrue(np.allclose(values.values,
                                        np.abs(self.train.features[:, 0]) + 1.0),
                            msg=text)

    def test_random(self):
        values = hn.compute_values(hn.parse_method('random'), self.train, self.valid,
                                   self.config, seed=4, utility_factory=linear_factory)
        self.assertTrue(np.array_equal(np.sort(values.values), np.arange(6)))

    def test_bipartite(self):
        values = hn.compute_values(hn.parse_method('bipartite'), self.train, self.valid,
                                   self.config, seed=4, utility_factory=cardinality_factory)
        self.assertEqual(values.method_id, 'bipartite')
        self.assertTrue(np.array_equal(np.sort(values.values), np.arange(6)))


class TestExperiment(ut.TestCase):
    def test_random_method(self):
        config = small_config(methods=['random'])
        result = hn.run_experiment(config, utility_factory=cardinality_factory)
        self.assertEqual(result.n_runs, 3)
        self.assertEqual(result.seeds, [10, 20, 30])
        self.assertTrue(np.array_equal(result.mean_curve('random'), np.arange(1, 7)))
        self.assertTrue(np.array_equal(result.std_curve('random'), np.zeros(6)))

    def test_linear(self):
        result = hn.run_experiment(small_config(), utility_factory=linear_factory)
        self.assertTrue(np.array_equal(result.curves('dp'), result.curves('shapley')))
        self.assertGreaterEqual(result.mean_objective('dp'), result.mean_objective('random'))

        report = hn.gap_report(result)
        self.assertEqual(report['dp']['objective_gap'], 0.0)
        self.assertEqual(report['shapley']['objective_gap'], 0.0)
        self.assertEqual(report['shapley']['early_gap'], 0.0)
        self.assertGreaterEqual(report['random']['objective_gap'], 0.0)

        without_dp = hn.run_experiment(small_config(methods=['random']),
                                       utility_factory=linear_factory)
        with self.assertRaises(InvalidInputError):
            hn.gap_report(without_dp)

    def test_threads(self):
        config = small_config()
        single = hn.run_experiment(config, utility_factory=linear_factory)
        many = hn.run_experiment(config, utility_factory=linear_factory, threads=4)
        for method_id in single.methods:
            self.assertTrue(np.array_equal(single.curves(method_id), many.curves(method_id)))

    def test_default_utility(self):
        result = hn.run_experiment(small_config(methods=['loo', 'random'], n_runs=1))
        curve = result.mean_curve('loo')
        self.assertEqual(curve.size, 6)
        self.assertTrue(np.all((curve >= 0.0) & (curve <= 1.0)))

    def test_mpi(self):
        config = small_config(n_runs=5)
        reference = hn.run_experiment(config, utility_factory=linear_factory)

        shared = [None, None]
        barrier = threading.Barrier(2)

        def run_rank(rank):
            return hn.run_experiment(config.copy(), utility_factory=linear_factory,
                                     comm=FakeComm(rank, 2, shared, barrier))

        with ThreadPoolExecutor(max_workers=2) as pool:
            results = list(pool.map(run_rank, [0, 1]))

        for cur_result in results:
            self.assertEqual(cur_result.seeds, reference.seeds)
            for method_id in reference.methods:
                self.assertTrue(np.array_equal(cur_result.curves(method_id),
                                               reference.curves(method_id)))

    def test_files(self):
        config = small_config(methods=['dp', 'beta:16,1', 'random'])
        result = hn.run_experiment(config, utility_factory=linear_factory)

        with tempfile.TemporaryDirectory() as tmpdir:
            first = os.path.join(tmpdir, 'first')
            second = os.path.join(tmpdir, 'second')
            hn.write_result(result, first, config=config)
            hn.write_result(result, second, config=config)

            for name in ('summary.json', 'config.json',
                         os.path.join('curves', 'beta_16_1.csv'),
                         os.path.join('runs', '2', 'dp.json')):
                with open(os.path.join(first, name), 'rb') as inpf:
                    first_bytes = inpf.read()
                with open(os.path.join(second, name), 'rb') as inpf:
                    self.assertEqual(first_bytes, inpf.read(), msg=name)

            loaded = hn.load_result(first)
            self.assertEqual(loaded.methods, result.methods)
            self.assertEqual(loaded.seeds, result.seeds)
            for method_id in result.methods:
                self.assertTrue(np.allclose(loaded.mean_curve(method_id),
                                            result.mean_curve(method_id)))
                self.assertAlmostEqual(loaded.mean_objective(method_id),
                                       result.mean_objective(method_id))


class TestSweep(ut.TestCase):
    def test_sweep(self):
        config = small_config(methods=['dp', 'random'], n_runs=2, proportions=[0.0, 1.0])
        report = hn.curvature_sweep(config, utility_factory=linear_factory)
        self.assertEqual([x.proportion for x in report.entries], [0.0, 1.0])

        plain = hn.run_experiment(small_config(methods=['dp', 'random'], n_runs=2),
                                  utility_factory=linear_factory)
        for method_id in plain.methods:
            self.assertTrue(np.array_equal(report.entries[0].result.curves(method_id),
                                           plain.curves(method_id)))

        self.assertGreaterEqual(report.entries[1].curvature, report.entries[0].curvature)
        for entry in report.entries:
            self.assertTrue(0.0 <= entry.curvature <= 1.0)

        as_dict = report.to_dict()
        self.assertEqual(len(as_dict['entries']), 2)
        self.assertIn('dp', as_dict['entries'][0]['objectives'])


SLOW_TESTS = bool(os.environ.get('VALUELINE_SLOW_TESTS'))


def preset_config(name):
    config = hn.ExperimentConfig()
    config.load(load_config_files([pdb.preset_file_name(name)]))
    return config


class TestPresets(ut.TestCase):
    def test_bipartite_beats_random(self):
        config = preset_config('bipartite')
        config.methods = ['bipartite', 'random']
        result = hn.run_experiment(config, threads=4)
        self.assertEqual(len(result.seeds), 20)
        self.assertGreaterEqual(result.mean_objective('bipartite') -
                                result.mean_objective('random'), 0.02)

    @ut.skipUnless(SLOW_TESTS, 'set VALUELINE_SLOW_TESTS to run the full sweep')
    def test_curvature_sweep(self):
        config = preset_config('curvature_sweep')
        report = hn.curvature_sweep(config, threads=4)

        curvatures = [x.curvature for x in report.entries]
        self.assertEqual([x.proportion for x in report.entries],
                         [0.0, 0.25, 0.5, 0.75, 1.0])
        self.assertTrue(np.all(np.diff(curvatures) >= 0.0), msg=str(curvatures))
        self.assertIsNotNone(report.rho)
        self.assertGreaterEqual(report.rho, 0.9)

        first, last = report.entries[0], report.entries[-1]
        for method_id in config.methods:
            if method_id == 'random':
                continue
            self.assertLess(last.objectives[method_id], first.objectives[method_id],
                            msg=method_id)


if __name__ == '__main__':
    ut.main()
