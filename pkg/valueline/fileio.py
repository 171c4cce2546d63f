#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'''Reading and writing Valueline files.

Tables (datasets, selection curves, threshold sweeps) are saved as CSV files
through :class:`astropy.table.Table`; everything else (values, DP solutions,
surrogates, graphs, summaries) is saved as JSON with sorted keys, so that
the same objects always produce the same bytes.'''

import json
import logging as log
import os
from typing import Any, Dict

import numpy as np
from astropy.table import Table

from valueline.core import Dataset, SelectionCurve, ValueAssignment
from valueline.errors import InvalidInputError

CSV_FORMAT = 'ascii.csv'


def _ensure_parent(file_name: str):
    parent = os.path.dirname(file_name)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_table(file_name: str, table: Table):
    _ensure_parent(file_name)
    table.write(file_name, format=CSV_FORMAT, overwrite=True)
    log.info('file "%s" written successfully', file_name)


def read_table(file_name: str) -> Table:
    try:
        return Table.read(file_name, format=CSV_FORMAT)
    except (OSError, ValueError) as exc:
        raise InvalidInputError('unable to read table "{0}": {1}'.format(file_name, exc))


def write_dataset(file_name: str, dataset: Dataset):
    '''Save a dataset as a CSV file with columns ``f0``, ``f1``, ... and ``label``.'''

    table = Table()
    for col in range(dataset.num_of_features):
        table['f{0}'.format(col)] = dataset.features[:, col]
    table['label'] = dataset.labels
    write_table(file_name, table)


def read_dataset(file_name: str, split_tag='train', num_of_classes=None) -> Dataset:
    '''Load a dataset saved by :func:`write_dataset`.

    Every column but ``label`` is taken as a feature, in the order they
    appear in the file.'''

    table = read_table(file_name)
    if 'label' not in table.colnames:
        raise InvalidInputError('file "{0}" has no "label" column'.format(file_name))

    feature_names = [x for x in table.colnames if x != 'label']
    if not feature_names:
        raise InvalidInputError('file "{0}" has no feature columns'.format(file_name))

    try:
        features = np.column_stack([np.asarray(table[x], dtype=np.float64)
                                    for x in feature_names])
        labels = np.asarray(table['label'], dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError('file "{0}" has non-numeric entries: {1}'
                                .format(file_name, exc))
    return Dataset(features, labels, split_tag=split_tag, num_of_classes=num_of_classes)


def write_curve(file_name: str, utilities, std=None):
    '''Save a selection curve as a CSV file with columns ``k,utility[,std]``.

    `utilities` can be a :class:`SelectionCurve` or a plain sequence (e.g., a
    curve averaged over many runs, in which case `std` can hold the per-point
    standard deviation).'''

    if isinstance(utilities, SelectionCurve):
        utilities = utilities.utilities
    utilities = np.asarray(utilities, dtype=np.float64)

    table = Table()
    table['k'] = np.arange(1, utilities.size + 1, dtype=np.int64)
    table['utility'] = utilities
    if std is not None:
        table['std'] = np.asarray(std, dtype=np.float64)
    write_table(file_name, table)


def read_curve(file_name: str) -> SelectionCurve:
    table = read_table(file_name)
    if 'utility' not in table.colnames:
        raise InvalidInputError('file "{0}" has no "utility" column'.format(file_name))
    return SelectionCurve(np.asarray(table['utility'], dtype=np.float64))


def write_sweep(file_name: str, thresholds, errors):
    'Save a threshold sweep as a CSV file with columns ``tau,error``'
    table = Table()
    table['tau'] = np.asarray(thresholds, dtype=np.float64)
    table['error'] = np.asarray(errors, dtype=np.float64)
    write_table(file_name, table)


def _to_plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(key): _to_plain(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(x) for x in obj]
    if isinstance(obj, np.ndarray):
        return _to_plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(file_name: str, obj: Dict[str, Any]):
    '''Save `obj` as a JSON file. NumPy arrays and scalars are converted to
    plain lists and numbers.'''

    _ensure_parent(file_name)
    with open(file_name, 'wt') as outf:
        json.dump(_to_plain(obj), outf, indent=2, sort_keys=True)
        outf.write('\n')
    log.info('file "%s" written successfully', file_name)


def read_json(file_name: str) -> Dict[str, Any]:
    try:
        with open(file_name, 'rt') as inpf:
            return json.load(inpf)
    except (OSError, ValueError) as exc:
        raise InvalidInputError('unable to read JSON file "{0}": {1}'
                                .format(file_name, exc))


def values_to_dict(values: ValueAssignment) -> Dict[str, Any]:
    result = {'method': values.method_id,
              'values': values.values}
    if values.stderr is not None:
        result['stderr'] = values.stderr
    return result


def values_from_dict(d: Dict[str, Any]) -> ValueAssignment:
    try:
        return ValueAssignment(d['values'], method_id=d['method'], stderr=d.get('stderr'))
    except (KeyError, TypeError) as exc:
        raise InvalidInputError('malformed value file: {0}'.format(exc))


def write_values(file_name: str, values: ValueAssignment):
    write_json(file_name, values_to_dict(values))


def read_values(file_name: str) -> ValueAssignment:
    return values_from_dict(read_json(file_name))
