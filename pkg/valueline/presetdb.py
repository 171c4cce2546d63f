#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

'Utilities to access the bundled experiment presets.'

import os.path
from typing import List


def preset_db_path():
    '''Return the path to the preset database.

    Return a string containing the path to the YAML files defining the
    standard experiments.'''

    return os.path.abspath(os.path.join(os.path.dirname(__file__),
                                        '..', 'presets'))


def preset_file_name(name: str) -> str:
    'Return the name of the file containing the preset called `name`.'

    return os.path.join(preset_db_path(), name + '.yaml')


def list_presets() -> List[str]:
    return sorted(os.path.splitext(x)[0] for x in os.listdir(preset_db_path())
                  if x.endswith('.yaml'))


def optimality_gap_file_name():
    'Return the name of the file defining the comparison against dynamic programming.'

    return preset_file_name('optimality_gap')


def curvature_sweep_file_name():
    'Return the name of the file defining the curvature sweep.'

    return preset_file_name('curvature_sweep')


def bipartite_file_name():
    'Return the name of the file defining the comparison of the bipartite method.'

    return preset_file_name('bipartite')
