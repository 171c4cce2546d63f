#!/usr/bin/env python3
# -*- encoding: utf-8 -*-

from typing import Any, Dict, List

import yaml

from valueline.errors import InvalidInputError


def load_config_files(file_names: List[str]) -> Dict[str, Any]:
    '''Create a dictionary using definitions from a set of configuration files.

    Each file can be either in YAML or in JSON format (JSON is a subset of
    YAML). The result contains the keys and values from all the input files.
    If a key is found more than once, only the last definition will be used
    in the result. Therefore, the order in specifying the input file names is
    significant.'''

    parameters = dict()

    for cur_name in file_names:
        try:
            with open(cur_name, 'rt') as f:
                cur_parameters = yaml.safe_load(f)
        except (OSError, yaml.YAMLError) as exc:
            raise InvalidInputError('unable to read configuration file "{0}": {1}'
                                    .format(cur_name, exc))

        if cur_parameters is None:
            continue
        if not isinstance(cur_parameters, dict):
            raise InvalidInputError('configuration file "{0}" does not contain a mapping'
                                    .format(cur_name))

        for key, value in cur_parameters.items():
            parameters[key] = value

    return parameters
