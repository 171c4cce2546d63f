#!/usr/bin/env python

import os

from setuptools import setup

NAME = 'valueline'
VERSION = '0.1'
DESCRIPTION = 'Data valuation and optimal sequential selection of training points'
LICENSE = 'MIT'


# Utility function to read the README file.
def read(fname):
    return open(os.path.join(os.path.dirname(__file__), fname)).read()


setup(name=NAME,
      version=VERSION,
      description=DESCRIPTION,
      license=LICENSE,
      long_description=read('README.md'),
      long_description_content_type='text/markdown',
      packages=['valueline'],
      python_requires='>=3.7',
      install_requires=['numpy', 'scipy', 'astropy', 'pyyaml', 'click'],
      extras_require={'mpi': ['mpi4py'],
                      'test': ['pytest']},
      data_files=[('presets', [
          'presets/optimality_gap.yaml',
          'presets/curvature_sweep.yaml',
          'presets/bipartite.yaml',
      ])],
      entry_points={'console_scripts': ['valueline=valueline.cli:main']})
