#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# Sphinx configuration for the Valueline documentation.

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join('..')))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'Valueline'
copyright = '2026, the Valueline developers'
author = 'The Valueline developers'

version = '0.1'
release = '0.1'

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'

html_theme = 'alabaster'
html_static_path = ['_static']
htmlhelp_basename = 'Valuelinedoc'

latex_documents = [
    (master_doc, 'Valueline.tex', 'Valueline Documentation', author, 'manual'),
]

man_pages = [
    (master_doc, 'valueline', 'Valueline Documentation', [author], 1)
]
