# Sphinx configuration, see https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

sys.path.insert(0, os.path.abspath('../..'))

import glyphread  # noqa

project = 'glyphread'
copyright = '2024, glyphread developers'
author = 'glyphread developers'
release = glyphread.__version__

extensions = [
    "sphinxcontrib.jquery",
]
templates_path = ['_templates']
exclude_patterns = []

html_theme = 'sphinx_rtd_theme'
html_theme_options = {
    'collapse_navigation': False,
}
