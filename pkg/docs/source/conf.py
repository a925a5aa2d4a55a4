from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.abspath('../..'))

import qcorr  # noqa: E402

# -- Project information -----------------------------------------------------

project = u'qcorr'
copyright = u'2024, qcorr contributors'
author = u'qcorr contributors'

version = u'v' + '.'.join(qcorr.__version__.split('.')[:2]) + '.x'
release = u'v' + qcorr.__version__

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx_autodoc_typehints',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
]

autodoc_member_order = "bysource"

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

templates_path = ['_templates']

source_suffix = {'.rst': 'restructuredtext'}

master_doc = 'index'

language = "en"

exclude_patterns = [u'_build', 'Thumbs.db', '.DS_Store']

pygments_style = None

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'

htmlhelp_basename = 'qcorrdoc'

# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, 'qcorr', u'qcorr Documentation',
     [author], 1)
]
