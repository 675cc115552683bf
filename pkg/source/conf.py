# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------
import os
import sys

sys.path.insert(0,os.path.abspath(".."))


project = 'drshadow'
copyright = '2026, drshadow developers'
author = 'drshadow developers'
release = '0.1.0'

# -- General configuration ---------------------------------------------------

extensions = ['sphinx.ext.autodoc','sphinx.ext.doctest','sphinx.ext.viewcode']

templates_path = ['_templates']
exclude_patterns = []


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
