# -*- coding: utf-8 -*-
#
# symkit documentation build configuration file.

import sys
import os.path as path

project_path = path.abspath(path.dirname(path.dirname(__file__)))
sys.path.append(project_path)

from symkit import VERSION  # noqa: E402

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'symkit'
version = VERSION
release = VERSION

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'symkitdoc'

latex_documents = [
    ('index', 'symkit.tex', u'symkit Documentation', u'', 'manual'),
]

man_pages = [
    ('index', 'symkit', u'symkit Documentation', [], 1)
]
