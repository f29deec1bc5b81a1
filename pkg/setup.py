# Copyright 2026 The ConfEx Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

from setuptools import find_packages, setup

with open('README.md') as f:
    long_description = f.read()

setup(
    name='confex',
    version='0.1.0',
    description=('Configuration discovery and extraction for container '
                 'instances'),
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=["*tests.*", "*tests"]),
    include_package_data=True,
    package_data={'confex': ['rules/*.yaml']},
    zip_safe=False,
    python_requires='>=3.7',
    install_requires=[
        'numpy',
        'PyYAML',
        'six',
    ],
    extras_require={
        'graphviz': ['graphviz'],
        'tests': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['confex=confex.cli:main'],
    },
    classifiers=[
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Intended Audience :: Developers',
        'Intended Audience :: System Administrators',
        'Topic :: System :: Systems Administration',
        'Topic :: Software Development :: Libraries :: Python Modules',
    ],
    license='Apache License, Version 2.0',
    maintainer='ConfEx Developers',
    maintainer_email='',
)
