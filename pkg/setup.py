#!/usr/bin/env python

from setuptools import setup, find_packages

# version lives in core/__init__.py; read it without importing numpy
with open('core/__init__.py') as file:
    version = next(line.split('"')[1] for line in file if line.startswith('VERSION'))

setup(
    name='offdiag',
    version=version,
    description="Spectral classification and Riccati checks for rank-one off-diagonal perturbations",
    packages=find_packages(include=['offdiag', 'offdiag.*', 'core', 'core.*']),
    python_requires='>=3.9',
    install_requires=[
        'numpy',
        'scipy',
        'PyYAML',
        'mpmath',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': ['offdiag = core.cli:main'],
    },
)
