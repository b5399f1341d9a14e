from setuptools import find_packages, setup

from numforge import __version__

setup(
    name='numforge',
    version=__version__,
    description='Numeric-sensitive choice tuning datasets, low-rank adapter '
                'mixing and numeric/non-numeric benchmark scoring',
    packages=find_packages(include=['numforge', 'numforge.*']),
    package_data={'numforge.resources': ['*.yaml']},
    python_requires='>=3.10',
    install_requires=[
        'numpy~=1.26.4',
        'click~=8.1.7',
        'PyYAML~=6.0.1',
        'tqdm~=4.66.1',
        'pandas~=2.1.4',
    ],
    entry_points={
        'console_scripts': ['forge = numforge.cli.main:forge'],
    },
)
