from setuptools import setup, find_packages

VERSION = '0.1.0'
DESCRIPTION = 'Exact W0 words, inverse limits and shadowing for Deaconu-Renault systems'
LONG_DESCRIPTION = '''A package for experimenting with shadowing in Deaconu-Renault systems.
Points of the base spaces (the one-point compactified naturals and punctured Cantor spaces) are eventually
periodic, so distances, cylinder memberships and branch maps are computed exactly. On top of the base spaces
the package builds the compactified word space W0 with its enumeration ultrametric, the inverse-limit shift
with its prefixing map, and the pseudo-orbit lifting and shadow-point constructions, instantiated on the
variable-length shift, the first-return map of the shift, the halving map and the identity on the naturals.'''
REQUIRED_PACKAGES = [
    'numpy>=1.24.4',
    'pandas>=2.0.2'
]
TEST_PACKAGES = [
    'pytest>=7.4',
    'hypothesis>=6.80'
]

setup(
        name="drshadow",
        version=VERSION,
        description=DESCRIPTION,
        long_description=LONG_DESCRIPTION,
        packages=find_packages(exclude=['tests', 'tests.*']),
        install_requires=REQUIRED_PACKAGES,
        extras_require={'test': TEST_PACKAGES},
        python_requires='>=3.10',
        entry_points={'console_scripts': ['drshadow=drshadow.cli:main']},
        keywords=['python', 'symbolic dynamics', 'shadowing', 'ultrametric'],
        include_package_data=True,
        classifiers= [
            "Development Status :: 3 - Alpha",
            "Intended Audience :: Education",
            "Intended Audience :: Science/Research",
            "Programming Language :: Python :: 3",
            "Topic :: Scientific/Engineering :: Mathematics",
        ]
)
