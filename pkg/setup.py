import re
from setuptools import setup, find_packages


with open('symkit/__init__.py', 'rt') as fd:
    version = re.search(r'^VERSION\s*=\s*[\'"]([^\'"]*)[\'"]',
                        fd.read(), re.MULTILINE).group(1)

with open('README.rst') as fd:
    long_description = fd.read()

setup(
    name="symkit",
    version=version,
    description=("Lie point symmetries, quasi-polynomial first integrals "
                 "and Noether currents of differential systems"),
    long_description=long_description,
    packages=find_packages(exclude=["tests", "tests.*", "tasks"]),
    install_requires=["sympy>=1.5", "six"],
    tests_require=["mock", "tox", "pytest", "hypothesis"],
    entry_points={
        "console_scripts": ["symkit=symkit.cli:main"],
    },
    license="MIT License",
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ]
)
