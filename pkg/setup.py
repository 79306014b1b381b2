from setuptools import setup, find_packages


def read_requirements(file):
    with open(file) as f:
        return f.read().splitlines()


def read_file(file):
    with open(file) as f:
        return f.read()


package_list = find_packages(exclude=["*.tests*"])
long_description = read_file("README.md")
version = 0.1
requirements = read_requirements("requirements.txt")

setup(
    name="phi4lab",
    version=version,
    author="Data Science",
    description="Perturbation theory laboratory for the two-dimensional lattice Phi^4 model",
    long_description=long_description,
    package_dir={
        "phi4lab": "phi4lab",
        "phi4lab.config": "phi4lab/config",
        "phi4lab.lattice": "phi4lab/lattice",
        "phi4lab.graphs": "phi4lab/graphs",
        "phi4lab.diagrams": "phi4lab/diagrams",
        "phi4lab.simulation": "phi4lab/simulation",
        "phi4lab.besov": "phi4lab/besov",
        "phi4lab.harness": "phi4lab/harness",
    },
    packages=package_list,  # Don't include test directory in binary distribution
    package_data={
        "phi4lab.config": ["*.yml"],
        "": ["*.yml"],
    },
    include_package_data=True,
    install_requires=requirements,
    entry_points={
        "console_scripts": ["phi4=phi4lab.harness.cli:main"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
)
