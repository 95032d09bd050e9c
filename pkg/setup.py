from morasskit.version import __version__ as version
from setuptools import find_packages, setup

with open('requirements/install.txt') as f:
    requirements = f.read().splitlines()


setup(
    name="MorassKit",
    version=version,
    description="Finite neat simplified morasses and the Boolean algebras built along them.",
    author="Invenia Technical Computing",
    packages=find_packages(exclude=["tests"]),
    install_requires=requirements,
    include_package_data=True,
    package_data={"morasskit": ["VERSION", "defaults.yaml"]},
    entry_points={"console_scripts": ["morasskit=morasskit.cli:main"]},
)
