from setuptools import find_packages, setup


def read_requirements(path):
    with open(path) as f:
        return [line.strip() for line in f if line.strip() and not line.startswith("#")]


setup(
    name="capg-lab",
    version="0.1.0",
    description="Clipped-action policy gradient estimators and experiments",
    packages=find_packages(include=["src", "src.*"]),
    python_requires=">=3.9",
    install_requires=read_requirements("requirements.txt"),
    extras_require={"test": read_requirements("requirements-test.txt")},
    entry_points={"console_scripts": ["capg-lab=src.main:main"]},
)
