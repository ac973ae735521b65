"""
Setup configuration for the multi-brjuno library
"""
from setuptools import setup, find_packages
from pathlib import Path

# Read the README file
this_directory = Path(__file__).parent
long_description = (this_directory / "multibrjuno" / "README.md").read_text()

setup(
    name="multi-brjuno",
    version="1.0.0",
    author="multi-brjuno developers",
    description="Certified multidimensional Brjuno sums, Diophantine scans and linearization of Siegel germs",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
    python_requires=">=3.8",
    install_requires=[
        "mpmath>=1.2.0",
        "numpy>=1.21.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
            "black>=22.0.0",
            "flake8>=5.0.0",
            "mypy>=0.990",
            "sympy>=1.10",
        ],
    },
    entry_points={
        "console_scripts": [
            "multi-brjuno=multibrjuno.cli:main",
        ],
    },
    keywords="brjuno diophantine continued-fractions siegel-disk interval-arithmetic dynamics",
    include_package_data=True,
    zip_safe=False,
)
