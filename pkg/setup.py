#!/usr/bin/env python3
"""
Setup script for numwall
"""
from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="numwall",
    version="1.0.1",
    description="Number Walls over prime fields, substitution tilings and bounded-deficiency certificates",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.21.0",
        "Pillow>=9.0.0",
    ],
    extras_require={
        "dev": [
            "pytest>=6.0.0",
            "pylint>=2.10.0",
            "black>=21.7b0",
        ],
    },
    entry_points={
        "console_scripts": [
            "numwall=numwall.main:main",
        ],
    },
)
