from setuptools import setup, find_packages

setup(
    name="bayes-ridge-analyzer",
    version="0.1.0",
    description="高维贝叶斯岭回归的精确有限样本分析与 Monte Carlo 校验",
    author="Your Name",
    packages=find_packages(include=["src", "src.*"]),
    install_requires=[
        "numpy>=1.21.0",
        "scipy>=1.8.0",
        "pandas>=1.5.0",
    ],
    extras_require={
        "test": ["pytest>=7.0"],
    },
    entry_points={
        "console_scripts": [
            "bayes-ridge=src.harness.cli:main",
        ],
    },
    python_requires=">=3.8",
)
