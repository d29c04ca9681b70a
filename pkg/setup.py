
from setuptools import setup

setup(
    name='bernoulli_laplace',
    version='1.0.0',
    description='Exact spectral analysis and mixing times of the Bernoulli-Laplace urn chain.',
    author='Mark Fisher',
    license='MIT',
    packages=['bernoulli_laplace', 'bernoulli_laplace.tests'],
    install_requires=[
        'numpy',
        'mpmath',
    ],
    package_data={
        'bernoulli_laplace': ['default_settings.json', 'schemas/*.json'],
        'bernoulli_laplace.tests': ['golden/*.csv'],
    },
    python_requires='>=3.9',
    include_package_data=True,
    zip_safe=False,
    classifiers=[
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3.9',
        'License :: OSI Approved :: MIT License',
    ],
    test_suite='nose.collector',
    tests_require=['nose'],
    extras_require={
        'plot': ['matplotlib'],
    },
    entry_points={
        'console_scripts': [
            'bernoulli_laplace = bernoulli_laplace.cli:main',
        ],
    }
)
