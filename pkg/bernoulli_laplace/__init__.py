'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Exact spectral analysis of the Bernoulli-Laplace two urn Markov chain.
'''

__version__ = '1.0.0'
