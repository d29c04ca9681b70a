'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Exceptions raised by the bernoulli_laplace package.
'''

class BernoulliLaplaceError(Exception):
    '''
    Base class for all errors raised by this package.
    '''

class ModelError(BernoulliLaplaceError):
    '''
    Invalid model parameters, or an index outside of the state space.
    '''

class NeedsCanonicalizationError(ModelError):
    '''
    The parameters describe a valid chain, but not in the canonical form nw <= min(n1, n2) that the
    closed form formulas are stated in. Use core.canonicalize() to relabel.
    '''

class CanonicalizationError(ModelError):
    '''
    No composition of the urn swap and color swap relabelings brings the parameters to canonical
    form.
    '''

class BackendError(BernoulliLaplaceError):
    '''
    A computation was requested in a scalar backend that cannot (or should not) perform it.
    '''

class InternalConsistencyError(BernoulliLaplaceError):
    '''
    Two independent construction paths disagree. This indicates a bug, not a user error.
    '''

class NonConvergenceError(BernoulliLaplaceError):
    '''
    The chain does not converge to its stationary distribution (it is periodic).
    '''

class SettingsError(BernoulliLaplaceError):
    '''
    The settings file contains unknown keys or invalid values.
    '''

class VerificationError(BernoulliLaplaceError):
    '''
    One or more invariants of the verification suite failed.
    '''
