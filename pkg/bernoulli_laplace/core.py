'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Model parameters, transition kernel and stationary distribution of the Bernoulli-Laplace two urn
chain, and the scalar backends shared by the rest of the package.

The chain: urn 1 holds n1 balls and urn 2 holds n2 balls, nw of all n = n1 + n2 balls are white and
nb = n - nw are black. Each step one ball is drawn uniformly from each urn and the two are swapped.
The state i is the number of white balls in urn 1.

Matrices are column stochastic, (T)_ij = Pr{state i at m + 1 | state j at m}.
'''

import enum
import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    BackendError,
    CanonicalizationError,
    InternalConsistencyError,
    ModelError,
    NeedsCanonicalizationError,
)

_logger = logging.getLogger(__name__)

# Allowed deviation of a float distribution from a probability vector.
FLOAT_TOLERANCE = 1e-12

class Backend(enum.Enum):
    '''
    The scalar backend of a computation.

    EXACT values are fractions.Fraction (or int) and never rounded. FLOAT values are binary64.
    Converting exact to float is always allowed, float to exact never is.
    '''
    EXACT = 'exact'
    FLOAT = 'float'

    @classmethod
    def parse(cls, name):
        '''
        Returns the backend with the given name ("exact" or "float"), or the backend itself if one
        is given.
        '''
        if isinstance(name, cls):
            return name

        try:
            return cls(str(name).lower())
        except ValueError:
            raise BackendError(f'Unknown backend "{name}", expected "exact" or "float".')

    @property
    def dtype(self):
        '''
        The numpy dtype used for dense matrices in this backend.
        '''
        if self is Backend.EXACT:
            return object

        return np.float64

    def convert(self, value):
        '''
        Converts a single scalar to this backend.
        '''
        if self is Backend.FLOAT:
            return float(value)

        if isinstance(value, bool) or not isinstance(value, numbers.Rational):
            raise BackendError(f'Cannot convert {value!r} to the exact backend.')

        return Fraction(value)

    def array(self, values):
        '''
        Converts a (nested) sequence of scalars to a numpy array in this backend.
        '''
        if self is Backend.FLOAT:
            return np.array(values, dtype=np.float64)

        array = np.array(values, dtype=object)
        for index, value in np.ndenumerate(array):
            array[index] = self.convert(value)

        return array

def state_range(n1, n2, nw):
    '''
    Returns the range of possible white ball counts in urn 1 for any (not necessarily canonical)
    set of parameters.
    '''
    return range(max(0, nw - n2), min(nw, n1) + 1)

def _check_counts(n1, n2, nw):
    '''
    Validates the raw ball counts, independent of canonical form.
    '''
    for name, value in (('n1', n1), ('n2', n2), ('nw', nw)):
        if not isinstance(value, numbers.Integral) or isinstance(value, bool):
            raise ModelError(f'{name} must be an integer, got {value!r}.')

    if n1 < 1 or n2 < 1:
        raise ModelError(f'Urn capacities must be positive, got n1={n1}, n2={n2}.')

    if nw < 0 or nw > n1 + n2:
        raise ModelError(
            f'Impossible color count: nw={nw} white balls with n1 + n2 = {n1 + n2} balls.')

def _probabilities(n1, n2, nw, i):
    '''
    The up, down and hold probabilities of state i for raw parameters.
    '''
    nb = n1 + n2 - nw
    denominator = n1 * n2
    p = Fraction((n1 - i) * (nw - i), denominator)
    q = Fraction(i * (nb - (n1 - i)), denominator)

    return p, q, 1 - p - q

@dataclass(frozen=True)
class ModelParams:
    '''
    The ball counts of a canonical Bernoulli-Laplace model.

    Construction validates the counts. Parameters that are valid but not canonical
    (nw > min(n1, n2)) raise NeedsCanonicalizationError, see canonicalize().
    '''
    n1: int
    n2: int
    nw: int

    def __post_init__(self):
        _check_counts(self.n1, self.n2, self.nw)

        if self.nw < 1:
            raise ModelError('At least one white ball is required for a nontrivial chain.')

        if self.nw > min(self.n1, self.n2):
            raise NeedsCanonicalizationError(
                f'nw={self.nw} exceeds min(n1, n2)={min(self.n1, self.n2)}, the parameters '
                'need canonicalization.')

    @property
    def nb(self):
        '''
        The number of black balls.
        '''
        return self.n1 + self.n2 - self.nw

    @property
    def n(self):
        '''
        The total number of balls.
        '''
        return self.n1 + self.n2

    @property
    def states(self):
        '''
        The size of the state space, states are 0..nw.
        '''
        return self.nw + 1

    @property
    def balanced(self):
        '''
        True if both urns have the same capacity.
        '''
        return self.n1 == self.n2

    def check_state(self, i, name='state'):
        '''
        Raises ModelError if i is not a state index of this model.
        '''
        if not isinstance(i, numbers.Integral) or not 0 <= i <= self.nw:
            raise ModelError(f'{name} {i!r} is out of range 0..{self.nw}.')

    def as_dict(self):
        return {'n1': self.n1, 'n2': self.n2, 'nw': self.nw, 'nb': self.nb, 'n': self.n}

def new_model(n1, n2, nw):
    '''
    Creates validated model parameters.

    Raises:
        - ModelError
            For zero urn capacity or an impossible color count.

        - NeedsCanonicalizationError
            If nw > min(n1, n2).
    '''
    return ModelParams(n1, n2, nw)

@dataclass(frozen=True)
class StateRelabeling:
    '''
    Records how the states of an original parameter set map to the states of its canonical form.

    original is the (n1, n2, nw) tuple given to canonicalize(), swaps is the ordered tuple of the
    applied involutions ("color" and/or "urn") and mapping is a tuple of
    (original state, canonical state) pairs in ascending original state order.
    '''
    original: tuple
    swaps: tuple
    mapping: tuple

    def __call__(self, state):
        for original_state, canonical_state in self.mapping:
            if original_state == state:
                return canonical_state

        raise ModelError(f'State {state!r} is not a state of the original model {self.original}.')

    def inverse(self, canonical_state):
        '''
        Maps a canonical state back to the original state.
        '''
        for original_state, mapped_state in self.mapping:
            if mapped_state == canonical_state:
                return original_state

        raise ModelError(f'State {canonical_state!r} is not a canonical state.')

    @property
    def is_identity(self):
        return not self.swaps

def canonicalize(n1, n2, nw):
    '''
    Relabels a parameter set to the canonical form nw <= n1 <= n2.

    At most two involutions are composed:
        - color swap nw <-> nb, state map i -> n1 - i (black balls in urn 1)
        - urn swap n1 <-> n2, state map i -> nw - i (white balls in urn 2)

    Returns:
        (params, relabeling)

    Raises:
        - ModelError
            For invalid counts, or a single color (nw = 0 or nb = 0), whose chain has one
            state.

        - CanonicalizationError
            If min(nw, nb) > min(n1, n2), where no relabeling reaches canonical form.
    '''
    _check_counts(n1, n2, nw)

    original = (n1, n2, nw)
    nb = n1 + n2 - nw

    if min(nw, nb) == 0:
        raise ModelError(
            f'The parameters {original} have balls of a single color, the chain has one state and '
            'is not modelled.')

    if min(nw, nb) > min(n1, n2):
        raise CanonicalizationError(
            f'The parameters {original} have min(nw, nb)={min(nw, nb)} > '
            f'min(n1, n2)={min(n1, n2)}, no urn or color relabeling is canonical.')

    mapping = {state: state for state in state_range(n1, n2, nw)}
    swaps = []

    if nw > nb:
        mapping = {state: n1 - current for state, current in mapping.items()}
        nw, nb = nb, nw
        swaps.append('color')

    if n1 > n2:
        mapping = {state: nw - current for state, current in mapping.items()}
        n1, n2 = n2, n1
        swaps.append('urn')

    if nw > min(n1, n2) or sorted(mapping.values()) != list(range(nw + 1)):
        raise InternalConsistencyError(f'Canonicalization of {original} failed.')

    if swaps:
        _logger.debug('Relabeled %s to %s using %s.', original, (n1, n2, nw), swaps)

    relabeling = StateRelabeling(original, tuple(swaps), tuple(sorted(mapping.items())))

    return ModelParams(n1, n2, nw), relabeling

def transition_row(params, i, backend=Backend.EXACT):
    '''
    Returns the (p, q, r) transition probabilities out of state i: up, down and hold.
    '''
    params.check_state(i)

    return tuple(
        backend.convert(value) for value in _probabilities(params.n1, params.n2, params.nw, i))

def raw_kernel(n1, n2, nw):
    '''
    Builds the exact dense kernel of any valid parameter set over state_range(n1, n2, nw), without
    requiring canonical form.

    Returns:
        (states, matrix) where states is the list of white ball counts labelling rows and columns.
    '''
    _check_counts(n1, n2, nw)

    states = list(state_range(n1, n2, nw))
    matrix = np.full((len(states), len(states)), Fraction(0), dtype=object)

    for column, state in enumerate(states):
        p, q, r = _probabilities(n1, n2, nw, state)
        matrix[column, column] = r
        if p:
            matrix[column + 1, column] = p
        if q:
            matrix[column - 1, column] = q

    return states, matrix

@dataclass(frozen=True)
class TridiagonalKernel:
    '''
    The column stochastic transition kernel stored as its three probability vectors.

    p[i] is the probability of i -> i + 1, q[i] of i -> i - 1 and r[i] of i -> i.
    '''
    params: ModelParams
    p: tuple
    q: tuple
    r: tuple
    backend: Backend = Backend.EXACT

    @property
    def states(self):
        return len(self.p)

    def dense(self):
        '''
        Returns the dense matrix with rows as destinations and columns as sources.
        '''
        zero = self.backend.convert(0)
        matrix = np.full((self.states, self.states), zero, dtype=self.backend.dtype)

        for j in range(self.states):
            matrix[j, j] = self.r[j]
            if j + 1 < self.states:
                matrix[j + 1, j] = self.p[j]
            if j > 0:
                matrix[j - 1, j] = self.q[j]

        return matrix

    def to_float(self):
        '''
        Returns a copy of the kernel in the float backend.
        '''
        return TridiagonalKernel(
            self.params,
            tuple(float(value) for value in self.p),
            tuple(float(value) for value in self.q),
            tuple(float(value) for value in self.r),
            Backend.FLOAT,
        )

@lru_cache(maxsize=None)
def _exact_kernel(params):
    rows = [transition_row(params, i) for i in range(params.states)]
    p, q, r = (tuple(column) for column in zip(*rows))

    if q[0] != 0 or any(value < 0 for value in p + q + r):
        raise InternalConsistencyError(f'Invalid transition probabilities for {params}.')

    return TridiagonalKernel(params, p, q, r)

def build_kernel(params, backend=Backend.EXACT):
    '''
    Builds the transition kernel of the model. Every column sums to one, exactly in the exact
    backend since r is defined as the complement of p and q.
    '''
    kernel = _exact_kernel(params)

    if Backend.parse(backend) is Backend.FLOAT:
        return kernel.to_float()

    return kernel

@dataclass(frozen=True)
class DistributionVector:
    '''
    A probability vector over the states 0..nw.
    '''
    weights: tuple
    backend: Backend = Backend.EXACT

    def __post_init__(self):
        if self.backend is Backend.EXACT:
            if any(weight < 0 for weight in self.weights):
                raise ModelError('Distribution weights must be non-negative.')
            if sum(self.weights) != 1:
                raise ModelError(f'Distribution weights sum to {sum(self.weights)}, not 1.')
        else:
            if any(weight < -FLOAT_TOLERANCE for weight in self.weights):
                raise ModelError('Distribution weights must be non-negative.')
            if abs(math.fsum(self.weights) - 1) > FLOAT_TOLERANCE:
                raise ModelError(f'Distribution weights sum to {math.fsum(self.weights)}, not 1.')

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, index):
        return self.weights[index]

    def __iter__(self):
        return iter(self.weights)

    def to_float(self):
        return DistributionVector(tuple(float(weight) for weight in self.weights), Backend.FLOAT)

    def as_array(self):
        return self.backend.array(self.weights)

    @classmethod
    def point_mass(cls, states, j, backend=Backend.EXACT):
        '''
        Returns the distribution concentrated on state j.
        '''
        return cls(
            tuple(backend.convert(int(i == j)) for i in range(states)),
            backend,
        )

@lru_cache(maxsize=None)
def _exact_stationary(params):
    total = math.comb(params.n, params.n1)

    weights = tuple(
        Fraction(math.comb(params.nw, i) * math.comb(params.n - params.nw, params.n1 - i), total)
        for i in range(params.states)
    )

    return DistributionVector(weights)

def stationary_distribution(params, backend=Backend.EXACT):
    '''
    Returns the stationary distribution, the hypergeometric law

        pi_i = C(nw, i) C(n - nw, n1 - i) / C(n, n1).
    '''
    distribution = _exact_stationary(params)

    if Backend.parse(backend) is Backend.FLOAT:
        return distribution.to_float()

    return distribution

def canonical_params(max_n):
    '''
    Yields every canonical parameter set with n1 + n2 <= max_n, in lexicographic order.
    '''
    for n1 in range(1, max_n):
        for n2 in range(1, max_n - n1 + 1):
            for nw in range(1, min(n1, n2) + 1):
                yield ModelParams(n1, n2, nw)
