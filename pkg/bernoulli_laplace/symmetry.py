'''
Licensed under the MIT License, see LICENSE in the project root for full license.

The symmetrizing transform of the kernel and the spectral decomposition built on it.

With D = diag(sqrt(pi_i)), detailed balance makes Z = D^-1 T D symmetric. The right eigenvectors
c_k are orthogonal under the weights 1/pi_i, with the orthogonal measure

    Delta_k^-2 = sum_i c_k(i)^2 / pi_i,

and any power of the kernel decomposes as

    T^m_ij = (1 / pi_j) sum_k Delta_k^2 lambda_k^m c_k(i) c_k(j).

Square roots only appear through Delta_k and sqrt(pi_i). Everything that can be stated without
them (Delta_k^2, products v_k(i) v_k(j), the orthogonality relation, exact matrix powers) is exact.
The orthonormal vectors w_k and the matrix Z are float. Long horizon evaluation goes through
PreciseSystem, an mpmath copy of the eigen system at a precision derived from the smallest
stationary weight, since the sums cancel catastrophically in binary64.
'''

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from mpmath.ctx_mp import MPContext

from .core import Backend, build_kernel, stationary_distribution
from .errors import InternalConsistencyError, ModelError
from .spectral import eigen_basis

_logger = logging.getLogger(__name__)

DEFAULT_GUARD_DIGITS = 30

@dataclass(frozen=True)
class RadicalScalar:
    '''
    The exact value coefficient * sqrt(radicand), radicand > 0.
    '''
    coefficient: Fraction
    radicand: Fraction

    def __float__(self):
        return float(self.coefficient) * math.sqrt(self.radicand)

    def squared(self):
        '''
        Returns the exact square.
        '''
        return self.coefficient ** 2 * self.radicand

    def exact(self):
        '''
        Returns the value as a Fraction. Only possible when the radicand is the square of a
        rational (or the coefficient is zero).
        '''
        if self.coefficient == 0:
            return Fraction(0)

        radicand = Fraction(self.radicand)
        numerator_root = math.isqrt(radicand.numerator)
        denominator_root = math.isqrt(radicand.denominator)
        if numerator_root ** 2 != radicand.numerator or \
                denominator_root ** 2 != radicand.denominator:
            raise ValueError(f'sqrt({radicand}) is irrational.')

        return self.coefficient * Fraction(numerator_root, denominator_root)

@dataclass(frozen=True)
class ScaledVector:
    '''
    The exact vector sqrt(scale_sq) * values.
    '''
    scale_sq: Fraction
    values: tuple

    def __len__(self):
        return len(self.values)

    def entry(self, i):
        return RadicalScalar(self.values[i], self.scale_sq)

    def squares(self):
        '''
        Returns the exact squares of the entries.
        '''
        return tuple(self.scale_sq * value * value for value in self.values)

    def dot(self, weights):
        '''
        Returns the exact sum_i weights[i] * self[i].
        '''
        if len(weights) != len(self.values):
            raise ModelError(f'Length mismatch: {len(weights)} weights for {len(self)} entries.')

        return RadicalScalar(
            sum(Fraction(weight) * value for weight, value in zip(weights, self.values)),
            self.scale_sq)

    def to_float(self):
        scale = math.sqrt(self.scale_sq)
        return np.array([scale * float(value) for value in self.values], dtype=np.float64)

def delta_sq(params, c_k):
    '''
    Returns the orthogonal measure Delta_k^2 = 1 / sum_i c_k(i)^2 / pi_i.

    Delta_k^2 scales as 1 / s^2 when c_k is scaled by s, so Delta_k^2 c_k(i) c_k(j) does not depend
    on the normalization of c_k.
    '''
    pi = stationary_distribution(params).weights
    values = tuple(c_k)

    if len(values) != len(pi):
        raise ModelError(f'Eigenvector length {len(values)} does not match {len(pi)} states.')

    total = sum(Fraction(value) ** 2 / weight for value, weight in zip(values, pi))
    if total == 0:
        raise ModelError('Delta^2 is undefined for the zero vector.')

    return 1 / total

@dataclass(frozen=True)
class SymmetricEigenSystem:
    '''
    The symmetrized eigen system of a model.

    Attributes:
        - delta_sq
            Exact Delta_k^2 for k = 0..nw.

        - c
            The right eigenvectors as exact tuples, with signs chosen so that the first nonzero
            entry is positive (w_k(0) > 0 whenever c_k(0) != 0).

        - v
            The pi-orthonormal right system v_k(i) = Delta_k c_k(i) / pi_i as ScaledVector.

        - w
            Float matrix whose columns are the orthonormal eigenvectors
            w_k(i) = Delta_k c_k(i) / sqrt(pi_i) of Z.
    '''
    params: object
    eigenvalues: tuple
    delta_sq: tuple
    c: tuple
    v: tuple
    w: np.ndarray

    def v_product(self, k, i, j):
        '''
        Returns the exact product v_k(i) v_k(j).
        '''
        vector = self.v[k]
        return vector.scale_sq * vector.values[i] * vector.values[j]

    def v_float(self):
        '''
        Returns a float matrix whose columns are the v_k.
        '''
        return np.column_stack([vector.to_float() for vector in self.v])

def _orient(values):
    '''
    Flips a vector so that its first nonzero entry is positive.
    '''
    for value in values:
        if value != 0:
            return values if value > 0 else tuple(-entry for entry in values)

    raise InternalConsistencyError('An eigenvector vanished.')

def symmetric_system(params, basis=None):
    '''
    Builds the SymmetricEigenSystem from an eigen basis (eigen_basis(params) by default).
    '''
    if basis is None:
        basis = eigen_basis(params)

    return _symmetric_system(params, basis)

@lru_cache(maxsize=None)
def _symmetric_system(params, basis):
    pi = stationary_distribution(params).weights

    delta_sqs = []
    vectors = []
    v = []
    w = np.zeros((params.states, params.states), dtype=np.float64)

    for k, vector in enumerate(basis.c):
        values = _orient(tuple(vector.values))
        measure = delta_sq(params, values)

        delta_sqs.append(measure)
        vectors.append(values)
        v.append(ScaledVector(measure, tuple(value / weight for value, weight in zip(values, pi))))

        for i, (value, weight) in enumerate(zip(values, pi)):
            magnitude = math.sqrt(measure * value * value / weight)
            w[i, k] = magnitude if value >= 0 else -magnitude

    return SymmetricEigenSystem(
        params, basis.spectrum.values, tuple(delta_sqs), tuple(vectors), tuple(v), w)

def orthogonality_matrix(params):
    '''
    Returns the exact matrix sum_k Delta_k^2 c_k(i) c_k(j), which equals diag(pi).
    '''
    system = symmetric_system(params)
    states = params.states

    return Backend.EXACT.array([
        [
            sum(system.delta_sq[k] * system.c[k][i] * system.c[k][j] for k in range(states))
            for j in range(states)
        ]
        for i in range(states)
    ])

def left_eigenvector(params, k):
    '''
    Returns the left eigenvector c_k(i) / pi_i of the kernel, l T = lambda_k l.
    '''
    params.check_state(k, name='Eigen index')
    pi = stationary_distribution(params).weights
    c = eigen_basis(params).c[k].values

    return tuple(value / weight for value, weight in zip(c, pi))

def diagonalize(params):
    '''
    Returns (S, L, S_inv) with S L S_inv = T exactly, where S has the right eigenvectors as
    columns and S_inv = diag(Delta^2) C^t diag(1 / pi).
    '''
    basis = eigen_basis(params)
    system = symmetric_system(params, basis)
    states = params.states

    # Delta_k^2 does not depend on the sign of c_k, the basis vectors can be used as they are.
    s_inv = []
    for k in range(states):
        left = left_eigenvector(params, k)
        s_inv.append([system.delta_sq[k] * value for value in left])

    return basis.matrix(), basis.eigenvalue_matrix(), Backend.EXACT.array(s_inv)

def symmetrized_matrix(params):
    '''
    Returns the float matrix Z = D^-1 T D, Z_ij = sqrt(pi_j / pi_i) T_ij, which is symmetric.
    '''
    pi = stationary_distribution(params).weights
    kernel = build_kernel(params).dense()
    states = params.states

    matrix = np.zeros((states, states), dtype=np.float64)
    for i in range(states):
        for j in range(states):
            if kernel[i, j] != 0:
                matrix[i, j] = math.sqrt(pi[j] * kernel[i, j] ** 2 / pi[i])

    return matrix

class PreciseSystem:
    '''
    An mpmath copy of the pi-orthonormal eigen system used to evaluate spectral sums in the float
    backend.

    The precision is guard_digits decimal digits above log10(1 / min pi_i), which bounds the
    cancellation in sum_k lambda_k^m v_k(i) v_k(j). Terms with |lambda_k|^m below the working
    precision are skipped.
    '''
    def __init__(self, params, guard_digits=DEFAULT_GUARD_DIGITS):
        self.params = params

        pi = stationary_distribution(params).weights
        self.magnitude = max(
            math.log10(weight.denominator) - math.log10(weight.numerator) for weight in pi)

        self.context = MPContext()
        self.context.dps = int(math.ceil(self.magnitude)) + guard_digits

        # Natural log threshold below which |lambda_k|^m is negligible.
        self._cutoff = (self.magnitude + guard_digits) * math.log(10)

        system = symmetric_system(params)
        mpf = self.context.mpf

        def convert(value):
            value = Fraction(value)
            return mpf(value.numerator) / value.denominator

        self.pi = tuple(convert(weight) for weight in pi)
        self.eigenvalues = tuple(convert(value) for value in system.eigenvalues)
        self._log_moduli = tuple(
            math.log(abs(value)) if value != 0 else -math.inf for value in system.eigenvalues)

        # rows[i][k] = v_k(i)
        columns = []
        for vector in system.v:
            scale = self.context.sqrt(convert(vector.scale_sq))
            columns.append([scale * convert(value) for value in vector.values])
        self.rows = tuple(tuple(column[i] for column in columns) for i in range(params.states))

        _logger.debug(
            'Precise system for %s at %d digits.', params, self.context.dps)

    def active(self, m, include_stationary=False):
        '''
        Returns the eigen indices whose terms are not negligible after m steps.
        '''
        first = 0 if include_stationary else 1

        if m == 0:
            return list(range(first, self.params.states))

        return [
            k for k in range(first, self.params.states)
            if m * self._log_moduli[k] > -self._cutoff
        ]

    def deviation(self, j, m):
        '''
        Returns [rho_m(i; j) - pi_i for i = 0..nw] as mpf values.
        '''
        active = self.active(m)
        if not active:
            return [self.context.zero] * self.params.states

        start = self.rows[j]
        weights = [self.eigenvalues[k] ** m * start[k] for k in active]

        return [
            self.pi[i] * self.context.fdot(weights, [row[k] for k in active])
            for i, row in enumerate(self.rows)
        ]

    def column(self, j, m):
        '''
        Returns [rho_m(i; j) for i = 0..nw] as mpf values.
        '''
        return [weight + deviation for weight, deviation in zip(self.pi, self.deviation(j, m))]

    def moment(self, k, j, m):
        '''
        Returns sum_i v_k(i) rho_m(i; j) as an mpf value.
        '''
        column = self.column(j, m)
        return self.context.fdot(column, [row[k] for row in self.rows])

@lru_cache(maxsize=None)
def precise_system(params, guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    Returns the (cached) PreciseSystem of the model.
    '''
    return PreciseSystem(params, guard_digits)

def spectral_power(params, m, backend=Backend.EXACT, guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    Returns T^m from the spectral decomposition,

        T^m_ij = (1 / pi_j) sum_k Delta_k^2 lambda_k^m c_k(i) c_k(j).

    The exact backend sums rationals in ascending k. The float backend evaluates the same sums
    through PreciseSystem and rounds each entry once to binary64.
    '''
    backend = Backend.parse(backend)
    if m < 0:
        raise ModelError(f'The step count must be non-negative, got {m}.')

    states = params.states

    if backend is Backend.FLOAT:
        system = precise_system(params, guard_digits)
        matrix = np.zeros((states, states), dtype=np.float64)
        for j in range(states):
            matrix[:, j] = [float(value) for value in system.column(j, m)]
        return matrix

    system = symmetric_system(params)
    pi = stationary_distribution(params).weights
    powers = [value ** m for value in system.eigenvalues]

    weighted = [
        [system.delta_sq[k] * powers[k] * system.c[k][i] for k in range(states)]
        for i in range(states)
    ]

    return Backend.EXACT.array([
        [
            sum(weighted[i][k] * system.c[k][j] for k in range(states)) / pi[j]
            for j in range(states)
        ]
        for i in range(states)
    ])
