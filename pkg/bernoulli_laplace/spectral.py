'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Closed form eigenvalues and right eigenvectors of the Bernoulli-Laplace kernel.

Writing a right eigenvector c_k as the coefficients of sum_i c_k(i) x^i y^(n1 - i) z^(nw - i) and
substituting x = u + yz turns the eigenproblem into a lower triangular one. On coefficient vectors
the substitution is the upper triangular Pascal matrix P, b_j = sum_{i >= j} C(i, j) c_i, so that

    P T P^-1 = T'

is lower triangular with the eigenvalues on its diagonal. The triangular eigenvectors b_k are
solved by forward substitution and mapped back with P^-1.

Every vector here is exact (fractions.Fraction). Use Backend.FLOAT only for the returned matrices.
'''

import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import Backend, build_kernel
from .errors import InternalConsistencyError, ModelError

_logger = logging.getLogger(__name__)

def _check_k(params, k):
    if not isinstance(k, numbers.Integral) or not 0 <= k <= params.nw:
        raise ModelError(f'Eigen index k={k!r} is out of range 0..{params.nw}.')

def pochhammer(a, m):
    '''
    The rising factorial (a)_m = a (a + 1) ... (a + m - 1), with (a)_0 = 1.

    Returns zero as soon as a factor vanishes, so that nonpositive integer arguments terminate.
    '''
    result = 1
    for offset in range(m):
        factor = a + offset
        if factor == 0:
            return 0
        result *= factor

    return result

def eigenvalue(params, k, backend=Backend.EXACT):
    '''
    Returns lambda_k = 1 - k (n - k + 1) / (n1 n2).
    '''
    _check_k(params, k)

    value = 1 - Fraction(k * (params.n - k + 1), params.n1 * params.n2)

    return Backend.parse(backend).convert(value)

@dataclass(frozen=True)
class Spectrum:
    '''
    The eigenvalues lambda_0 > lambda_1 > ... > lambda_nw.
    '''
    values: tuple
    backend: Backend = Backend.EXACT

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    @property
    def periodic(self):
        '''
        True if some eigenvalue other than lambda_0 lies on the unit circle.
        '''
        return any(abs(value) == 1 for value in self.values[1:])

def spectrum(params, backend=Backend.EXACT):
    '''
    Returns the full spectrum in the order k = 0..nw.
    '''
    backend = Backend.parse(backend)

    return Spectrum(tuple(eigenvalue(params, k, backend) for k in range(params.states)), backend)

@dataclass(frozen=True)
class TriangularCoefficients:
    '''
    The eigenvector b of the triangularized matrix for eigen index k. values[i] is zero for i < k
    and values[k] is one.
    '''
    k: int
    values: tuple

    def __len__(self):
        return len(self.values)

@dataclass(frozen=True)
class EigenVectorOriginal:
    '''
    A right eigenvector c of the kernel, T c = lambda_k c.
    '''
    k: int
    values: tuple

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

def b_recursion(params, k):
    '''
    Solves the triangular system by forward substitution,

        b_j = b_(j-1) * -(n1 - j + 1)(nw - j + 1) / ((j - k)(j + k - n - 1)).
    '''
    _check_k(params, k)

    values = [Fraction(0)] * params.states
    values[k] = Fraction(1)

    for j in range(k + 1, params.states):
        denominator = (j - k) * (j + k - params.n - 1)
        if denominator == 0:
            raise InternalConsistencyError(
                f'Vanishing recursion denominator at j={j}, k={k} for {params}.')

        values[j] = values[j - 1] * Fraction(
            -(params.n1 - j + 1) * (params.nw - j + 1), denominator)

    return values

def b_closed_form(params, k):
    '''
    The closed form

        b_i = (-1)^(i-k) (k - n1)_(i-k) (k - nw)_(i-k) / ((i - k)! (2k - n)_(i-k)).
    '''
    _check_k(params, k)

    values = [Fraction(0)] * params.states

    for i in range(k, params.states):
        length = i - k
        denominator = math.factorial(length) * pochhammer(2 * k - params.n, length)
        if denominator == 0:
            raise InternalConsistencyError(
                f'Vanishing Pochhammer denominator at i={i}, k={k} for {params}.')

        numerator = pochhammer(k - params.n1, length) * pochhammer(k - params.nw, length)
        values[i] = Fraction((-1) ** length * numerator, denominator)

    return values

@lru_cache(maxsize=None)
def b_coefficients(params, k):
    '''
    Returns the triangular space eigenvector for eigen index k, normalized to b_k = 1.

    Both the recursion and the Pochhammer closed form are evaluated and must agree exactly.
    '''
    _check_k(params, k)

    product_form = b_recursion(params, k)
    closed_form = b_closed_form(params, k)

    if product_form != closed_form:
        raise InternalConsistencyError(
            f'Recursion and closed form triangular coefficients disagree for {params}, k={k}.')

    return TriangularCoefficients(k, tuple(closed_form))

def inverse_pascal_transform(values):
    '''
    Applies P^-1 to a coefficient vector: c_i = sum_{j >= i} (-1)^(j-i) C(j, i) b_j.

    The sum is done in integers after clearing the common denominator.
    '''
    values = [Fraction(value) for value in values]
    denominator = math.lcm(*(value.denominator for value in values))
    scaled = [int(value * denominator) for value in values]

    result = []
    for i in range(len(scaled)):
        total = 0
        for j in range(i, len(scaled)):
            term = math.comb(j, i) * scaled[j]
            total += -term if (j - i) % 2 else term
        result.append(Fraction(total, denominator))

    return tuple(result)

def pascal_transform(values):
    '''
    Applies P to a coefficient vector: b_j = sum_{i >= j} C(i, j) c_i. Inverse of
    inverse_pascal_transform().
    '''
    values = [Fraction(value) for value in values]
    denominator = math.lcm(*(value.denominator for value in values))
    scaled = [int(value * denominator) for value in values]

    return tuple(
        Fraction(sum(math.comb(i, j) * scaled[i] for i in range(j, len(scaled))), denominator)
        for j in range(len(scaled))
    )

def pascal_to_c(b):
    '''
    Maps triangular coefficients to the right eigenvector of the kernel.
    '''
    return EigenVectorOriginal(b.k, inverse_pascal_transform(b.values))

def c_to_b(c):
    '''
    Maps a right eigenvector back to its triangular coefficients.
    '''
    return TriangularCoefficients(c.k, pascal_transform(c.values))

def pascal_matrix(size, backend=Backend.EXACT):
    '''
    The upper triangular Pascal matrix P with P[j, i] = C(i, j), so that b = P c.
    '''
    backend = Backend.parse(backend)

    return backend.array([
        [math.comb(i, j) for i in range(size)]
        for j in range(size)
    ])

def inverse_pascal_matrix(size, backend=Backend.EXACT):
    '''
    The inverse of pascal_matrix(), with entries (-1)^(j-i) C(j, i).
    '''
    backend = Backend.parse(backend)

    return backend.array([
        [(-1) ** (j - i) * math.comb(j, i) if j >= i else 0 for j in range(size)]
        for i in range(size)
    ])

@lru_cache(maxsize=None)
def c_hypergeometric(params, k):
    '''
    The right eigenvector in hypergeometric form, the coefficients of
    (x - 1)^k 2F1(k - n1, k - nw; n2 - nw + 1; x):

        c_i = sum_s C(k, s) (-1)^s (k - n1)_(i-s) (k - nw)_(i-s) / ((n2 - nw + 1)_(i-s) (i - s)!)

    This vector is a nonzero multiple of pascal_to_c(b_coefficients(params, k)), it is not
    normalized.
    '''
    _check_k(params, k)

    if params.n2 < params.nw:
        raise ModelError(f'The hypergeometric form needs n2 >= nw, got {params}.')

    lower = params.n2 - params.nw + 1
    values = []
    for i in range(params.states):
        total = Fraction(0)
        for s in range(min(k, i) + 1):
            length = i - s
            numerator = pochhammer(k - params.n1, length)
            if numerator == 0:
                continue
            numerator *= pochhammer(k - params.nw, length)
            if numerator == 0:
                continue

            term = Fraction(
                math.comb(k, s) * numerator,
                pochhammer(lower, length) * math.factorial(length))
            total += -term if s % 2 else term
        values.append(total)

    return EigenVectorOriginal(k, tuple(values))

def proportionality(vector, reference):
    '''
    Returns the factor s with vector = s * reference, or None if the vectors are not parallel (or
    the reference is zero).
    '''
    vector = tuple(vector)
    reference = tuple(reference)

    if len(vector) != len(reference):
        return None

    for value, reference_value in zip(vector, reference):
        if reference_value != 0:
            factor = Fraction(value) / Fraction(reference_value)
            break
    else:
        return None

    if factor == 0 or any(v != factor * r for v, r in zip(vector, reference)):
        return None

    return factor

def triangularized_matrix(params, backend=Backend.EXACT):
    '''
    Returns the lower triangular T' = P T P^-1 from its closed form:

        T'_ii     = 1 - (i (nw - i) + (nb + 1) i) / (n1 n2)
        T'_i,i-1  = (n1 - i + 1)(nw - i + 1) / (n1 n2)
    '''
    backend = Backend.parse(backend)
    denominator = params.n1 * params.n2

    rows = []
    for i in range(params.states):
        row = [0] * params.states
        row[i] = 1 - Fraction(i * (params.nw - i) + (params.nb + 1) * i, denominator)
        if i > 0:
            row[i - 1] = Fraction((params.n1 - i + 1) * (params.nw - i + 1), denominator)
        rows.append(row)

    return backend.array(rows)

def pascal_similarity(params, backend=Backend.EXACT):
    '''
    Computes P T P^-1 by explicit matrix products, for comparison with triangularized_matrix().
    '''
    backend = Backend.parse(backend)
    kernel = build_kernel(params, backend).dense()

    return pascal_matrix(params.states, backend).dot(kernel).dot(
        inverse_pascal_matrix(params.states, backend))

@dataclass(frozen=True)
class EigenBasis:
    '''
    The complete eigen system of the kernel: eigenvalues, triangular coefficients b_k and right
    eigenvectors c_k = P^-1 b_k for k = 0..nw.
    '''
    params: object
    spectrum: Spectrum
    b: tuple
    c: tuple

    def matrix(self, backend=Backend.EXACT):
        '''
        Returns the matrix S whose k-th column is c_k.
        '''
        backend = Backend.parse(backend)

        return backend.array([
            [vector.values[i] for vector in self.c]
            for i in range(self.params.states)
        ])

    def eigenvalue_matrix(self, backend=Backend.EXACT):
        '''
        Returns the diagonal matrix of eigenvalues.
        '''
        backend = Backend.parse(backend)
        size = len(self.spectrum)

        return backend.array([
            [self.spectrum[k] if k == l else 0 for l in range(size)]
            for k in range(size)
        ])

@lru_cache(maxsize=None)
def eigen_basis(params):
    '''
    Builds the exact eigen basis of the kernel. The k = 0 column equals the stationary
    distribution since sum_i c_0(i) = b_0 = 1.
    '''
    _logger.debug('Building the eigen basis for %s.', params)

    b = tuple(b_coefficients(params, k) for k in range(params.states))
    c = tuple(pascal_to_c(coefficients) for coefficients in b)

    return EigenBasis(params, spectrum(params), b, c)
