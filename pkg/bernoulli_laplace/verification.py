'''
Licensed under the MIT License, see LICENSE in the project root for full license.

The exact invariant suite behind the "verify" command.

Every check runs over all canonical parameter sets with n1 + n2 <= max_n and either returns
normally or raises VerificationError (or another package error) describing the first failure.
'''

import logging
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Backend,
    build_kernel,
    canonical_params,
    canonicalize,
    raw_kernel,
    stationary_distribution,
)
from .errors import BernoulliLaplaceError, CanonicalizationError, VerificationError
from .mixing import (
    distribution_at,
    eigen_moment,
    first_eigenvector_profile,
    square_decomposition,
    tv_distance,
    variance_under,
)
from .oracle import charpoly_residual, dense_power
from .spectral import (
    b_closed_form,
    b_recursion,
    c_hypergeometric,
    c_to_b,
    eigen_basis,
    inverse_pascal_transform,
    pascal_similarity,
    pascal_transform,
    pascal_to_c,
    proportionality,
    spectrum,
    triangularized_matrix,
)
from .symmetry import (
    delta_sq,
    diagonalize,
    orthogonality_matrix,
    spectral_power,
    symmetric_system,
    symmetrized_matrix,
)

_logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 12
DEFAULT_MAX_M = 20

# Relative tolerance of the float kernel against the exact one.
BACKEND_TOLERANCE = 1e-15

@dataclass(frozen=True)
class CheckResult:
    '''
    The outcome of one invariant over every parameter set of the suite.
    '''
    name: str
    passed: bool
    cases: int
    detail: str = ''

def _require(condition, message):
    if not condition:
        raise VerificationError(message)

def _dense_equal(a, b):
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))

def _apply(matrix, vector):
    return [sum(row[j] * vector[j] for j in range(len(vector))) for row in matrix]

def check_column_stochastic(params, max_m):
    kernel = build_kernel(params).dense()
    for j in range(params.states):
        _require(sum(kernel[:, j]) == 1, f'{params}: column {j} does not sum to 1.')

def check_detailed_balance(params, max_m):
    kernel = build_kernel(params).dense()
    pi = stationary_distribution(params).weights
    for i in range(params.states):
        for j in range(params.states):
            _require(kernel[i, j] * pi[j] == kernel[j, i] * pi[i],
                     f'{params}: detailed balance fails at ({i}, {j}).')

def check_fixed_point(params, max_m):
    kernel = build_kernel(params).dense()
    pi = stationary_distribution(params).weights
    _require(tuple(_apply(kernel, pi)) == pi, f'{params}: T pi != pi.')

def check_canonicalization(params, max_m):
    '''
    Every raw parameter set that relabels to params has the conjugated kernel.
    '''
    canonical = build_kernel(params).dense()
    n1, n2, nw, n = params.n1, params.n2, params.nw, params.n

    for raw in {(n1, n2, nw), (n2, n1, nw), (n1, n2, n - nw), (n2, n1, n - nw)}:
        try:
            target, relabeling = canonicalize(*raw)
        except CanonicalizationError:
            continue
        if target != params:
            continue

        states, matrix = raw_kernel(*raw)
        for a, source in enumerate(states):
            for b, destination in enumerate(states):
                _require(
                    matrix[b, a] == canonical[relabeling(destination), relabeling(source)],
                    f'{raw} -> {params}: relabeled kernel differs at ({destination}, {source}).')

def check_backend_consistency(params, max_m):
    exact = build_kernel(params)
    converted = exact.to_float()
    for values, floats in ((exact.p, converted.p), (exact.q, converted.q), (exact.r, converted.r)):
        for value, approximation in zip(values, floats):
            _require(abs(approximation - value) <= BACKEND_TOLERANCE * abs(value),
                     f'{params}: float kernel entry {approximation} differs from {value}.')

def check_eigen_equation(params, max_m):
    kernel = build_kernel(params).dense()
    basis = eigen_basis(params)
    for k, vector in enumerate(basis.c):
        _require(_apply(kernel, vector.values) == [basis.spectrum[k] * x for x in vector.values],
                 f'{params}: T c_{k} != lambda_{k} c_{k} for the Pascal construction.')

def check_hypergeometric_agreement(params, max_m):
    kernel = build_kernel(params).dense()
    basis = eigen_basis(params)
    for k in range(params.states):
        vector = c_hypergeometric(params, k).values
        _require(_apply(kernel, vector) == [basis.spectrum[k] * x for x in vector],
                 f'{params}: T c_{k} != lambda_{k} c_{k} for the hypergeometric construction.')
        _require(proportionality(vector, basis.c[k].values) is not None,
                 f'{params}: the two constructions of c_{k} are not parallel.')

def check_spectrum_simplicity(params, max_m):
    values = spectrum(params).values
    _require(len(set(values)) == len(values), f'{params}: repeated eigenvalue in {values}.')
    _require(all(a > b for a, b in zip(values, values[1:])),
             f'{params}: eigenvalues are not strictly decreasing.')

def check_triangularization(params, max_m):
    similarity = pascal_similarity(params)
    _require(_dense_equal(similarity, triangularized_matrix(params)),
             f'{params}: P T P^-1 differs from the closed form triangular matrix.')
    values = spectrum(params).values
    _require(tuple(similarity[k, k] for k in range(params.states)) == values,
             f'{params}: the triangular diagonal is not the spectrum.')

def check_pascal_round_trip(params, max_m):
    vector = tuple(Fraction((-1) ** i * (i + 1), i + 2) for i in range(params.states))
    _require(inverse_pascal_transform(pascal_transform(vector)) == vector,
             f'{params}: P^-1 P changes the vector {vector}.')
    for b in eigen_basis(params).b:
        _require(c_to_b(pascal_to_c(b)).values == b.values,
                 f'{params}: Pascal round trip changes b_{b.k}.')

def check_recursion_consistency(params, max_m):
    for k in range(params.states):
        _require(b_recursion(params, k) == b_closed_form(params, k),
                 f'{params}: recursion and closed form of b_{k} disagree.')

def check_charpoly_roots(params, max_m):
    kernel = build_kernel(params)
    values = spectrum(params).values
    for k, value in enumerate(values):
        _require(charpoly_residual(kernel, value) == 0,
                 f'{params}: det(T - lambda_{k} I) != 0.')
    for upper, lower in zip(values, values[1:]):
        middle = (upper + lower) / 2
        _require(charpoly_residual(kernel, middle) != 0,
                 f'{params}: det(T - {middle} I) = 0 between two eigenvalues.')

def check_orthogonality(params, max_m):
    pi = stationary_distribution(params).weights
    matrix = orthogonality_matrix(params)
    for i in range(params.states):
        for j in range(params.states):
            _require(matrix[i, j] == (pi[j] if i == j else 0),
                     f'{params}: orthogonality relation fails at ({i}, {j}).')

def check_measure_positivity(params, max_m):
    system = symmetric_system(params)
    _require(all(value > 0 for value in system.delta_sq), f'{params}: Delta^2 is not positive.')

def check_normalization_invariance(params, max_m):
    system = symmetric_system(params)
    scale = Fraction(-3, 7)
    for k, vector in enumerate(system.c):
        scaled = tuple(scale * value for value in vector)
        measure = delta_sq(params, scaled)
        for i in range(params.states):
            for j in range(params.states):
                _require(measure * scaled[i] * scaled[j] ==
                         system.delta_sq[k] * vector[i] * vector[j],
                         f'{params}: Delta_{k}^2 c_{k} c_{k}^t depends on the scale of c_{k}.')

def check_symmetrization(params, max_m):
    kernel = build_kernel(params).dense()
    pi = stationary_distribution(params).weights
    matrix = symmetrized_matrix(params)
    for i in range(params.states):
        for j in range(params.states):
            # Z_ij^2 = pi_j T_ij^2 / pi_i exactly.
            _require(pi[j] * kernel[i, j] ** 2 / pi[i] == pi[i] * kernel[j, i] ** 2 / pi[j],
                     f'{params}: Z_{i}{j}^2 != Z_{j}{i}^2.')
            _require(abs(matrix[i, j] - matrix[j, i]) <= 1e-15,
                     f'{params}: float Z is not symmetric at ({i}, {j}).')

def check_diagonalization(params, max_m):
    s, eigenvalues, s_inv = diagonalize(params)
    _require(_dense_equal(s.dot(eigenvalues).dot(s_inv), build_kernel(params).dense()),
             f'{params}: S L S^-1 != T.')

def check_spectral_power(params, max_m):
    kernel = build_kernel(params)
    power = dense_power(kernel, 0)
    matrix = kernel.dense()
    for m in range(max_m + 1):
        _require(_dense_equal(spectral_power(params, m), power),
                 f'{params}: spectral power differs from the dense power at m={m}.')
        for j in range(params.states):
            _require(distribution_at(params, j, m).weights == tuple(power[:, j]),
                     f'{params}: rho_{m}(.; {j}) differs from the dense power.')
        power = matrix.dot(power)

def check_square_sum_identity(params, max_m):
    system = symmetric_system(params)
    pi = stationary_distribution(params).weights
    for i in range(params.states):
        total = sum(system.v[k].squares()[i] for k in range(1, params.states))
        _require(total == 1 / pi[i] - 1, f'{params}: sum_k v_k({i})^2 != 1 / pi_{i} - 1.')

def check_eigen_moments(params, max_m):
    system = symmetric_system(params)
    for k in range(params.states):
        for j in range(params.states):
            for m in range(max_m + 1):
                eigen_moment(params, j, m, k, Backend.EXACT, system)

def check_tv_distance(params, max_m):
    pi = stationary_distribution(params)
    _require(tv_distance(pi, pi) == 0, f'{params}: tv(pi, pi) != 0.')
    for j in range(params.states):
        for m in (0, 1, max_m):
            rho = distribution_at(params, j, m)
            forward, backward = tv_distance(rho, pi), tv_distance(pi, rho)
            _require(forward == backward and 0 <= forward <= 1,
                     f'{params}: tv(rho_{m}(.; {j}), pi) = {forward}, reversed {backward}.')

def check_first_eigenvector(params, max_m):
    _, center = first_eigenvector_profile(params)
    _require(center == Fraction(params.n1 * params.nw, params.n),
             f'{params}: v_1 vanishes at {center}, not at n1 nw / n.')
    variance = variance_under(stationary_distribution(params), symmetric_system(params).v[1])
    _require(variance == 1, f'{params}: Var_pi(v_1) = {variance}, not 1.')

    if params.balanced and params.nw >= 2:
        _, b = square_decomposition(params)
        _require(b == 1, f'{params}: v_1^2 = A v_2 + B with B = {b}, not 1.')

CHECKS = (
    ('column stochastic', check_column_stochastic),
    ('detailed balance', check_detailed_balance),
    ('fixed point', check_fixed_point),
    ('canonicalization soundness', check_canonicalization),
    ('backend consistency', check_backend_consistency),
    ('eigen equation (Pascal)', check_eigen_equation),
    ('eigen equation (hypergeometric)', check_hypergeometric_agreement),
    ('spectrum simplicity', check_spectrum_simplicity),
    ('triangularization', check_triangularization),
    ('Pascal round trip', check_pascal_round_trip),
    ('recursion consistency', check_recursion_consistency),
    ('characteristic polynomial roots', check_charpoly_roots),
    ('orthogonality relation', check_orthogonality),
    ('measure positivity', check_measure_positivity),
    ('normalization invariance', check_normalization_invariance),
    ('symmetrization', check_symmetrization),
    ('diagonalization', check_diagonalization),
    ('spectral power', check_spectral_power),
    ('square sum identity', check_square_sum_identity),
    ('eigen moments', check_eigen_moments),
    ('total variation distance', check_tv_distance),
    ('first eigenvector', check_first_eigenvector),
)

def run_suite(max_n=DEFAULT_MAX_N, max_m=DEFAULT_MAX_M, checks=CHECKS):
    '''
    Runs every check over every canonical parameter set with n1 + n2 <= max_n.

    Parameters:
        - max_n
            The largest total ball count.

        - max_m
            The largest step count for the matrix power and moment checks.

        - checks
            (name, function) pairs, CHECKS by default.

    Yields:
        A CheckResult per check, in order. A check stops at its first failing parameter set.
    '''
    all_params = list(canonical_params(max_n))

    for name, check in checks:
        _logger.info('Checking %s over %d parameter sets.', name, len(all_params))

        cases = 0
        failure = None
        for params in all_params:
            try:
                check(params, max_m)
            except BernoulliLaplaceError as error:
                failure = f'{type(error).__name__}: {error}'
                break
            cases += 1

        if failure is None:
            yield CheckResult(name, True, cases)
        else:
            yield CheckResult(name, False, cases, failure)
