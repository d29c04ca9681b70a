'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Distributions after m steps, total variation distance to stationarity, the mixing time bounds of
the balanced chain (n1 = n2) and the eigen moment identities used to prove them.

Starting from state j, the distribution after m steps is

    rho_m(i; j) = pi_i + pi_i sum_{k >= 1} lambda_k^m v_k(i) v_k(j)

with v_k the pi-orthonormal right eigenvectors. The float backend evaluates the sum through
symmetry.PreciseSystem so that the long horizon curves keep the accuracy of the exact
coefficients.
'''

import enum
import logging
import math
import numbers
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Backend, DistributionVector, stationary_distribution
from .errors import InternalConsistencyError, ModelError, NonConvergenceError
from .spectral import spectrum
from .symmetry import (
    DEFAULT_GUARD_DIGITS,
    RadicalScalar,
    ScaledVector,
    precise_system,
    symmetric_system,
)

_logger = logging.getLogger(__name__)

# Relative tolerance of float moment identities.
MOMENT_TOLERANCE = 1e-9

# Largest step count cutoff_scan() will try before giving up.
DEFAULT_MAX_STEPS = 1 << 24

def _check_steps(m):
    if not isinstance(m, numbers.Integral) or m < 0:
        raise ModelError(f'The step count must be a non-negative integer, got {m!r}.')

def distribution_at(params, j, m, backend=Backend.EXACT, guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    Returns the distribution rho_m(.; j) of the chain started in state j after m steps, the j-th
    column of T^m.
    '''
    params.check_state(j, name='Start state')
    _check_steps(m)
    backend = Backend.parse(backend)

    if backend is Backend.FLOAT:
        system = precise_system(params, guard_digits)
        return DistributionVector(
            tuple(float(value) for value in system.column(j, m)), Backend.FLOAT)

    system = symmetric_system(params)
    pi = stationary_distribution(params).weights
    powers = [value ** m for value in system.eigenvalues]

    weights = tuple(
        sum(
            system.delta_sq[k] * powers[k] * system.c[k][i] * system.c[k][j]
            for k in range(params.states)
        ) / pi[j]
        for i in range(params.states)
    )

    return DistributionVector(weights)

def _is_exact(values):
    if isinstance(values, DistributionVector):
        return values.backend is Backend.EXACT

    return all(isinstance(value, numbers.Rational) for value in values)

def tv_distance(a, b):
    '''
    Returns the total variation distance 1/2 sum_i |a_i - b_i|. The result is exact when both
    distributions are exact.
    '''
    if len(a) != len(b):
        raise ModelError(f'Length mismatch: {len(a)} and {len(b)} states.')

    if _is_exact(a) and _is_exact(b):
        return sum(abs(Fraction(x) - Fraction(y)) for x, y in zip(a, b)) / 2

    return math.fsum(abs(float(x) - float(y)) for x, y in zip(a, b)) / 2

@dataclass(frozen=True)
class TvCurve:
    '''
    Total variation distances to stationarity of the chain started in state start.

    points is a tuple of (m, tv) pairs in the order the step counts were requested.
    '''
    params: object
    start: int
    points: tuple

    def __post_init__(self):
        for m, tv in self.points:
            if not -1e-12 <= tv <= 1 + 1e-12:
                raise InternalConsistencyError(f'Total variation {tv} at m={m} outside [0, 1].')

    @property
    def steps(self):
        return [m for m, _ in self.points]

    @property
    def values(self):
        return [tv for _, tv in self.points]

    def crossings(self, level):
        '''
        Returns the step counts m where the curve drops from above level to at or below it,
        comparing consecutive points.
        '''
        return [
            m for (_, previous), (m, tv) in zip(self.points, self.points[1:])
            if previous > level >= tv
        ]

def tv_curve(params, j, m_values, backend=Backend.FLOAT, workers=1,
             guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    Evaluates || rho_m(.; j) - pi ||_TV for every m in m_values.

    Parameters:
        - workers
            The number of threads the points are spread across. Points are merged in the order of
            m_values regardless.
    '''
    params.check_state(j, name='Start state')
    backend = Backend.parse(backend)

    m_values = list(m_values)
    if not m_values:
        raise ModelError('At least one step count is required.')
    for m in m_values:
        _check_steps(m)

    if backend is Backend.FLOAT:
        system = precise_system(params, guard_digits)

        def evaluate(m):
            deviation = system.deviation(j, m)
            return float(system.context.fsum(abs(value) for value in deviation) / 2)
    else:
        pi = stationary_distribution(params)

        def evaluate(m):
            return tv_distance(distribution_at(params, j, m), pi)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            values = list(executor.map(evaluate, m_values))
    else:
        values = [evaluate(m) for m in m_values]

    _logger.debug('Evaluated %d points of the TV curve of %s.', len(m_values), params)

    return TvCurve(params, j, tuple(zip(m_values, values)))

class BoundKind(enum.Enum):
    UPPER = 'upper'
    LOWER = 'lower'

@dataclass(frozen=True)
class BoundSpec:
    '''
    A mixing time bound: for the step count m derived from c, E_pi[TV] <= bound_value (upper), or
    2 TV >= bound_value (lower).
    '''
    kind: BoundKind
    c: float
    m: int
    bound_value: float

def _round_half_up(value):
    return int(math.floor(value + 0.5))

def _check_balanced(params):
    if not params.balanced:
        raise ModelError(f'The mixing bounds are stated for n1 = n2 only, got {params}.')

def bound_steps(params, kind, c):
    '''
    Returns the step count of a bound, with natural logarithms:

        upper: m = 1/4 n ln n + (c/2 - ln 2 / 8) n
        lower: m = 1/8 n ln n - c n / 2

    rounded to the nearest integer and clamped at zero.
    '''
    kind = BoundKind(kind) if not isinstance(kind, BoundKind) else kind
    n = params.n

    if kind is BoundKind.UPPER:
        steps = n * math.log(n) / 4 + (c / 2 - math.log(2) / 8) * n
    else:
        steps = n * math.log(n) / 8 - c * n / 2

    return max(0, _round_half_up(steps))

def mixing_bound(params, kind, c, constant=1.0):
    '''
    Maps c to the step count and value of a mixing time bound of the balanced chain.

    Parameters:
        - kind
            "upper": E_pi[TV] <= constant * e^(-2c).
            "lower": 2 TV >= 1 - constant * e^(4c).

        - constant
            The unspecified constant of the bound (A for upper, b for lower), must be positive.
    '''
    _check_balanced(params)

    try:
        kind = BoundKind(kind) if not isinstance(kind, BoundKind) else kind
    except ValueError:
        raise ModelError(f'Unknown bound kind "{kind}", expected "upper" or "lower".')

    if constant <= 0:
        raise ModelError(f'The bound constant must be positive, got {constant}.')

    if kind is BoundKind.UPPER:
        value = constant * math.exp(-2 * c)
    else:
        value = 1 - constant * math.exp(4 * c)

    return BoundSpec(kind, c, bound_steps(params, kind, c), value)

def upper_bound_at(params, m, constant=1.0):
    '''
    The upper bound as a function of the step count. Solving the upper step count formula for c
    (without rounding) gives

        constant * e^(-2c) = constant * n * 2^(-1/4) * e^(-4m/n).
    '''
    _check_balanced(params)
    _check_steps(m)

    return constant * params.n * 2 ** -0.25 * math.exp(-4 * m / params.n)

@dataclass(frozen=True)
class ExpectedTv:
    '''
    The stationary average sum_j pi_j TV(rho_m(.; j), pi) and its per start state terms.
    '''
    average: object
    per_state: tuple

def expected_bound_check(params, m, backend=Backend.FLOAT, guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    Computes E_pi[|| rho_m(j; .) - pi ||_TV], the quantity bounded by the upper bound, directly from
    the spectral formula.
    '''
    _check_balanced(params)
    _check_steps(m)
    backend = Backend.parse(backend)

    pi = stationary_distribution(params, backend)
    per_state = tuple(
        tv_curve(params, j, [m], backend, guard_digits=guard_digits).values[0]
        for j in range(params.states)
    )

    if backend is Backend.EXACT:
        average = sum(weight * tv for weight, tv in zip(pi, per_state))
    else:
        average = math.fsum(weight * tv for weight, tv in zip(pi, per_state))

    return ExpectedTv(average, per_state)

def cauchy_schwarz_bound(params, m):
    '''
    The intermediate Cauchy-Schwarz bound 1/2 (n pi_0)^(-1/2) lambda_1^m (sum_i sqrt(pi_i))^2 on
    E_pi[TV], before the constant is absorbed.
    '''
    _check_balanced(params)
    _check_steps(m)

    pi = stationary_distribution(params).weights
    lambda_1 = float(spectrum(params)[1])
    root_sum = math.fsum(math.sqrt(weight) for weight in pi)

    return 0.5 / math.sqrt(params.n * pi[0]) * lambda_1 ** m * root_sum ** 2

def _check_orthonormal(params, system, k):
    pi = stationary_distribution(params).weights
    norm = sum(weight * square for weight, square in zip(pi, system.v[k].squares()))
    if norm != 1:
        raise ModelError(f'v_{k} is not pi-orthonormal (norm {norm}).')

def eigen_moment(params, j, m, k, backend=Backend.EXACT, system=None,
                 guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    Returns E_{rho_m(.; j)}[v_k] = sum_i v_k(i) rho_m(i; j), and checks it against
    lambda_k^m v_k(j).

    The exact backend returns a RadicalScalar (v_k carries the factor Delta_k) and checks the
    identity exactly. The float backend returns a float and checks it to MOMENT_TOLERANCE.
    '''
    params.check_state(j, name='Start state')
    params.check_state(k, name='Eigen index')
    _check_steps(m)
    backend = Backend.parse(backend)

    if system is None:
        system = symmetric_system(params)
    _check_orthonormal(params, system, k)

    if backend is Backend.EXACT:
        moment = system.v[k].dot(distribution_at(params, j, m).weights)
        expected = system.eigenvalues[k] ** m * system.v[k].values[j]
        if moment.coefficient != expected:
            raise InternalConsistencyError(
                f'E[v_{k}] = {moment.coefficient} sqrt(Delta^2) differs from '
                f'{expected} sqrt(Delta^2) for {params}, j={j}, m={m}.')
        return moment

    precise = precise_system(params, guard_digits)
    moment = precise.moment(k, j, m)
    expected = precise.eigenvalues[k] ** m * precise.rows[j][k]
    if abs(moment - expected) > MOMENT_TOLERANCE * max(1, abs(expected)):
        raise InternalConsistencyError(
            f'E[v_{k}] = {moment} differs from {expected} for {params}, j={j}, m={m}.')

    return float(moment)

def variance_under(dist, v):
    '''
    Returns E_dist[v^2] - E_dist[v]^2.

    Exact when dist is exact and v is a ScaledVector (or a vector of rationals), float otherwise.
    '''
    if len(dist) != len(v):
        raise ModelError(f'Length mismatch: {len(dist)} states and {len(v)} entries.')

    if _is_exact(dist):
        weights = [Fraction(weight) for weight in dist]
        if isinstance(v, ScaledVector):
            second = sum(weight * square for weight, square in zip(weights, v.squares()))
            return second - v.dot(weights).squared()
        if _is_exact(v):
            mean = sum(weight * Fraction(value) for weight, value in zip(weights, v))
            square = sum(weight * Fraction(value) ** 2 for weight, value in zip(weights, v))
            return square - mean ** 2

    weights = np.array([float(weight) for weight in dist], dtype=np.float64)
    values = v.to_float() if isinstance(v, ScaledVector) else np.array(v, dtype=np.float64)
    mean = float(np.dot(weights, values))

    return float(np.dot(weights, values ** 2)) - mean ** 2

def cutoff_scan(params, j, epsilon, backend=Backend.FLOAT, max_steps=DEFAULT_MAX_STEPS,
                guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    Returns the smallest m found with TV(rho_m(.; j), pi) <= epsilon, by doubling and then
    bisection.

    The distance is not assumed to be monotone in m. The returned m always satisfies
    tv(m) <= epsilon < tv(m - 1).

    Raises:
        - NonConvergenceError
            If the chain is periodic, or no m up to max_steps reaches epsilon.
    '''
    params.check_state(j, name='Start state')
    if not 0 < epsilon < 1:
        raise ModelError(f'epsilon must be in (0, 1), got {epsilon}.')

    if spectrum(params).periodic:
        raise NonConvergenceError(f'The chain {params} is periodic and never mixes.')

    cache = {}

    def tv(m):
        if m not in cache:
            cache[m] = tv_curve(params, j, [m], backend, guard_digits=guard_digits).values[0]
        return cache[m]

    if tv(0) <= epsilon:
        return 0

    low, high = 0, 1
    while tv(high) > epsilon:
        low, high = high, high * 2
        if high > max_steps:
            raise NonConvergenceError(
                f'TV did not reach {epsilon} within {max_steps} steps for {params}.')

    while high - low > 1:
        middle = (low + high) // 2
        if tv(middle) <= epsilon:
            high = middle
        else:
            low = middle

    if not tv(high) <= epsilon < tv(high - 1):
        raise InternalConsistencyError(f'Cutoff bracket check failed at m={high}.')

    _logger.debug('Cutoff at epsilon=%s for %s from %d: m=%d.', epsilon, params, j, high)

    return high

def chebyshev_lower_bound(params, m, threshold, j=0, guard_digits=DEFAULT_GUARD_DIGITS):
    '''
    The Chebyshev lower bound on 2 TV(rho_m(.; j), pi) built from the first eigenvector:

        1 - 1 / threshold^2 - Var_rho_m(v_1) / (E_rho_m[v_1] - threshold)^2

    Returns 0.0 when the bound is vacuous (E_rho_m[v_1] <= threshold).
    '''
    if params.nw < 1:
        raise ModelError('The first eigenvector requires nw >= 1.')
    if threshold <= 0:
        raise ModelError(f'The threshold must be positive, got {threshold}.')

    mean = eigen_moment(params, j, m, 1, Backend.FLOAT, guard_digits=guard_digits)
    if mean <= threshold:
        return 0.0

    distribution = distribution_at(params, j, m, Backend.FLOAT, guard_digits)
    variance = variance_under(distribution, symmetric_system(params).v[1])

    return max(0.0, 1 - 1 / threshold ** 2 - variance / (mean - threshold) ** 2)

def first_eigenvector_profile(params):
    '''
    Checks exactly that v_1 is affine in the state, v_1(i) = slope * (i - center).

    Returns:
        (slope_sq, center) with v_1(i)^2 = slope_sq (i - center)^2 and center = n1 nw / n.
    '''
    system = symmetric_system(params)
    values = system.v[1].values

    slope = values[1] - values[0]
    if any(value != values[0] + slope * i for i, value in enumerate(values)):
        raise InternalConsistencyError(f'v_1 is not affine in the state for {params}.')

    center = -values[0] / slope

    return system.v[1].scale_sq * slope ** 2, center

def square_decomposition(params):
    '''
    Decomposes v_1^2 = A v_2 + B in the balanced case, exactly.

    Returns:
        (A, B) with A a RadicalScalar and B a Fraction (B = 1 for the pi-orthonormal system).
    '''
    _check_balanced(params)
    if params.nw < 2:
        raise ModelError('The decomposition needs v_2, which requires nw >= 2.')

    system = symmetric_system(params)
    pi = stationary_distribution(params).weights
    first, second = system.v[1], system.v[2]

    overlap = sum(
        weight * value ** 2 * other
        for weight, value, other in zip(pi, first.values, second.values))

    # B = <v_1^2, v_0> and A = <v_1^2, v_2> in the pi inner product.
    b = sum(weight * square for weight, square in zip(pi, first.squares()))
    a = RadicalScalar(first.scale_sq * overlap, second.scale_sq)

    for square, other in zip(first.squares(), second.values):
        if square != first.scale_sq * overlap * second.scale_sq * other + b:
            raise InternalConsistencyError(f'v_1^2 is not in span(v_0, v_2) for {params}.')

    return a, b
