'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Brute force verifiers that only use the transition probabilities of the kernel: exact dense matrix
powers, exact characteristic polynomial residuals, and a Monte Carlo simulator of the chain.

Nothing here imports the spectral modules, so agreement with them is independent evidence.
'''

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Backend, DistributionVector, build_kernel
from .errors import ModelError

_logger = logging.getLogger(__name__)

DEFAULT_PARTITIONS = 8

def identity_matrix(size, backend=Backend.EXACT):
    backend = Backend.parse(backend)
    return backend.array([[int(i == j) for j in range(size)] for i in range(size)])

def dense_power(kernel, m):
    '''
    Returns T^m by repeated matrix multiplication, in the backend of the kernel.
    '''
    if m < 0:
        raise ModelError(f'The step count must be non-negative, got {m}.')

    matrix = kernel.dense()
    result = identity_matrix(kernel.states, kernel.backend)

    for _ in range(m):
        result = matrix.dot(result)

    return result

def bareiss_determinant(matrix):
    '''
    Returns the determinant of a square integer matrix by fraction free (Bareiss) elimination.
    Every intermediate value is an integer.
    '''
    rows = [[int(value) for value in row] for row in matrix]
    size = len(rows)
    if size == 0:
        return 1

    sign = 1
    previous_pivot = 1

    for k in range(size - 1):
        # Make sure that there is a nonzero pivot in position (k, k).
        if rows[k][k] == 0:
            for swap in range(k + 1, size):
                if rows[swap][k] != 0:
                    rows[k], rows[swap] = rows[swap], rows[k]
                    sign = -sign
                    break
            else:
                return 0

        pivot = rows[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                # Exact division, guaranteed by Sylvester's identity.
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) // previous_pivot
            rows[i][k] = 0

        previous_pivot = pivot

    return sign * rows[-1][-1]

def charpoly_residual(kernel, value):
    '''
    Returns det(T - value I) exactly.

    The kernel is scaled by its common denominator n1 n2 and the value by its denominator so the
    determinant is taken of an integer matrix:

        det(T - a/b I) = det(b n1 n2 T - a n1 n2 I) / (b n1 n2)^size
    '''
    if kernel.backend is not Backend.EXACT:
        raise ModelError('Characteristic polynomial residuals need the exact backend.')

    value = Fraction(value)
    scale = kernel.params.n1 * kernel.params.n2 * value.denominator
    dense = kernel.dense()
    shift = value.numerator * kernel.params.n1 * kernel.params.n2

    integer_matrix = [
        [
            int(dense[i, j] * scale) - (shift if i == j else 0)
            for j in range(kernel.states)
        ]
        for i in range(kernel.states)
    ]

    return Fraction(bareiss_determinant(integer_matrix), scale ** kernel.states)

@dataclass(frozen=True)
class SimulationReport:
    '''
    The empirical end state distribution of independent walkers of the chain.
    '''
    params: object
    start: int
    steps: int
    walkers: int
    seed: int
    empirical: DistributionVector
    tv_vs_exact: float

    def as_dict(self):
        return {
            'params': self.params.as_dict(),
            'start': self.start,
            'steps': self.steps,
            'walkers': self.walkers,
            'seed': self.seed,
            'empirical': list(self.empirical.weights),
            'tv_vs_exact': self.tv_vs_exact,
        }

def _walk(p, q, start, steps, walkers, seed_sequence):
    '''
    Runs walkers copies of the chain for steps steps, returns the histogram of end states.

    Each step draws one uniform u per walker: u < p moves up, p <= u < p + q moves down.
    '''
    generator = np.random.Generator(np.random.PCG64(seed_sequence))
    states = np.full(walkers, start, dtype=np.int64)

    for _ in range(steps):
        uniform = generator.random(walkers)
        up = p[states]
        down = up + q[states]
        moves_down = (uniform >= up) & (uniform < down)
        states += (uniform < up).astype(np.int64) - moves_down.astype(np.int64)

    return np.bincount(states, minlength=len(p))

def simulate(params, j, m, walkers, seed, partitions=DEFAULT_PARTITIONS, workers=1):
    '''
    Simulates the chain from state j for m steps.

    The walkers are split into a fixed number of partitions, each with its own PCG64 stream spawned
    from numpy.random.SeedSequence(seed). The report only depends on (seed, partitions), not on
    the number of worker threads.

    tv_vs_exact is the total variation distance to column j of the float dense power T^m.
    '''
    params.check_state(j, name='Start state')
    if walkers < 1:
        raise ModelError(f'At least one walker is required, got {walkers}.')
    if m < 0:
        raise ModelError(f'The step count must be non-negative, got {m}.')

    kernel = build_kernel(params, Backend.FLOAT)
    p = np.array(kernel.p, dtype=np.float64)
    q = np.array(kernel.q, dtype=np.float64)

    partitions = max(1, min(partitions, walkers))
    sizes = [walkers // partitions + (index < walkers % partitions) for index in range(partitions)]
    streams = np.random.SeedSequence(seed).spawn(partitions)

    def run(index):
        return _walk(p, q, j, m, sizes[index], streams[index])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            histograms = list(executor.map(run, range(partitions)))
    else:
        histograms = [run(index) for index in range(partitions)]

    counts = np.sum(histograms, axis=0)
    empirical = DistributionVector(
        tuple(float(count) / walkers for count in counts), Backend.FLOAT)

    exact = dense_power(kernel, m)[:, j]
    tv = math.fsum(abs(a - b) for a, b in zip(empirical.weights, exact)) / 2

    _logger.debug('Simulated %d walkers of %s for %d steps, TV %.3g.', walkers, params, m, tv)

    return SimulationReport(params, j, m, walkers, seed, empirical, tv)
