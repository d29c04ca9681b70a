'''
Licensed under the MIT License, see LICENSE in the project root for full license.

The command line front end. Every computation is a subcommand writing one CSV or JSON document to
the output stream; diagnostics go to stderr.

Exit status: 0 on success, 1 on domain errors and verification failures, 2 on usage errors
(including unreadable settings).
'''

import argparse
import logging
import sys
from dataclasses import dataclass

from . import output_utils
from .core import Backend, canonicalize, new_model, stationary_distribution
from .errors import BackendError, BernoulliLaplaceError, ModelError, SettingsError
from .mixing import (
    BoundKind,
    cutoff_scan,
    expected_bound_check,
    mixing_bound,
    tv_curve,
    upper_bound_at,
)
from .oracle import simulate
from .settings import SettingsSyntaxError, load_settings
from .spectral import b_coefficients, c_hypergeometric, eigen_basis, spectrum
from .symmetry import spectral_power
from .verification import run_suite

_logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

@dataclass(frozen=True)
class RunConfig:
    '''
    The resolved configuration of one invocation: flags over environment over settings file.
    '''
    command: str
    params: object
    relabeling: object
    backend: Backend
    format: str
    output: str
    no_clobber: bool
    settings: dict
    options: argparse.Namespace

    def start_state(self):
        '''
        Returns the start state given by --start, mapped to the canonical labeling.
        '''
        start = self.options.start
        if self.relabeling is not None:
            start = self.relabeling(start)

        self.params.check_state(start, name='Start state')

        return start

def _check_exact_cost(config, m):
    '''
    Rejects exact computations whose cost estimate states^2 * m exceeds the configured limit.
    '''
    if config.backend is not Backend.EXACT:
        return

    cost = config.params.states ** 2 * max(m, 1)
    limit = config.settings['exact_cost_limit']
    if cost > limit:
        raise BackendError(
            f'The exact backend cost estimate {cost} exceeds exact_cost_limit={limit}, use '
            '--backend float.')

def _write_rows(config, stream, header, rows):
    output_utils.write_table(
        stream, header, rows, config.format, config.command, config.params)

def run_spectrum(config, stream):
    values = spectrum(config.params, config.backend)
    _write_rows(config, stream, ['k', 'lambda'], enumerate(values))

def run_eigvec(config, stream):
    params = config.params
    k = config.options.k
    params.check_state(k, name='Eigen index')

    if config.options.form == 'pascal':
        values = eigen_basis(params).c[k].values
    elif config.options.form == 'hypergeometric':
        values = c_hypergeometric(params, k).values
    else:
        values = b_coefficients(params, k).values

    values = [config.backend.convert(value) for value in values]
    _write_rows(config, stream, ['i', 'value'], enumerate(values))

def run_stationary(config, stream):
    weights = stationary_distribution(config.params, config.backend).weights
    _write_rows(config, stream, ['i', 'pi'], enumerate(weights))

def run_power(config, stream):
    m = config.options.m
    if m < 0:
        raise ModelError(f'The step count must be non-negative, got {m}.')
    _check_exact_cost(config, m)

    matrix = spectral_power(
        config.params, m, config.backend, config.settings['guard_digits'])

    output_utils.write_matrix(stream, matrix, config.format, config.command, config.params)

def run_tv_curve(config, stream):
    options = config.options
    params = config.params

    if options.m_max < 0 or options.m_step < 1:
        raise ModelError(
            f'Need m-max >= 0 and m-step >= 1, got {options.m_max} and {options.m_step}.')
    _check_exact_cost(config, options.m_max)

    start = config.start_state()
    steps = list(range(0, options.m_max + 1, options.m_step))

    curve = tv_curve(
        params, start, steps, config.backend,
        workers=config.settings['workers'],
        guard_digits=config.settings['guard_digits'],
    )

    header = ['m', 'tv']
    columns = [curve.steps, curve.values]

    if options.with_bound:
        constant = config.settings['upper_constant']
        header.append('upper_bound')
        columns.append([upper_bound_at(params, m, constant) for m in steps])

    if options.with_average:
        header.append('expected_tv')
        columns.append([
            expected_bound_check(
                params, m, config.backend, config.settings['guard_digits']).average
            for m in steps
        ])

    _write_rows(config, stream, header, zip(*columns))

def run_cutoff(config, stream):
    epsilon = config.options.epsilon
    m = cutoff_scan(
        config.params, config.start_state(), epsilon, config.backend,
        max_steps=config.settings['cutoff_max_steps'],
        guard_digits=config.settings['guard_digits'],
    )
    _write_rows(config, stream, ['epsilon', 'm'], [(epsilon, m)])

def run_bounds(config, stream):
    kind = BoundKind(config.options.kind)
    constant = config.options.constant
    if constant is None:
        constant = config.settings[f'{kind.value}_constant']

    bounds = [mixing_bound(config.params, kind, c, constant) for c in config.options.c]
    _write_rows(
        config, stream, ['c', 'm', 'bound'],
        [(bound.c, bound.m, bound.bound_value) for bound in bounds])

def run_simulate(config, stream):
    options = config.options
    report = simulate(
        config.params, config.start_state(), options.m, options.walkers, options.seed,
        partitions=config.settings['simulation_partitions'],
        workers=config.settings['workers'],
    )

    data = report.as_dict()
    del data['params']
    output_utils.write_json(stream, config.command, config.params, data)

def run_verify(config, stream):
    '''
    Runs the invariant suite. Returns EXIT_FAILURE if any check fails.
    '''
    max_n = config.options.max_n or config.settings['verify_max_n']

    results = list(run_suite(max_n))
    for result in results:
        if not result.passed:
            _logger.error('%s failed: %s', result.name, result.detail)

    _write_rows(
        config, stream, ['check', 'result', 'cases', 'detail'],
        [
            (result.name, 'PASS' if result.passed else 'FAIL', result.cases, result.detail)
            for result in results
        ],
    )

    return EXIT_SUCCESS if all(result.passed for result in results) else EXIT_FAILURE

COMMANDS = {
    'spectrum': run_spectrum,
    'eigvec': run_eigvec,
    'stationary': run_stationary,
    'power': run_power,
    'tv-curve': run_tv_curve,
    'cutoff': run_cutoff,
    'bounds': run_bounds,
    'verify': run_verify,
    'simulate': run_simulate,
}

def build_parser():
    '''
    Returns the argument parser with one subparser per command.
    '''
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--backend', choices=('exact', 'float'),
                        help='scalar backend (default: $BL_BACKEND, then the settings file)')
    common.add_argument('--format', choices=('csv', 'json'), help='output document format')
    common.add_argument('--output', metavar='PATH', help='output file (default: stdout)')
    common.add_argument('--no-clobber', action='store_true',
                        help='write to a versioned name instead of overwriting --output')
    common.add_argument('--settings', metavar='PATH', help='settings file merged over defaults')
    common.add_argument('--verbose', action='store_true', help='log debug messages to stderr')

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument('--n1', type=int, required=True, help='capacity of urn 1')
    model.add_argument('--n2', type=int, required=True, help='capacity of urn 2')
    model.add_argument('--nw', type=int, required=True, help='number of white balls')
    model.add_argument('--canonicalize', action='store_true',
                       help='relabel urns and colors to the canonical form nw <= n1 <= n2')

    start = argparse.ArgumentParser(add_help=False)
    start.add_argument('--start', type=int, default=0,
                       help='start state j, white balls in urn 1 (default: 0)')

    parser = argparse.ArgumentParser(
        prog='bernoulli_laplace',
        description='Exact spectral analysis of the Bernoulli-Laplace two urn chain.')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    subparsers.add_parser('spectrum', parents=[common, model], help='eigenvalues (k, lambda)')

    eigvec = subparsers.add_parser('eigvec', parents=[common, model], help='an eigenvector')
    eigvec.add_argument('--k', type=int, required=True, help='eigen index')
    eigvec.add_argument('--form', choices=('pascal', 'hypergeometric', 'b'), default='pascal',
                        help='construction of the vector (default: pascal)')

    subparsers.add_parser('stationary', parents=[common, model], help='stationary distribution')

    power = subparsers.add_parser('power', parents=[common, model], help='the matrix T^m')
    power.add_argument('--m', type=int, required=True, help='step count')

    curve = subparsers.add_parser('tv-curve', parents=[common, model, start],
                                  help='total variation distance to stationarity (m, tv)')
    curve.add_argument('--m-max', type=int, required=True, help='largest step count')
    curve.add_argument('--m-step', type=int, default=1, help='step count increment')
    curve.add_argument('--with-bound', action='store_true',
                       help='add the upper bound column (n1 = n2 only)')
    curve.add_argument('--with-average', action='store_true',
                       help='add the stationary average of the distance over start states')

    cutoff = subparsers.add_parser('cutoff', parents=[common, model, start],
                                   help='first step count with tv <= epsilon')
    cutoff.add_argument('--epsilon', type=float, required=True, help='distance threshold')

    bounds = subparsers.add_parser('bounds', parents=[common, model],
                                   help='mixing time bounds (c, m, bound), n1 = n2 only')
    bounds.add_argument('--kind', choices=[kind.value for kind in BoundKind], required=True)
    bounds.add_argument('--c', type=float, nargs='+', default=[0.0, 1.0, 2.0, 3.0],
                        help='grid of c values (default: 0 1 2 3)')
    bounds.add_argument('--constant', type=float,
                        help='bound constant (default: upper_constant or lower_constant setting)')

    verify = subparsers.add_parser('verify', parents=[common],
                                   help='run the exact invariant suite')
    verify.add_argument('--max-n', type=int, help='largest n1 + n2 (default: verify_max_n)')

    simulation = subparsers.add_parser('simulate', parents=[common, model, start],
                                       help='Monte Carlo simulation of the chain (JSON)')
    simulation.add_argument('--m', type=int, required=True, help='step count')
    simulation.add_argument('--walkers', type=int, required=True, help='number of walkers')
    simulation.add_argument('--seed', type=int, required=True, help='random seed')

    return parser

def _model(options):
    '''
    Returns (params, relabeling), relabeling is None without --canonicalize.
    '''
    if not hasattr(options, 'n1'):
        return None, None

    if not options.canonicalize:
        return new_model(options.n1, options.n2, options.nw), None

    params, relabeling = canonicalize(options.n1, options.n2, options.nw)
    if not relabeling.is_identity:
        _logger.info(
            'Relabeled %s to %s (%s), states are written in the canonical labeling.',
            relabeling.original, (params.n1, params.n2, params.nw), ' then '.join(relabeling.swaps))

    return params, relabeling

def run(options, settings):
    '''
    Executes the parsed command. Returns the exit status.
    '''
    params, relabeling = _model(options)

    config = RunConfig(
        command=options.command,
        params=params,
        relabeling=relabeling,
        backend=Backend.parse(options.backend or settings['backend']),
        format=options.format or settings['format'],
        output=options.output,
        no_clobber=options.no_clobber,
        settings=settings,
        options=options,
    )

    _logger.debug('Running %s for %s with the %s backend.',
                  config.command, config.params, config.backend.value)

    with output_utils.output_stream(config.output, config.no_clobber) as (stream, path):
        status = COMMANDS[config.command](config, stream)

    if path is not None:
        _logger.info('Wrote %s.', path)

    return EXIT_SUCCESS if status is None else status

def main(argv=None):
    '''
    Parses the command line and runs the command. Returns the exit status.
    '''
    parser = build_parser()
    options = parser.parse_args(argv)

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if options.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s',
    )

    try:
        settings = load_settings(options.settings)
    except SettingsSyntaxError as error:
        _logger.error('%s\n%s', error, error.context())
        return EXIT_USAGE
    except (SettingsError, OSError) as error:
        _logger.error('%s', error)
        return EXIT_USAGE

    try:
        return run(options, settings)
    except BernoulliLaplaceError as error:
        _logger.error('%s', error)
        return EXIT_FAILURE
    except OSError as error:
        _logger.error('Could not write the output: %s', error)
        return EXIT_FAILURE
