'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Plots the CSV written by "bernoulli_laplace tv-curve", including the upper_bound and expected_tv
columns when present:

    bernoulli_laplace tv-curve --n1 100 --n2 100 --nw 100 --m-max 1000 --m-step 5 \
        --backend float --with-bound --output curve.csv
    python scripts/plot_tv_curve.py curve.csv --save curve.png
'''

import argparse
import csv
from fractions import Fraction

import matplotlib.pyplot as plt

def read_columns(path):
    '''
    Returns a dict mapping each column name to its list of float values.
    '''
    with open(path, newline='') as curve_file:
        reader = csv.DictReader(curve_file)
        columns = {name: [] for name in reader.fieldnames}
        for row in reader:
            for name, value in row.items():
                # Exact backend values are written as "p/q".
                columns[name].append(float(Fraction(value)))

    return columns

def main():
    parser = argparse.ArgumentParser(description='Plot a total variation curve.')
    parser.add_argument('path', help='CSV written by the tv-curve command')
    parser.add_argument('--save', metavar='PATH', help='save the figure instead of showing it')
    parser.add_argument('--log', action='store_true', help='logarithmic distance axis')
    options = parser.parse_args()

    columns = read_columns(options.path)
    steps = columns['m']

    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(steps, columns['tv'], label='TV distance')
    if 'expected_tv' in columns:
        ax.plot(steps, columns['expected_tv'], label='stationary average', linestyle='--')
    if 'upper_bound' in columns:
        ax.plot(steps, columns['upper_bound'], label='upper bound', linestyle=':')

    ax.set_xlabel('steps m')
    ax.set_ylabel('distance to stationarity')
    if options.log:
        ax.set_yscale('log')
    else:
        ax.set_ylim(0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()

    if options.save:
        fig.savefig(options.save, dpi=150, bbox_inches='tight')
    else:
        plt.show()

if __name__ == '__main__':
    main()
