'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Utilities for writing result documents: output path handling, scalar serialization and the CSV and
JSON document layouts.

CSV documents have a single header row, comma delimiters and LF line endings. JSON documents are one
object with "params", "command" and "data" keys, see schemas/document.schema.json.
'''

import contextlib
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

SCHEMA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                           'schemas', 'document.schema.json')

def versioned_name(dirname, basename):
    '''
    Creates a versioned name for a document in the given directory.

    If the name is already taken, "_0", "_1", ... is inserted before the extension until an unused
    name is found. An unused name is returned unchanged.

    Returns:
        The full path to write.
    '''
    generated_name = os.path.join(dirname, basename)
    if not os.path.exists(generated_name):
        return generated_name

    name, extension = os.path.splitext(basename)
    counter = 0
    while True:
        generated_name = os.path.join(dirname, f'{name}_{counter}{extension}')
        if not os.path.exists(generated_name):
            return generated_name

        counter += 1

@contextlib.contextmanager
def output_stream(path=None, no_clobber=False):
    '''
    Opens the output document.

    Documents for a path are rendered in memory and only written once the block completes, so a
    failing command leaves an existing file untouched.

    Parameters:
        - path
            The output path, or None for standard output.

        - no_clobber
            If true and the path exists, a versioned name is used instead of overwriting it.

    Yields:
        (stream, path) where path is the path actually written, or None for standard output.
    '''
    if path is None:
        yield sys.stdout, None
        return

    if no_clobber:
        path = versioned_name(os.path.dirname(path), os.path.basename(path))

    buffer = io.StringIO()
    yield buffer, path

    with open(path, 'w', newline='', encoding='utf-8') as stream:
        stream.write(buffer.getvalue())

def format_scalar(value):
    '''
    Serializes a scalar for CSV output.

    Exact rationals are written as "num/den" (or "num" for integers), floats as the shortest
    decimal that round trips. Text cells are written as they are.
    '''
    if isinstance(value, (bool, np.bool_)):
        return str(value).lower()

    if isinstance(value, (int, np.integer)):
        return str(int(value))

    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f'{value.numerator}/{value.denominator}'

    if isinstance(value, str):
        return value

    return repr(float(value))

def json_scalar(value):
    '''
    Serializes a scalar for JSON output: rationals as "num/den" strings, everything else as a JSON
    number.

    The exact string rule covers computed values. Integer columns (state and eigen indices, step
    counts, case counts) are labels, not results, and stay JSON integers in both backends.
    '''
    if isinstance(value, Fraction):
        return format_scalar(value)

    if isinstance(value, (bool, np.bool_)):
        return bool(value)

    if isinstance(value, (int, np.integer)):
        return int(value)

    if isinstance(value, (float, np.floating)):
        return float(value)

    return value

def write_table(stream, header, rows, format_='csv', command=None, params=None):
    '''
    Writes a table document.

    Parameters:
        - header
            The column names.

        - rows
            Iterable of row sequences, one value per column.

        - format_
            "csv" or "json". JSON tables are written as a list of objects keyed by column name.
    '''
    if format_ == 'csv':
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_scalar(value) for value in row])
        return

    data = [
        {column: json_scalar(value) for column, value in zip(header, row)}
        for row in rows
    ]
    write_json(stream, command, params, data)

def write_matrix(stream, matrix, format_='csv', command=None, params=None):
    '''
    Writes a square matrix, row major. CSV documents get the header "i,0,1,...".
    '''
    size = len(matrix)

    if format_ == 'csv':
        header = ['i'] + [str(j) for j in range(size)]
        write_table(stream, header, ([i] + list(matrix[i]) for i in range(size)))
        return

    data = [[json_scalar(value) for value in matrix[i]] for i in range(size)]
    write_json(stream, command, params, data)

def write_json(stream, command, params, data):
    '''
    Writes the top level JSON document.
    '''
    document = {
        'params': params.as_dict() if params is not None else None,
        'command': command,
        'data': data,
    }

    stream.write(json.dumps(document, indent=2))
    stream.write('\n')
