import io
import json
import os
import shutil
import tempfile
from fractions import Fraction
from unittest import TestCase

import numpy as np

import bernoulli_laplace.output_utils as output_utils
from bernoulli_laplace.core import new_model
from bernoulli_laplace.errors import ModelError
from bernoulli_laplace.symmetry import spectral_power

GOLDEN_DIRECTORY = os.path.join(os.path.dirname(__file__), 'golden')

class TestVersionedName(TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_versioning(self):
        '''
        Tests that versions are added and incremented to make unique names.
        '''
        # Test that no version is added if the path doesn't exist.
        output = output_utils.versioned_name(self.directory, 'curve.csv')
        expected_output = os.path.join(self.directory, 'curve.csv')
        self.assertEqual(output, expected_output)

        # Test that a file causes the version to increment, before the extension.
        with open(expected_output, 'w'):
            pass
        output = output_utils.versioned_name(self.directory, 'curve.csv')
        expected_output = os.path.join(self.directory, 'curve_0.csv')
        self.assertEqual(output, expected_output)

        # Test that a directory causes the version to increment.
        os.mkdir(expected_output)
        output = output_utils.versioned_name(self.directory, 'curve.csv')
        expected_output = os.path.join(self.directory, 'curve_1.csv')
        self.assertEqual(output, expected_output)

    def test_no_clobber(self):
        '''
        Tests that output_stream() does not overwrite existing documents when asked not to.
        '''
        path = os.path.join(self.directory, 'spectrum.csv')
        with open(path, 'w') as existing:
            existing.write('keep')

        with output_utils.output_stream(path, no_clobber=True) as (stream, written_path):
            stream.write('new')

        self.assertEqual(written_path, os.path.join(self.directory, 'spectrum_0.csv'))
        with open(path) as existing:
            self.assertEqual(existing.read(), 'keep')

        with output_utils.output_stream(path) as (stream, written_path):
            stream.write('new')

        self.assertEqual(written_path, path)
        with open(path) as existing:
            self.assertEqual(existing.read(), 'new')

    def test_failed_document(self):
        '''
        Tests that an error while rendering leaves the existing file untouched.
        '''
        path = os.path.join(self.directory, 'spectrum.csv')
        with open(path, 'w') as existing:
            existing.write('keep')

        with self.assertRaises(ModelError):
            with output_utils.output_stream(path) as (stream, _):
                stream.write('partial')
                raise ModelError('Eigen index out of range.')

        with open(path) as existing:
            self.assertEqual(existing.read(), 'keep')

        # Nothing is created for a new path either.
        new_path = os.path.join(self.directory, 'new.csv')
        with self.assertRaises(ModelError):
            with output_utils.output_stream(new_path) as (stream, _):
                raise ModelError('Eigen index out of range.')
        self.assertFalse(os.path.exists(new_path))

class TestFormatScalar(TestCase):
    def test_values(self):
        '''
        Tests rational and float serialization.
        '''
        cases = (
            (Fraction(1, 2), '1/2'),
            (Fraction(-1, 2), '-1/2'),
            (Fraction(6, 2), '3'),
            (0, '0'),
            (np.int64(7), '7'),
            (0.1, '0.1'),
            (1e-20, '1e-20'),
            (np.float64(0.5), '0.5'),
            (True, 'true'),
            ('PASS', 'PASS'),
            ('column stochastic', 'column stochastic'),
        )

        for value, expected_output in cases:
            self.assertEqual(output_utils.format_scalar(value), expected_output)

    def test_json_scalar(self):
        '''
        Tests that rationals become strings and floats stay numbers.
        '''
        self.assertEqual(output_utils.json_scalar(Fraction(2, 3)), '2/3')
        self.assertEqual(output_utils.json_scalar(np.float64(0.25)), 0.25)
        self.assertEqual(output_utils.json_scalar(np.int32(4)), 4)
        self.assertEqual(output_utils.json_scalar('PASS'), 'PASS')

class TestDocuments(TestCase):
    def test_csv_table(self):
        '''
        Tests the header row and LF line endings of CSV tables.
        '''
        stream = io.StringIO()
        output_utils.write_table(stream, ['k', 'lambda'], [(0, Fraction(1)), (1, 0.25)])

        self.assertEqual(stream.getvalue(), 'k,lambda\n0,1\n1,0.25\n')

    def test_csv_matrix(self):
        '''
        Tests the row major CSV layout of a matrix against the golden file.
        '''
        stream = io.StringIO()
        output_utils.write_matrix(stream, spectral_power(new_model(2, 2, 2), 2))

        with open(os.path.join(GOLDEN_DIRECTORY, 'power_2_2_2_m2.csv'), newline='') as golden:
            self.assertEqual(stream.getvalue(), golden.read())

    def test_json_documents(self):
        '''
        Tests the top level JSON layout against the shipped schema.
        '''
        with open(output_utils.SCHEMA_PATH) as schema_file:
            schema = json.load(schema_file)

        params = new_model(2, 2, 2)

        stream = io.StringIO()
        output_utils.write_table(
            stream, ['i', 'pi'], [(0, Fraction(1, 6)), (1, Fraction(2, 3))], 'json',
            'stationary', params)
        document = json.loads(stream.getvalue())

        self.assertEqual(sorted(document), sorted(schema['required']))
        self.assertIn(document['command'], schema['properties']['command']['enum'])
        self.assertEqual(document['params'], {'n1': 2, 'n2': 2, 'nw': 2, 'nb': 2, 'n': 4})
        self.assertEqual(document['data'], [{'i': 0, 'pi': '1/6'}, {'i': 1, 'pi': '2/3'}])

        stream = io.StringIO()
        output_utils.write_matrix(stream, np.eye(2), 'json', 'power', params)
        document = json.loads(stream.getvalue())
        self.assertEqual(document['data'], [[1.0, 0.0], [0.0, 1.0]])
