'''
Licensed under the MIT License, see LICENSE in the project root for full license.

Loading of the settings file.

Settings are JSON extended with "//" line comments. The package ships default_settings.json, a
user settings file is merged over it, and the BL_BACKEND environment variable overrides the
backend of both. Command line flags override everything (see cli.py).
'''

import itertools
import json
import os
import re

from .errors import SettingsError

DEFAULT_SETTINGS_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                     'default_settings.json')

BACKEND_ENVIRONMENT_VARIABLE = 'BL_BACKEND'

# Only comments that start a line (after optional whitespace) are removed, so "//" inside string
# values survives.
_COMMENT_REGEX = re.compile(r'^[ \t]*//.*$', flags=re.MULTILINE)

_CHOICES = {
    'backend': ('exact', 'float'),
    'format': ('csv', 'json'),
}

_POSITIVE_NUMBERS = ('upper_constant', 'lower_constant')

_POSITIVE_INTEGERS = (
    'exact_cost_limit',
    'verify_max_n',
    'simulation_partitions',
    'workers',
    'guard_digits',
    'cutoff_max_steps',
)

class SettingsSyntaxError(SettingsError):
    '''
    Wraps a JSONDecodeError and adds a context function for display to the user.
    '''
    def __init__(self, error, path=None):
        super().__init__(f'{path or "<settings>"}:{error.lineno}:{error.colno}: {error.msg}')

        self.msg = error.msg
        self.doc = error.doc
        self.pos = error.pos
        self.lineno = error.lineno
        self.colno = error.colno
        self.path = path

    def context(self, pre_context=5, post_context=5, column_indicator=True, line_numbers=True):
        '''
        Returns the lines around the error, with line numbers and a caret under the column.
        '''
        doc_lines = self.doc.splitlines()

        first_line_number = max(self.lineno - pre_context - 1, 0)
        lines = doc_lines[first_line_number:self.lineno + post_context]

        number_width = 0
        if line_numbers:
            number_width = len(str(self.lineno + post_context)) + 2

            lines = [
                f'{str(number).ljust(number_width - 2)}| {line}'
                for number, line in zip(itertools.count(first_line_number + 1), lines)
            ]

        if column_indicator:
            lines.insert(
                self.lineno - first_line_number,
                '-' * (self.colno - 1 + number_width) + '^'
            )

        return '\n'.join(lines)

def loads(json_text, path=None):
    '''
    Parses settings JSON with "//" line comments.

    Comment lines are blanked rather than removed so that syntax error line numbers match the file.
    '''
    json_text = _COMMENT_REGEX.sub('', json_text)

    try:
        return json.loads(json_text)
    except json.decoder.JSONDecodeError as error:
        raise SettingsSyntaxError(error, path)

def load_file(path):
    '''
    Loads the settings JSON file at the given path.
    '''
    with open(path) as settings_file:
        return loads(settings_file.read(), path)

def validate(settings):
    '''
    Raises SettingsError for unknown keys or invalid values.
    '''
    known = set(_CHOICES) | set(_POSITIVE_NUMBERS) | set(_POSITIVE_INTEGERS)

    unknown = sorted(set(settings) - known)
    if unknown:
        raise SettingsError(f'Unknown settings: {", ".join(unknown)}.')

    for key, choices in _CHOICES.items():
        if key in settings and settings[key] not in choices:
            raise SettingsError(f'Setting "{key}" must be one of {choices}, got {settings[key]!r}.')

    for key in _POSITIVE_NUMBERS:
        value = settings.get(key, 1)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise SettingsError(f'Setting "{key}" must be a positive number, got {value!r}.')

    for key in _POSITIVE_INTEGERS:
        value = settings.get(key, 1)
        if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
            raise SettingsError(f'Setting "{key}" must be a positive integer, got {value!r}.')

def load_settings(path=None, environ=None):
    '''
    Returns the effective settings.

    Parameters:
        - path
            Optional user settings file, merged over the defaults.

        - environ
            The environment to read BL_BACKEND from, os.environ by default.
    '''
    if environ is None:
        environ = os.environ

    settings = load_file(DEFAULT_SETTINGS_PATH)

    if path is not None:
        user_settings = load_file(path)
        if not isinstance(user_settings, dict):
            raise SettingsError(f'The settings file {path} must contain a JSON object.')
        settings.update(user_settings)

    backend = environ.get(BACKEND_ENVIRONMENT_VARIABLE)
    if backend:
        settings['backend'] = backend.lower()

    validate(settings)

    return settings
