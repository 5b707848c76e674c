import io

import pytest

from sfmaxent.errors import ConfigurationError, OutputError
from sfmaxent.services.config_file import coerce, load_key_value, parse_key_value


def test_coerce():
    assert coerce(' 10 ') == 10
    assert coerce('1e-5') == 1e-5
    assert coerce('inf') == float('inf')
    assert coerce('yes') is True
    assert coerce('off') is False
    assert coerce('GEOID') == 'GEOID'


def test_parse_with_comments():
    text = '# walker run\nn_walkers = 500  # small\n\ndt=0.01\nname = Pop 2000\n'
    assert parse_key_value(io.StringIO(text)) == {'n_walkers': 500, 'dt': 0.01, 'name': 'Pop 2000'}


def test_malformed_line_reports_location():
    with pytest.raises(ConfigurationError, match='run.cfg:2'):
        parse_key_value(io.StringIO('a = 1\nnot a pair\n'), 'run.cfg')


def test_missing_file(tmp_path):
    with pytest.raises(OutputError):
        load_key_value(tmp_path / 'absent.cfg')
