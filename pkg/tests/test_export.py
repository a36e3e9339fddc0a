"""
export 模块测试
"""

import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from parity_interferometry import __version__
from parity_interferometry.export import ExportError, ResultWriter, build_meta, frame_to_rows


@pytest.fixture
def writer(config):
    return ResultWriter(config)


@pytest.fixture
def frame():
    return pd.DataFrame({
        'total_mean': [2.0, 4.0],
        'delta_phi': [0.1, np.nan],
        'cutoff': np.array([3, 7], dtype='int64'),
        'flag': ['', 'divergent'],
    })


def test_csv_text_format(writer, frame):
    text = writer.to_csv_text(frame)
    lines = text.split('\n')
    assert lines[0] == 'total_mean,delta_phi,cutoff,flag'
    assert lines[1] == '2,0.10000000000000001,3,'
    assert lines[2] == '4,,7,divergent'
    assert '\r' not in text
    assert text.endswith('\n')


def test_csv_is_byte_identical_across_calls(writer, frame):
    assert writer.render(frame, 'csv') == writer.render(frame.copy(), 'CSV')


def test_json_text(writer, frame):
    payload = json.loads(writer.to_json_text(frame, build_meta(command='uncertainty', phi=1e-4)))
    assert payload['meta']['tool_version'] == __version__
    assert payload['meta']['phi'] == 1e-4
    assert payload['rows'][1]['delta_phi'] is None
    assert payload['rows'][0]['cutoff'] == 3
    assert payload['rows'][0]['delta_phi'] == 0.1


def test_frame_to_rows_converts_numpy_types(frame):
    rows = frame_to_rows(frame)
    assert type(rows[0]['cutoff']) is int
    assert type(rows[0]['total_mean']) is float


def test_write_to_stream(writer, frame):
    stream = io.StringIO()
    assert writer.write(frame, '-', 'csv', stream=stream) is None
    assert stream.getvalue() == writer.to_csv_text(frame)


def test_write_and_load_csv(writer, frame, tmp_path):
    path = writer.write(frame, tmp_path / 'nested' / 'result.csv')
    assert path.exists()
    meta, loaded = writer.load(path)
    assert meta == {}
    assert list(loaded.columns) == list(frame.columns)
    assert loaded['delta_phi'].iloc[0] == 0.1
    assert math.isnan(loaded['delta_phi'].iloc[1])
    assert loaded['cutoff'].tolist() == [3, 7]


def test_write_and_load_json(writer, frame, tmp_path):
    path = writer.write(frame, tmp_path / 'result.json', fmt='json', meta=build_meta(family='pcs'))
    meta, loaded = writer.load(path)
    assert meta['family'] == 'pcs'
    assert loaded['flag'].tolist() == ['', 'divergent']


def test_save_uses_output_dir(writer, frame, tmp_path, monkeypatch):
    monkeypatch.setattr(writer.config, 'output_dir', tmp_path / 'out')
    path = writer.save(frame, 'saved.csv')
    assert path == tmp_path / 'out' / 'saved.csv'
    assert path.read_text(encoding='utf-8') == writer.to_csv_text(frame)


def test_load_missing_file(writer, tmp_path):
    with pytest.raises(ExportError):
        writer.load(tmp_path / 'missing.csv')


def test_load_broken_json(writer, tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"meta": {}}', encoding='utf-8')
    with pytest.raises(ExportError):
        writer.load(path)


def test_write_into_file_path_fails(writer, frame, tmp_path):
    blocker = tmp_path / 'blocker'
    blocker.write_text('x', encoding='utf-8')
    with pytest.raises(ExportError):
        writer.write(frame, blocker / 'result.csv')


def test_unknown_format(writer, frame):
    with pytest.raises(ValueError):
        writer.render(frame, 'xml')
