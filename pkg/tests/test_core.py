import io
import json
import threading

import pytest
import yaml

import core
import core.grid_interface
import core.report_interface
import offdiag.classify
import offdiag.exceptions
import offdiag.riccati
import offdiag.writer

from core import Core, Settings


## configuration

def test_deep_merge():
    merged = core.deep_merge({'a': {'x': 1, 'y': 2}, 'b': 3}, {'a': {'y': 5}, 'b': None, 'c': 4})
    assert merged == {'a': {'x': 1, 'y': 5}, 'b': 3, 'c': 4}


def test_default_settings():
    settings = Settings.from_config(yaml.safe_load(core.default_config_yaml))
    assert settings == Settings()
    assert settings.model_defaults.cantor_depth == 16


def test_config_value_types():
    conf = {'numerics': {'tol': '1e-8', 'k': 3, 'flag': True, 'name': 'x'}}
    assert core.config_value(conf, 'numerics.tol', float) == 1e-8
    assert core.config_value(conf, 'numerics.k', float) == 3.0
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        core.config_value(conf, 'numerics.flag', int)
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        core.config_value(conf, 'numerics.name', float)
    with pytest.raises(offdiag.exceptions.InvalidConfigValue) as info:
        core.config_value(conf, 'numerics.missing', int)
    assert info.value.key_path == 'numerics.missing'


def test_settings_reject_bad_values():
    base = yaml.safe_load(core.default_config_yaml)
    for patch in ({'core': {'workers': 0}},
                  {'numerics': {'epsilon': {'k0': 30, 'k1': 20}}},
                  {'numerics': {'tolerance': {'residual': -1.0}}},
                  {'numerics': {'residual': {'random_vectors': -2}}}):
        with pytest.raises(offdiag.exceptions.InvalidConfigValue):
            Settings.from_config(core.deep_merge(base, patch))


def test_missing_config_file_uses_defaults(tmp_path):
    conf = core._safe_load_config_path(str(tmp_path / 'absent.yaml'))
    assert conf == yaml.safe_load(core.default_config_yaml)
    assert not (tmp_path / 'absent.yaml').exists()


def test_core_lifecycle():
    runner = Core(config={'core': {'workers': 3}, 'writers': {'enabled': ['stderr']}})
    assert runner.running
    assert runner.settings.workers == 3
    assert 'stderr' in offdiag.writer.get_enabled()
    runner.stop()
    assert not runner.running
    assert 'stderr' not in offdiag.writer.get_enabled()
    with pytest.raises(offdiag.exceptions.OffdiagError):
        runner.stop()


def test_core_releases_writers_on_bad_config():
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        Core(config={'core': {'workers': -1}, 'writers': {'enabled': ['stderr']}})
    assert offdiag.writer.get_enabled() == set()


def test_core_unknown_writer_is_skipped():
    runner = Core(config={'writers': {'enabled': ['carrier-pigeon']}})
    assert offdiag.writer.get_enabled() == set()
    runner.stop()


## grid evaluation

def test_split_indices():
    assert [list(r) for r in core.grid_interface.split_indices(5, 2)] == [[0, 2, 4], [1, 3]]
    assert len(core.grid_interface.split_indices(2, 8)) == 2


def test_evaluate_grid_keeps_order():
    names = set()

    def square(x):
        names.add(threading.current_thread().name)
        return x * x

    values = [float(i) for i in range(40)]
    assert core.grid_interface.evaluate_grid(square, values, workers=4) == [x * x for x in values]
    assert len(names) == 4
    assert core.grid_interface.evaluate_grid(square, [], workers=4) == []


def test_evaluate_grid_reraises():
    def fail_on_three(x):
        if x == 3.0: raise offdiag.exceptions.EvaluationError("three")
        return x

    with pytest.raises(offdiag.exceptions.EvaluationError):
        core.grid_interface.evaluate_grid(fail_on_three, range(10), workers=3)


## reports

def test_number_and_jsonable():
    assert core.report_interface.number(float('inf')) is None
    assert core.report_interface.number(None) is None
    assert core.report_interface.jsonable({'a': (1, float('nan'))}) == {'a': [1, None]}


def test_classify_record(single_atom):
    pc = offdiag.classify.classify_point(single_atom, 1.0)
    record = core.report_interface.classify_record(pc)
    assert record['class'] == 'PurePoint'
    assert record['re_F'] == pytest.approx(-1.0)
    assert record['g2'] == pytest.approx(1.0)
    assert record['exponent'] is None


def test_write_records_formats(single_atom):
    records = [core.report_interface.eigs_record(1.0, 1.0 + 1e-15), core.report_interface.eigs_record(-1.0, None)]
    out = io.StringIO()
    core.report_interface.write_records(records, core.report_interface.EIGS_COLUMNS, 'json', out)
    lines = [json.loads(line) for line in out.getvalue().splitlines()]
    assert lines[1] == {'lambda': -1.0, 'oracle': None, 'delta': None}
    out = io.StringIO()
    core.report_interface.write_records(records, core.report_interface.EIGS_COLUMNS, 'csv', out)
    assert out.getvalue().splitlines()[0] == 'lambda,oracle,delta'
    assert out.getvalue().splitlines()[2] == '-1.0,,'
    with pytest.raises(offdiag.exceptions.InvalidConfigValue):
        core.report_interface.write_records(records, core.report_interface.EIGS_COLUMNS, 'xml', out)


def test_certificate_record(single_atom):
    cert = offdiag.riccati.certify(single_atom, -1.0)
    record = core.report_interface.certificate_record(cert)
    assert record['verdict'] == 'solution'
    assert record['norm_or_unbounded'] == pytest.approx(1.0)
    assert record['eigvec_check']['passed']
    assert 'refinement' not in record


def test_kmm_record():
    record = core.report_interface.kmm_record(None, 1.0, "too strong")
    assert record == {'applicable': False, 'd': 1.0, 'reason': "too strong"}


def test_summary():
    records = [{'class': 'PurePoint'}, {'class': 'Regular'}, {'class': 'PurePoint'}]
    assert core.report_interface.summary(records, 'class') == {'PurePoint': 2, 'Regular': 1}
