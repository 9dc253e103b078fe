import csv
import io

import pytest

from smpds.bench import (CSV_HEADER, TIME_COLUMNS, instances, load_campaign, rows_to_csv,
                         run_campaign)
from smpds.io import parse_model


def _strip_times(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: v for k, v in r.items() if k not in TIME_COLUMNS} for r in rows]


def test_defaults_and_unknown_keys():
    spec = load_campaign('{"instances": 3}')
    assert spec["instances"] == 3 and spec["seed"] == 0
    with pytest.raises(ValueError):
        load_campaign('{"colour": 1}')


def test_instances_do_not_depend_on_campaign_length():
    short = list(instances(load_campaign('{"seed": 4, "instances": 3}')))
    long = list(instances(load_campaign('{"seed": 4, "instances": 8}')))
    assert [(i.bundle, i.formula) for i in short] == [(i.bundle, i.formula) for i in long[:3]]


def test_parameter_forms():
    spec = load_campaign('{"instances": 20, "s1": {"choice": [10, 20]}, "controls": {"div": 5},'
                         ' "s2": 2, "symbols": [2, 3]}')
    for inst in instances(spec):
        m = inst.bundle.model
        assert len(m.normal) in (10, 20)
        assert len(m.controls) == len(m.normal) // 5
        assert len(m.modifying) == 2 and len(m.gamma) in (2, 3)
    with pytest.raises(ValueError):
        list(instances(load_campaign('{"s1": {"median": 3}}')))


def test_csv_is_deterministic_apart_from_times():
    spec = load_campaign('{"seed": 11, "instances": 12}')
    first, failures = run_campaign(spec)
    second, _ = run_campaign(spec)
    assert not failures
    a, b = rows_to_csv(first), rows_to_csv(second)
    assert a.splitlines()[0] == ",".join(CSV_HEADER)
    assert _strip_times(a) == _strip_times(b)


def test_rows_are_streamed():
    seen = []
    rows, _ = run_campaign(load_campaign('{"instances": 4}'), seen.append)
    assert seen == rows


def test_failure_artifact_is_a_model_file():
    from smpds.bench import failure_artifact
    from smpds.oracle import cross_check

    inst = next(instances(load_campaign('{"seed": 2, "instances": 1}')))
    report = cross_check(inst.bundle.model, inst.bundle.theta0, inst.bundle.c0, inst.formula)
    text = failure_artifact(inst, report)
    assert parse_model(text) == inst.bundle
    assert "# translated model" in text
