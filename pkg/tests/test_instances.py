import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shiftframe import jsonio
from shiftframe.errors import InfeasibleSpec, SchemaError
from shiftframe.instances import (InstanceSpec, diag_example, eval_field, generate_instance, load_instance,
                                  make_rng, packaged_example_path, random_spec)
from shiftframe.fibers import OmegaGrid
from shiftframe.operators import normality_check, s_diagonalize


def test_prng_is_pcg64_and_stable():
    rng = make_rng(42)
    assert type(rng.bit_generator).__name__ == "PCG64"
    assert make_rng(42).integers(0, 2**62) == make_rng(42).integers(0, 2**62)


def test_plus_minus_one_spec():
    doc = generate_instance(InstanceSpec(seed=7, n_generators=2, eigenvalue_fields=[1.0, -1.0], m=1))
    inst = load_instance(doc).instance
    assert normality_check(inst.Rf)
    d = s_diagonalize(inst.Rf)
    assert d.gap >= 2 - 1e-9
    assert inst.length == 2


def test_generation_is_byte_identical():
    spec = InstanceSpec(seed=7, eigenvalue_fields=[1.0, -1.0])
    assert jsonio.dumps(generate_instance(spec)) == jsonio.dumps(generate_instance(spec))


def test_too_many_eigenvalue_fields():
    with pytest.raises(InfeasibleSpec):
        generate_instance(InstanceSpec(seed=7, n_generators=2, eigenvalue_fields=[1.0, -1.0, 0.0]))


@pytest.mark.parametrize("kwargs", [
    {"gap_target": 0.0},
    {"eigenvalue_fields": [1.0, 1.05], "gap_target": 0.1},
    {"supports": [None]},
    {"plant_zero": 5},
    {"n_generators": 0},
])
def test_infeasible_specs(kwargs):
    with pytest.raises(InfeasibleSpec):
        generate_instance(InstanceSpec(seed=1, **kwargs))


def test_spec_round_trip():
    spec = random_spec(11)
    assert InstanceSpec.from_dict(json.loads(jsonio.dumps(spec.to_dict()))) == spec
    with pytest.raises(SchemaError):
        InstanceSpec.from_dict({"seed": 1, "colour": "red"})


@given(st.integers(0, 10_000))
def test_gen_load_serialize_idempotent(seed):
    doc = generate_instance(random_spec(seed, 8))
    text = jsonio.dumps(doc)
    again = jsonio.loads(text)
    assert jsonio.dumps(again) == text
    a, b = load_instance(doc).instance, load_instance(again).instance
    np.testing.assert_array_equal(a.Rf.matrices, b.Rf.matrices)


def test_packaged_example_matches_preset():
    assert jsonio.load_file(packaged_example_path()) == jsonio.loads(jsonio.dumps(diag_example()))


def test_field_descriptors():
    g = OmegaGrid(1, 4)
    np.testing.assert_allclose(eval_field([0, 1], g), 1j)
    np.testing.assert_allclose(eval_field({"kind": "linear", "value": 1, "slope": 2}, g), [1, 1.5, 2, 2.5])
    np.testing.assert_allclose(eval_field({"kind": "step", "split": 0.5, "values": [1, -1]}, g), [1, 1, -1, -1])
    np.testing.assert_allclose(eval_field({"kind": "values", "values": [1, 2, 3, [0, 4]]}, g), [1, 2, 3, 4j])


@pytest.mark.parametrize("desc", [{"kind": "wave"}, {"kind": "step", "values": [1]}, True, [1, 2, 3]])
def test_bad_field_descriptor(desc):
    with pytest.raises(SchemaError):
        eval_field(desc, OmegaGrid(1, 4))


def _doc(**changes):
    doc = jsonio.loads(jsonio.dumps(diag_example()))
    doc.update(changes)
    return doc


@pytest.mark.parametrize("changes, where", [
    ({"grid": {"dim": 1}}, "grid"),
    ({"functions": []}, "functions"),
    ({"functions": [{"constant": [[1, 0], [0, 0]]}]}, "functions[0].constant"),
    ({"operator": {"kind": "mystery", "eigenvalue_fields": []}}, "operator.kind"),
    ({"operator": [[[0]]]}, "operator"),
    ({"generators": "e0"}, "generators"),
])
def test_schema_errors_point_at_field(changes, where):
    with pytest.raises(SchemaError) as err:
        load_instance(_doc(**changes))
    assert err.value.where.startswith(where.split(".")[0])
    assert where.split("[")[0] in str(err.value)


def test_bad_json_reports_position():
    with pytest.raises(SchemaError) as err:
        jsonio.loads('{"grid": [1,,2]}')
    assert "line 1" in str(err.value)


def test_canonical_json():
    assert jsonio.dumps({"b": float("inf"), "a": -0.0, "c": 1 + 2j, "d": np.float64(0.1)}) == \
        '{"a":0.0,"b":"inf","c":[1.0,2.0],"d":0.1}'
