"""Canonical document encoding: byte determinism and strict decoding."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lieforge.errors import DocumentIntegrityError, FormatVersionError
from lieforge.sampler import (
    ParameterMatrix,
    Tolerances,
    assemble_sample,
    generate,
    validate_parameter_matrix,
)
from lieforge.serialize import FORMAT_VERSION, read_sample, write_sample

AFFINE_DOC = (
    '{"format_version":"lieforge/1","dim":2,"field":"real","mode":"generic",'
    '"seed":0,"rng_id":"splitmix64-boxmuller-v1","attempts":1,'
    '"tolerances":{"tol_rank":0.0,"tau_n1":1e-10,"tau_ver":1e-09},'
    '"p_matrix":[0.0,0.0,0.0,1.0],"null_vector":[1.0,0.0],"c":1.0,'
    '"structure_constants":[[0,1,1,1.0]]}\n'
)


def _affine_sample():
    pm = ParameterMatrix(np.array([[0.0, 0.0], [0.0, 1.0]]), "generic")
    return assemble_sample(pm, validate_parameter_matrix(pm, Tolerances()), seed=0)


def _edited(text, **changes):
    doc = json.loads(text)
    doc.update(changes)
    return json.dumps(doc, separators=(",", ":")) + "\n"


# --- writing ----------------------------------------------------------------


def test_affine_document_is_pinned_byte_for_byte():
    assert write_sample(_affine_sample()) == AFFINE_DOC


def test_document_is_one_newline_terminated_line():
    text = write_sample(generate(5, 3))
    assert text.endswith("\n")
    assert text.count("\n") == 1


def test_key_order_is_fixed():
    text = write_sample(generate(4, 1), include_adjoint=True)
    keys = list(json.loads(text))
    assert keys == [
        "format_version",
        "dim",
        "field",
        "mode",
        "seed",
        "rng_id",
        "attempts",
        "tolerances",
        "p_matrix",
        "null_vector",
        "c",
        "adjoint",
        "structure_constants",
    ]


def test_emit_switches_control_payload_fields():
    s = generate(3, 2)
    both = json.loads(write_sample(s, include_adjoint=True, include_structure=True))
    neither = json.loads(write_sample(s, include_adjoint=False, include_structure=False))
    assert "adjoint" in both and "structure_constants" in both
    assert "adjoint" not in neither and "structure_constants" not in neither


def test_sparse_entries_are_canonical():
    s = generate(6, 9)
    entries = json.loads(write_sample(s))["structure_constants"]
    keys = [tuple(e[:3]) for e in entries]
    assert keys == sorted(keys)
    assert len(keys) == len(set(keys))
    for i, j, k, v in entries:
        assert 0 <= i < j < 6 and 0 <= k < 6
        assert v != 0
        assert s.structure[i, j, k] == v
    half = s.structure[np.triu_indices(6, k=1)]
    assert len(entries) == int(np.count_nonzero(half))


def test_complex_leaves_are_re_im_pairs():
    s = generate(3, 5, field="complex")
    doc = json.loads(write_sample(s, include_adjoint=True))
    for leaf in doc["p_matrix"] + doc["null_vector"] + doc["adjoint"][0]:
        assert isinstance(leaf, list) and len(leaf) == 2
    assert isinstance(doc["c"], list) and len(doc["c"]) == 2
    assert all(isinstance(e[3], list) and len(e[3]) == 2 for e in doc["structure_constants"])


def test_nilpotent_document_has_null_c():
    doc = json.loads(write_sample(generate(4, 7, mode="nilpotent")))
    assert doc["c"] is None


# --- round trips ------------------------------------------------------------


@pytest.mark.parametrize("field", ["real", "complex"])
@pytest.mark.parametrize("mode", ["generic", "nilpotent"])
@pytest.mark.parametrize("include_adjoint", [False, True])
@pytest.mark.parametrize("include_structure", [False, True])
def test_round_trip_is_bitwise(field, mode, include_adjoint, include_structure):
    s = generate(6, 123, field=field, mode=mode)
    text = write_sample(
        s, include_adjoint=include_adjoint, include_structure=include_structure
    )
    back = read_sample(text)
    np.testing.assert_array_equal(back.p.matrix, s.p.matrix)
    np.testing.assert_array_equal(back.null.vector, s.null.vector)
    np.testing.assert_array_equal(back.adjoint, s.adjoint)
    np.testing.assert_array_equal(back.structure, s.structure)
    assert back.null.scale_factor == s.null.scale_factor
    assert back.null.smallest_retained_sv == s.null.smallest_retained_sv
    assert (back.dim, back.field, back.mode) == (s.dim, s.field, s.mode)
    assert (back.seed, back.rng_id, back.attempts) == (s.seed, s.rng_id, s.attempts)
    assert back.tolerances == s.tolerances
    rewritten = write_sample(
        back, include_adjoint=include_adjoint, include_structure=include_structure
    )
    assert rewritten == text


def test_read_accepts_utf8_bytes():
    s = generate(3, 4)
    assert read_sample(write_sample(s).encode("utf-8")).seed == 4


@given(
    dim=st.integers(min_value=2, max_value=8),
    seed=st.integers(min_value=0, max_value=2**64 - 1),
    field=st.sampled_from(["real", "complex"]),
    mode=st.sampled_from(["generic", "nilpotent"]),
)
@settings(max_examples=30, deadline=None)
def test_property_write_read_write_is_identity(dim, seed, field, mode):
    text = write_sample(generate(dim, seed, field=field, mode=mode))
    assert write_sample(read_sample(text)) == text


# --- rejection paths ---------------------------------------------------------


def test_unsupported_version_is_its_own_error():
    with pytest.raises(FormatVersionError):
        read_sample(_edited(AFFINE_DOC, format_version="lieforge/9"))
    doc = json.loads(AFFINE_DOC)
    del doc["format_version"]
    with pytest.raises(FormatVersionError):
        read_sample(json.dumps(doc) + "\n")
    assert FORMAT_VERSION == "lieforge/1"


def test_malformed_json_is_rejected():
    with pytest.raises(DocumentIntegrityError):
        read_sample("{not json")
    with pytest.raises(DocumentIntegrityError):
        read_sample("[1,2,3]\n")
    with pytest.raises(DocumentIntegrityError):
        read_sample(b"\xff\xfe\x00")


def test_non_finite_tokens_are_rejected():
    with pytest.raises(DocumentIntegrityError):
        read_sample(AFFINE_DOC.replace('"c":1.0', '"c":NaN'))
    with pytest.raises(DocumentIntegrityError):
        read_sample(AFFINE_DOC.replace('"c":1.0', '"c":Infinity'))


def test_missing_and_unknown_fields_are_rejected():
    doc = json.loads(AFFINE_DOC)
    del doc["null_vector"]
    with pytest.raises(DocumentIntegrityError, match="missing"):
        read_sample(json.dumps(doc) + "\n")
    with pytest.raises(DocumentIntegrityError, match="unknown"):
        read_sample(_edited(AFFINE_DOC, comment="hi"))


@pytest.mark.parametrize(
    "changes",
    [
        {"dim": 1},
        {"dim": True},
        {"dim": "2"},
        {"field": "rational"},
        {"mode": "solvable"},
        {"seed": -1},
        {"seed": 2**64},
        {"seed": 1.5},
        {"attempts": 0},
        {"attempts": True},
        {"rng_id": ""},
        {"tolerances": {"tol_rank": 0.0}},
        {"tolerances": {"tol_rank": 0.0, "tau_n1": 1e-10, "tau_ver": 1e-9, "x": 1}},
        {"p_matrix": [0.0, 0.0, 0.0]},
        {"p_matrix": [0.0, 0.0, True, 1.0]},
        {"null_vector": [1.0, "0"]},
    ],
)
def test_invalid_metadata_is_rejected(changes):
    with pytest.raises(DocumentIntegrityError):
        read_sample(_edited(AFFINE_DOC, **changes))


def test_stored_matrix_invariants_are_revalidated():
    # nonzero first column
    with pytest.raises(DocumentIntegrityError, match="parameter matrix"):
        read_sample(_edited(AFFINE_DOC, p_matrix=[0.5, 0.0, 0.0, 1.0]))
    # null vector no longer unit
    with pytest.raises(DocumentIntegrityError, match="2-norm"):
        read_sample(_edited(AFFINE_DOC, null_vector=[2.0, 0.0]))
    # unit vector that fails to annihilate P
    with pytest.raises(DocumentIntegrityError, match="residual"):
        read_sample(_edited(AFFINE_DOC, null_vector=[0.0, 1.0]))
    # rank defect
    with pytest.raises(DocumentIntegrityError, match="rank"):
        read_sample(_edited(AFFINE_DOC, p_matrix=[0.0, 0.0, 0.0, 0.0]))


def test_scale_factor_consistency_is_enforced():
    with pytest.raises(DocumentIntegrityError, match="c is null"):
        read_sample(_edited(AFFINE_DOC, c=None))
    with pytest.raises(DocumentIntegrityError, match="inconsistent"):
        read_sample(_edited(AFFINE_DOC, c=2.0))
    nil = write_sample(generate(3, 1, mode="nilpotent"))
    with pytest.raises(DocumentIntegrityError, match="c is present"):
        read_sample(_edited(nil, c=1.0))


@pytest.mark.parametrize(
    "entries",
    [
        [[0, 1, 1, 1.0], [0, 1, 1, 1.0]],  # duplicate
        [[1, 0, 1, 1.0]],  # i >= j
        [[0, 0, 1, 1.0]],  # i == j
        [[0, 1, 2, 1.0]],  # k out of range
        [[0, 1, 1, 0.0]],  # explicit zero
        [[0, 1, 1]],  # wrong arity
        [[0.0, 1, 1, 1.0]],  # float index
        [[False, 1, 1, 1.0]],  # bool index
        "not a list",
    ],
)
def test_bad_sparse_entries_are_rejected(entries):
    with pytest.raises(DocumentIntegrityError):
        read_sample(_edited(AFFINE_DOC, structure_constants=entries))


def test_bad_adjoint_payload_is_rejected():
    doc = json.loads(write_sample(generate(3, 8), include_adjoint=True))
    doc["adjoint"] = doc["adjoint"][:2]
    with pytest.raises(DocumentIntegrityError, match="adjoint"):
        read_sample(json.dumps(doc, separators=(",", ":")) + "\n")
