import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exacthydro.errors import CatalogError, PreconditionError
from exacthydro.models import (
    MODEL_NAMES,
    FourierState,
    build_model,
    catalog_json,
    full_generator,
    model_from_dict,
    model_to_dict,
)


def test_catalog_names():
    assert MODEL_NAMES == ("grad3_1d", "grad13_1d", "grad13_lateral")


def test_unknown_model_lists_valid_names():
    with pytest.raises(CatalogError) as err:
        build_model("bgk")
    msg = str(err.value)
    for name in MODEL_NAMES:
        assert name in msg
    assert isinstance(err.value, KeyError)


def test_grad3_blocks():
    m = build_model("grad3_1d")
    np.testing.assert_array_equal(m.C, [[-1.0]])
    np.testing.assert_array_equal(m.L_MM, [[0, -5 / 3], [-1, 0]])
    assert (m.dim_macro, m.dim_micro) == (2, 1)


def test_grad13_relaxation():
    m = build_model("grad13_1d")
    np.testing.assert_allclose(m.C, np.diag([-1.0, -2.0 / 3.0]))


def test_lateral_dimensions():
    m = build_model("grad13_lateral")
    assert (m.dim_macro, m.dim_micro) == (1, 2)
    np.testing.assert_allclose(m.C, np.diag([-1.0, -2.0 / 3.0]))


def test_blocks_are_read_only():
    m = build_model("grad3_1d")
    with pytest.raises(ValueError):
        m.C[0, 0] = 3.0


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_relaxation_invertible(name):
    assert abs(np.linalg.det(build_model(name).C)) > 0.1


def test_bad_block_shape():
    d = model_to_dict(build_model("grad3_1d"))
    d["blocks"]["C"] = [[-1.0, 0.0]]
    with pytest.raises(ValueError):
        model_from_dict(d)


def test_spectrum_at_zero():
    w = np.sort(np.linalg.eigvals(full_generator(build_model("grad3_1d"), 0.0)).real)
    np.testing.assert_allclose(w, [-1, 0, 0], atol=0)
    w = np.sort(np.linalg.eigvals(full_generator(build_model("grad13_1d"), 0.0)).real)
    np.testing.assert_allclose(w, [-1, -2 / 3, 0, 0, 0], atol=1e-15)


def test_grad3_characteristic_polynomial_k1():
    # 3w^3 + 3w^2 + 9k^2 w + 5k^2 at k = 1
    w = np.sort_complex(np.linalg.eigvals(full_generator(build_model("grad3_1d"), 1.0)))
    ref = np.sort_complex(np.roots([3, 3, 9, 5]))
    np.testing.assert_allclose(w, ref, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(MODEL_NAMES), st.floats(-50, 50))
def test_generator_reality_and_trace(name, k):
    m = build_model(name)
    G = full_generator(m, k)
    np.testing.assert_allclose(full_generator(m, -k), G.conj(), atol=0)
    assert np.trace(G) == pytest.approx(np.trace(m.C), abs=1e-12)


def test_json_round_trip():
    data = json.loads(catalog_json())
    assert [d["name"] for d in data] == list(MODEL_NAMES)
    for d in data:
        m = model_from_dict(d)
        m0 = build_model(d["name"])
        assert d["dim_macro"] == m0.dim_macro and d["dim_micro"] == m0.dim_micro
        for blk in ("L_MM", "L_Mmu", "L_muM", "L_mumu", "C"):
            np.testing.assert_array_equal(getattr(m, blk), getattr(m0, blk))


def test_fourier_state_length_check():
    m = build_model("grad13_1d")
    with pytest.raises(PreconditionError):
        FourierState.from_vector(m, np.zeros(3), 0.1)
    s = FourierState.from_vector(m, np.arange(5), 0.1)
    assert s.macro.shape == (3,) and s.micro.shape == (2,)
    np.testing.assert_array_equal(s.vector(), np.arange(5))
