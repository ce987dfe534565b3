import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fixtures import noiseless_product_table
from qicrates.channels import (
    CcqqChannel,
    channel_from_dict,
    classical_embed,
    induced_mac,
    load_channel,
    product_channel,
    random_channel,
    random_classical_table,
    save_channel,
    save_classical,
)
from qicrates.errors import ValidationError
from qicrates.linalg import random_density


def test_induced_mac_of_product_channel():
    rng = np.random.default_rng(0)
    rho = [random_density(rng, 2) for _ in range(2)]
    sigma = [random_density(rng, 3) for _ in range(3)]
    ch = product_channel(rho, sigma)
    m1 = induced_mac(ch, 1)
    for x1 in range(2):
        for x2 in range(3):
            assert np.allclose(m1.states[x1, x2], rho[x1], atol=1e-12)
    m2 = induced_mac(ch, 2)
    assert np.allclose(m2.states[1, 2], sigma[2], atol=1e-12)


def test_induced_mac_classical_marginal():
    rng = np.random.default_rng(1)
    p = random_classical_table(rng, 2, 2, 3, 2)
    m = induced_mac(classical_embed(p), 1)
    for x1 in range(2):
        for x2 in range(2):
            assert np.allclose(np.diag(m.states[x1, x2]).real, p[x1, x2].sum(axis=1), atol=1e-12)


def test_induced_traces():
    ch = random_channel(np.random.default_rng(2), dB1=2, dB2=3)
    for r in (1, 2):
        tr = np.einsum("ijaa->ij", induced_mac(ch, r).states).real
        assert np.all(np.abs(tr - 1) <= 1e-10)


def test_classical_embed_examples():
    ch = classical_embed(noiseless_product_table())
    for x1 in range(2):
        for x2 in range(2):
            e = np.zeros(4)
            e[2 * x1 + x2] = 1
            assert np.array_equal(ch.states[x1, x2], np.diag(e))
    uni = classical_embed(np.full((2, 2, 2, 3), 1 / 6))
    assert np.allclose(uni.states, np.eye(6) / 6)
    f = 0.1
    bsc = np.array([[1 - f, f], [f, 1 - f]])
    p = np.einsum("ia,jb->ijab", bsc, bsc)
    ch = classical_embed(p)
    assert np.allclose(np.diag(induced_mac(ch, 1).states[0, 1]).real, [0.9, 0.1])


def test_classical_embed_bad_row():
    p = np.full((2, 2, 2, 2), 0.25)
    p[1, 0, 0, 0] = 0.2
    with pytest.raises(ValidationError, match=r"x1=1, x2=0"):
        classical_embed(p)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_embed_commutes_with_marginal(seed, dy1, dy2):
    rng = np.random.default_rng(seed)
    p = random_classical_table(rng, 2, 3, dy1, dy2)
    traced = induced_mac(classical_embed(p), 2).states
    direct = np.array([[np.diag(p[i, j].sum(axis=0)) for j in range(3)] for i in range(2)])
    assert np.max(np.abs(traced - direct)) <= 1e-12


def test_round_trip(tmp_path):
    ch = random_channel(np.random.default_rng(3), nx1=3, nx2=2, dB1=2, dB2=2)
    save_channel(ch, tmp_path / "c.json")
    back = load_channel(tmp_path / "c.json")
    assert np.array_equal(back.states, ch.states)
    p = random_classical_table(np.random.default_rng(4), 2, 2, 3, 2)
    save_classical(p, tmp_path / "k.json")
    assert np.array_equal(load_channel(tmp_path / "k.json").states, classical_embed(p).states)


def _doc_with(matrix_00):
    doc = {"nx1": 1, "nx2": 2, "dB1": 2, "dB2": 1, "states": [
        {"x1": 0, "x2": 0, "matrix": matrix_00},
        {"x1": 0, "x2": 1, "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
    ]}
    return doc


def test_trace_violation_names_pair(tmp_path):
    doc = _doc_with([[[0.5, 0], [0, 0]], [[0, 0], [0.4, 0]]])
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match=r"x1=0, x2=0.*trace"):
        load_channel(tmp_path / "bad.json")


def test_non_hermitian_rejected():
    with pytest.raises(ValidationError, match="Hermitian"):
        channel_from_dict(_doc_with([[[0.5, 0], [0.2, 0]], [[0, 0], [0.5, 0]]]))


def test_missing_pair_and_parse_error(tmp_path):
    doc = _doc_with([[[1, 0], [0, 0]], [[0, 0], [0, 0]]])
    doc["states"].pop()
    with pytest.raises(ValidationError, match="x1=0, x2=1"):
        channel_from_dict(doc)
    (tmp_path / "junk.json").write_text("{not json")
    with pytest.raises(ValidationError, match="parse error"):
        load_channel(tmp_path / "junk.json")


def test_channel_immutable():
    ch = random_channel(np.random.default_rng(5))
    with pytest.raises(ValueError):
        ch.states[0, 0, 0, 0] = 1.0


def test_classical_block_shape_mismatch():
    with pytest.raises(ValidationError, match="disagrees"):
        channel_from_dict({"nx1": 3, "classical": {"table": noiseless_product_table().tolist()}})


def test_channel_validation_rejects_exactly_invalid():
    rng = np.random.default_rng(6)
    good = np.array([[random_density(rng, 2)]])
    CcqqChannel(good, 2, 1)
    bad = good.copy()
    bad[0, 0] *= 1.01
    with pytest.raises(ValidationError):
        CcqqChannel(bad, 2, 1)
