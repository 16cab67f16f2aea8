import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jpac.model import (InvalidInstanceError, LinkNetwork, build_normalized, db_to_linear, excess,
                        load_network, network_from_dict, network_to_dict, restrict, save_network, sinr)


def test_single_link_normalization():
    chan = build_normalized(LinkNetwork([[1.0]], [0.1], [1.0], [0.2]))
    np.testing.assert_allclose(chan.A, [[1.0]])
    np.testing.assert_allclose(chan.c, [0.5])


def test_two_link_normalization(sym):
    chan = build_normalized(sym(0.4))
    np.testing.assert_allclose(chan.A, [[1.0, -0.4], [-0.4, 1.0]], atol=1e-15)
    np.testing.assert_allclose(chan.c, [0.5, 0.5])
    np.testing.assert_allclose(chan.B, [[0.0, 0.4], [0.4, 0.0]], atol=1e-15)


def test_db_conversion():
    assert db_to_linear(2.0) == pytest.approx(1.5849, abs=1e-4)


def test_sinr_examples(sym):
    net = LinkNetwork([[1.0]], [0.1], [1.0], [0.2])
    assert sinr(net, [0.2]) == pytest.approx([2.0])
    net2 = sym(0.4)
    np.testing.assert_array_equal(sinr(net2, [0.0, 0.0]), [0.0, 0.0])
    p = np.full(2, 5 / 6) * net2.pbar
    np.testing.assert_allclose(sinr(net2, p), net2.gamma, rtol=1e-12)


def test_excess_examples(sym):
    chan = build_normalized(sym(0.4))
    np.testing.assert_allclose(excess(chan, [0.0, 0.0]), chan.c)
    np.testing.assert_allclose(excess(chan, [0.5, 0.5]), [0.2, 0.2])
    one = build_normalized(LinkNetwork([[1.0]], [0.1], [1.0], [0.2]))
    assert excess(one, [0.5])[0] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        excess(chan, [0.1])


def test_restrict():
    rng = np.random.default_rng(0)
    G = rng.uniform(0, 0.3, (3, 3))
    np.fill_diagonal(G, 1.0)
    chan = build_normalized(LinkNetwork(G, 0.1, 1.0, 0.5))
    full = restrict(chan, [0, 1, 2])
    np.testing.assert_array_equal(full.A, chan.A)
    single = restrict(chan, [1])
    np.testing.assert_array_equal(single.A, [[1.0]])
    assert single.c[0] == chan.c[1] and single.link_ids == (1,)
    sub = restrict(chan, [0, 2])
    np.testing.assert_array_equal(sub.A, chan.A[np.ix_([0, 2], [0, 2])])
    # restriction by original ids composes
    assert restrict(sub, [2]).c[0] == chan.c[2]
    with pytest.raises(ValueError):
        restrict(chan, [])
    with pytest.raises(ValueError):
        restrict(sub, [1])


@pytest.mark.parametrize("bad", [
    dict(G=[[0.0]], eta=[0.1], gamma=[1.0], pbar=[0.2]),
    dict(G=[[1.0, -0.1], [0.1, 1.0]], eta=0.1, gamma=1.0, pbar=0.2),
    dict(G=[[1.0]], eta=[0.1], gamma=[1.0], pbar=[0.0]),
    dict(G=[[1.0]], eta=[np.nan], gamma=[1.0], pbar=[1.0]),
    dict(G=[[1.0, 0.0]], eta=0.1, gamma=1.0, pbar=1.0),
])
def test_invalid_instances(bad):
    with pytest.raises(InvalidInstanceError):
        LinkNetwork(**bad)


def test_network_is_immutable(sym):
    net = sym(0.4)
    with pytest.raises(ValueError):
        net.G[0, 0] = 3.0


def test_json_roundtrip(tmp_path, sym):
    net = sym(0.6)
    path = tmp_path / "net.json"
    save_network(net, path)
    back = load_network(path)
    np.testing.assert_array_equal(back.G, net.G)
    np.testing.assert_array_equal(back.pbar, net.pbar)
    doc = {"K": 2, "G": [1, 0.5, 0.5, 1], "eta_dbm": -90, "gamma_db": 2, "pbar_watts": 0.1}
    flat = network_from_dict(doc)
    assert flat.G[0, 1] == 0.5 and flat.eta[1] == pytest.approx(1e-12)
    assert json.loads(json.dumps(network_to_dict(flat)))["K"] == 2
    with pytest.raises(InvalidInstanceError):
        network_from_dict({"K": 2, "G": [1, 0, 0, 1]})


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_sinr_target_iff_excess_nonpositive(K, seed):
    # SINR_k >= gamma_k  <=>  [A q - c]_k >= 0 at q = p / pbar
    rng = np.random.default_rng(seed)
    G = rng.uniform(0, 1, (K, K))
    np.fill_diagonal(G, rng.uniform(0.5, 2, K))
    net = LinkNetwork(G, rng.uniform(0.01, 0.1, K), rng.uniform(0.5, 2, K), rng.uniform(0.1, 1, K))
    chan = build_normalized(net)
    q = rng.uniform(0, 1, K)
    lhs = sinr(net, q * net.pbar) / net.gamma - 1.0
    rhs = -excess(chan, q)
    clear = np.abs(lhs) > 1e-9
    np.testing.assert_array_equal(np.sign(lhs[clear]), np.sign(rhs[clear]))
