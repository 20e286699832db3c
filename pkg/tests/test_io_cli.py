import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from gaussian_channels.cli import run
from gaussian_channels.dilation import build_dilation, random_dilation, random_valid_channel
from gaussian_channels.interferometer import attenuator
from gaussian_channels.io import (
    MalformedInput,
    channel_from_dict,
    channel_to_dict,
    dilation_from_dict,
    dumps,
    load_channel,
    load_dilation,
    load_state,
    store,
)
from gaussian_channels.states import random_state
from gaussian_channels.channels import ChannelParams

floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


def _run(argv, capsys):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _same(a, b):
    return np.array_equal(a, b) and np.array_equal(np.signbit(a), np.signbit(b))


def test_channel_round_trip_is_bit_exact(tmp_path):
    for seed in range(100):
        ch = random_valid_channel(1 + seed % 3, seed)
        path = tmp_path / f"c{seed}.json"
        store(ch, path)
        back = load_channel(path)
        assert _same(back.x, ch.x) and _same(back.y, ch.y) and _same(back.w, ch.w)


def test_state_and_dilation_round_trip(tmp_path):
    for seed in range(30):
        st_ = random_state([1 + seed % 3], seed)
        store(st_, tmp_path / "s.json")
        back = load_state(tmp_path / "s.json")
        assert _same(back.mean, st_.mean) and _same(back.cov, st_.cov)
        dil = random_dilation(1 + seed % 2, seed)
        store(dil, tmp_path / "d.json")
        got = load_dilation(tmp_path / "d.json")
        assert _same(got.g, dil.g) and _same(got.u, dil.u)
        assert (got.d_in, got.d_env) == (dil.d_in, dil.d_env)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(floats, min_size=4, max_size=4), st.lists(floats, min_size=3, max_size=3),
       st.lists(floats, min_size=2, max_size=2))
def test_json_round_trip_property(xs, ys, ws):
    x = np.array(xs).reshape(2, 2)
    y = np.array([[ys[0], ys[1]], [ys[1], ys[2]]])
    ch = ChannelParams(x, y, np.array(ws))
    text = dumps(channel_to_dict(ch))
    back = channel_from_dict(json.loads(text))
    assert _same(back.x, ch.x) and _same(back.y, ch.y) and _same(back.w, ch.w)


def test_store_rejects_unknown_types(tmp_path):
    with pytest.raises(TypeError):
        store(object(), tmp_path / "x.json")


@pytest.mark.parametrize(
    "payload",
    [
        [],
        {"X": [[1, 0], [0, 1]]},
        {"d": 1, "X": [[1, 0], [0, 1]], "Y": [[0, 0], [0, 0]], "convention": "interleaved"},
        {"d": 1, "X": [[1, 0]], "Y": [[0, 0], [0, 0]]},
        {"d": 0, "X": [], "Y": []},
        {"d": 1, "X": [[1, 0], [0, 1]], "Y": [[0, 1], [0, 0]]},
        {"d": 1, "X": [["a", 0], [0, 1]], "Y": [[0, 0], [0, 0]]},
    ],
)
def test_malformed_channels(payload):
    with pytest.raises(MalformedInput):
        channel_from_dict(payload)


def test_malformed_dilation_and_nan():
    with pytest.raises(MalformedInput):
        dilation_from_dict({"d_in": 1, "d_env": 1, "G": np.eye(4).tolist(), "u": [0, 0]})
    with pytest.raises(MalformedInput):
        dumps({"a": float("nan")})


def test_cli_check_counterexample(tmp_path, capsys):
    path = str(tmp_path / "cex.json")
    code, _, _ = _run(["counterexample", "--d", "1", "--out", path], capsys)
    assert code == 0
    code, out, _ = _run(["check", path, "--json"], capsys)
    assert code == 2
    rep = json.loads(out)
    assert rep["results"]["min_eig_minus"] == pytest.approx(-1.0, abs=1e-9)
    assert not rep["results"]["valid"]


def test_cli_dilate_then_verify(tmp_path, capsys):
    ch_path, dil_path = tmp_path / "att.json", tmp_path / "dil.json"
    store(attenuator([2], 0.8), ch_path)
    code, out, _ = _run(["dilate", str(ch_path), "--out", str(dil_path), "--json"], capsys)
    assert code == 0 and json.loads(out)["results"]["x_exact"]
    code, out, _ = _run(["verify", str(ch_path), str(dil_path), "--json"], capsys)
    assert code == 0
    assert json.loads(out)["results"]["max_deviation"] <= 1e-8


def test_cli_verify_rejects_wrong_dilation(tmp_path, capsys):
    ch_path, dil_path = tmp_path / "a.json", tmp_path / "d.json"
    store(random_valid_channel(1, 0), ch_path)
    store(build_dilation(random_valid_channel(1, 1)), dil_path)
    code, _, _ = _run(["verify", str(ch_path), str(dil_path)], capsys)
    assert code == 2


def test_cli_interferometer_exit_codes(tmp_path, capsys):
    ident = tmp_path / "id.json"
    store(ChannelParams(np.eye(2), np.zeros((2, 2))), ident)
    code, out, _ = _run(["interferometer", str(ident), "--json"], capsys)
    assert code == 0 and json.loads(out)["results"]["status"] == "yes"
    half = tmp_path / "half.json"
    store(ChannelParams(0.5 * np.eye(2), np.eye(2)), half)
    code, out, _ = _run(["interferometer", str(half), "--json"], capsys)
    assert code == 2 and json.loads(out)["results"]["reason"] == "trace_condition_failed"


def test_cli_evolve_compose_modes(tmp_path, capsys):
    a, s = tmp_path / "a.json", tmp_path / "s.json"
    store(attenuator([1], 0.3), a)
    store(random_state([1], 0), s)
    out_state = tmp_path / "o.json"
    code, _, _ = _run(["evolve", str(a), str(s), "--out", str(out_state)], capsys)
    assert code == 0 and load_state(out_state).d == 1
    comp = tmp_path / "c.json"
    code, _, _ = _run(["compose", str(a), str(a), "--out", str(comp)], capsys)
    np.testing.assert_allclose(load_channel(comp).x, np.cos(0.3) ** 2 * np.eye(2))
    code, out, _ = _run(["modes", str(a), "--json"], capsys)
    assert code == 0 and json.loads(out)["results"]["env_mode_bound"] == 2


def test_cli_transpose_map(capsys):
    code, out, _ = _run(["transpose-map", "--d", "2", "--json"], capsys)
    rep = json.loads(out)["results"]
    assert code == 0 and not rep["valid"]
    assert rep["min_eig_minus"] == pytest.approx(-2.0)


def test_cli_error_codes(tmp_path, capsys):
    assert _run([], capsys)[0] == 64
    assert _run(["bogus"], capsys)[0] == 64
    assert _run(["check"], capsys)[0] == 64
    assert _run(["counterexample", "--d", "0"], capsys)[0] == 64
    assert _run(["check", "x.json", "--tol", "-1"], capsys)[0] == 64
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert _run(["check", str(bad)], capsys)[0] == 65
    assert _run(["check", str(tmp_path / "missing.json")], capsys)[0] == 65
    inv = tmp_path / "inv.json"
    store(ChannelParams(np.eye(2)[::-1], np.eye(2)), inv)
    assert _run(["dilate", str(inv)], capsys)[0] == 2


def test_cli_internal_error(monkeypatch, tmp_path, capsys):
    import gaussian_channels.cli as cli

    def boom(args, cfg):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli._COMMANDS, "modes", boom)
    assert _run(["modes", "x.json"], capsys)[0] == 70


def test_cli_reports_are_deterministic(tmp_path, capsys):
    path = tmp_path / "c.json"
    store(random_valid_channel(2, 3), path)
    reports = []
    for _ in range(2):
        code, out, _ = _run(["check", str(path), "--json"], capsys)
        rep = json.loads(out)
        assert rep["inputs_digest"] and rep["timestamp"]
        rep.pop("timestamp")
        reports.append(dumps(rep))
    assert reports[0] == reports[1]


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "gaussian_channels", "transpose-map"], capture_output=True, text=True)
    assert res.returncode == 0 and "min_eig_minus" in res.stdout
