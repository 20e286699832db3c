"""JSON file formats for channels, states, dilations and reports.

All matrices are row-major nested lists in the blocked convention.  Floats
are written with Python's shortest round-trip ``repr``, so
``load(store(x))`` reproduces every entry bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .channels import ChannelParams
from .dilation import DilationSpec
from .exceptions import GaussianChannelError
from .states import GaussianState

__all__ = [
    "MalformedInput",
    "dumps",
    "channel_to_dict",
    "channel_from_dict",
    "state_to_dict",
    "state_from_dict",
    "dilation_to_dict",
    "dilation_from_dict",
    "read_json",
    "write_json",
    "load_channel",
    "load_state",
    "load_dilation",
    "store",
    "digest",
]

CONVENTION = "blocked"


class MalformedInput(GaussianChannelError, ValueError):
    """A file is not valid JSON or does not follow the expected schema."""


def dumps(obj, indent=None):
    """Canonical JSON text: sorted keys, ``.`` decimal point, no NaN or inf."""
    try:
        return json.dumps(obj, sort_keys=True, indent=indent, allow_nan=False)
    except ValueError as exc:
        raise MalformedInput(f"cannot serialize non-finite value: {exc}") from exc


def digest(obj):
    """sha256 of the canonical JSON text of ``obj``."""
    return hashlib.sha256(dumps(obj).encode("utf-8")).hexdigest()


def _list(a):
    return np.asarray(a, dtype=float).tolist()


def _field(data, key, kind):
    if not isinstance(data, dict):
        raise MalformedInput(f"{kind} file must hold a JSON object")
    if key not in data:
        raise MalformedInput(f"{kind} file is missing {key!r}")
    return data[key]


def _int(data, key, kind):
    v = _field(data, key, kind)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise MalformedInput(f"{kind}.{key} must be a positive integer, got {v!r}")
    return v


def _array(data, key, kind, shape):
    v = _field(data, key, kind)
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInput(f"{kind}.{key} is not a numeric array") from exc
    if a.shape != shape:
        raise MalformedInput(f"{kind}.{key} has shape {a.shape}, expected {shape}")
    if not np.all(np.isfinite(a)):
        raise MalformedInput(f"{kind}.{key} contains non-finite entries")
    return a


def channel_to_dict(ch):
    return {"d": ch.d, "X": _list(ch.x), "Y": _list(ch.y), "w": _list(ch.w), "convention": CONVENTION}


def channel_from_dict(data, cfg=None):
    d = _int(data, "d", "channel")
    conv = data.get("convention", CONVENTION) if isinstance(data, dict) else None
    if conv != CONVENTION:
        raise MalformedInput(f"only the {CONVENTION!r} convention is accepted, got {conv!r}")
    n = 2 * d
    x = _array(data, "X", "channel", (n, n))
    y = _array(data, "Y", "channel", (n, n))
    w = _array(data, "w", "channel", (n,)) if "w" in data else np.zeros(n)
    try:
        return ChannelParams(x, y, w, cfg)
    except GaussianChannelError as exc:
        raise MalformedInput(f"channel: {exc}") from exc


def state_to_dict(st):
    return {"d": st.d, "mean": _list(st.mean), "cov": _list(st.cov)}


def state_from_dict(data, cfg=None):
    d = _int(data, "d", "state")
    n = 2 * d
    mean = _array(data, "mean", "state", (n,))
    cov = _array(data, "cov", "state", (n, n))
    try:
        return GaussianState(mean, cov, None, cfg)
    except GaussianChannelError as exc:
        raise MalformedInput(f"state: {exc}") from exc


def dilation_to_dict(dil):
    return {"d_in": dil.d_in, "d_env": dil.d_env, "G": _list(dil.g), "u": _list(dil.u)}


def dilation_from_dict(data):
    d_in = _int(data, "d_in", "dilation")
    d_env = _int(data, "d_env", "dilation")
    n = 2 * (d_in + d_env)
    g = _array(data, "G", "dilation", (n, n))
    u = _array(data, "u", "dilation", (n,))
    return DilationSpec(g, u, d_in, d_env)


def read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc


def write_json(obj, path):
    Path(path).write_text(dumps(obj, indent=1) + "\n", encoding="utf-8")


def load_channel(path, cfg=None):
    return channel_from_dict(read_json(path), cfg)


def load_state(path, cfg=None):
    return state_from_dict(read_json(path), cfg)


def load_dilation(path):
    return dilation_from_dict(read_json(path))


_WRITERS = {
    ChannelParams: channel_to_dict,
    GaussianState: state_to_dict,
    DilationSpec: dilation_to_dict,
}


def store(obj, path):
    """Write a channel, state or dilation to ``path``."""
    for kind, to_dict in _WRITERS.items():
        if isinstance(obj, kind):
            write_json(to_dict(obj), path)
            return
    raise TypeError(f"cannot store objects of type {type(obj).__name__}")
