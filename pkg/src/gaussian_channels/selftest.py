"""Reduced-size property suites behind ``gaussian-channels selftest``.

Every check draws its random inputs from seeds spawned off one root seed,
so two runs with the same seed produce identical numbers.
"""

from __future__ import annotations

import numpy as np

from .channels import (
    ChannelParams,
    apply,
    compose,
    env_mode_bound,
    fd_counterexample,
    fd_member_sample,
    identity_channel,
    transpose_map_params,
    validity,
)
from .dilation import DilationSpec, build_dilation, induced_channel, random_valid_channel, verify_dilation
from .interferometer import Status, attenuator, decide
from .numerics import DEFAULT_TOLERANCES
from .states import random_state
from .symplectic import permute_form, random_orthosymplectic, random_symplectic

__all__ = ["run_selftest", "CHECKS"]


def _gap(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def _channel_gap(a, b):
    return max(_gap(a.x, b.x), _gap(a.y, b.y), _gap(a.w, b.w))


def check_counterexample(rng, samples, cfg):
    worst = 0.0
    ok = True
    for d in (1, 2, 3):
        ch, rep = fd_counterexample(d)
        worst = max(worst, abs(rep.min_eig + 1.0))
        mc = fd_member_sample(ch.x, ch.y, n_samples=samples, seed=int(rng.integers(2**32)), cfg=cfg)
        ok &= (not rep.fd0_member) and rep.fd_sufficient and mc.verdict.value == "not_falsified"
    return ok and worst <= 1e-9, worst


def check_transpose_map(rng, samples, cfg):
    worst = 0.0
    ok = True
    for d in (1, 2, 3):
        rep = validity(transpose_map_params(d), cfg)
        worst = max(worst, abs(rep.min_eig_minus + 2.0))
        ok &= not rep.valid
    return ok and worst <= 1e-9, worst


def check_dilation_invertible(rng, samples, cfg):
    worst = 0.0
    for d in (1, 2, 3):
        for _ in range(samples):
            ch = random_valid_channel(d, rng)
            dil = build_dilation(ch, cfg)
            worst = max(
                worst,
                _channel_gap(induced_channel(dil), ch),
                dil.residual(),
                verify_dilation(dil, ch, 5, int(rng.integers(2**32)), cfg),
            )
    return worst <= 1e-8, worst


def check_dilation_singular(rng, samples, cfg):
    worst = 0.0
    for i in range(samples):
        d = 1 + i % 3
        l = random_symplectic([d], rng)
        fixtures = [ChannelParams(l, np.zeros_like(l)), random_valid_channel(d, rng, rank_deficient=True)]
        for ch in fixtures:
            for mode in ("deflate", "regularize"):
                dil = build_dilation(ch, cfg, singular=mode)
                worst = max(worst, _channel_gap(induced_channel(dil), ch), dil.residual())
    return worst <= 1e-6, worst


def random_pair(rng, d):
    """Random ``(X, Y)`` with ``Y >= 0``; about half of them are valid channels."""
    n = 2 * d
    x = rng.standard_normal((n, n))
    a = rng.standard_normal((n, n))
    y = a @ a.T * rng.uniform(0.0, 3.0)
    return x, (y + y.T) / 2


def check_transpose_equivalence(rng, samples, cfg):
    worst = 0.0
    for i in range(samples):
        x, y = random_pair(rng, 1 + i % 3)
        ch = ChannelParams(x, y)
        rep = validity(ch, cfg)
        worst = max(worst, abs(rep.min_eig_minus - rep.min_eig_plus) / (1.0 + np.linalg.norm(y, 2)))
    return worst <= 1e-9, worst


def check_interferometer(rng, samples, cfg):
    worst = 0.0
    ok = True
    cases = [attenuator([d], k * np.pi / 20) for d in (1, 2) for k in range(20)]
    for i in range(samples):
        d = 1 + i % 2
        g = permute_form(random_orthosymplectic([2 * d], rng), [2 * d], [d, d])
        n = 2 * d
        cases.append(ChannelParams(g[:n, :n], g[n:, :n].T @ g[n:, :n]))
    for ch in cases:
        dec = decide(ch, seed=int(rng.integers(2**32)), cfg=cfg)
        if dec.status is not Status.YES:
            ok = False
            continue
        d = ch.d
        dil = DilationSpec(dec.l_inv, np.zeros(4 * d), d, d)
        worst = max(worst, dil.residual(), _channel_gap(induced_channel(dil), ch))
    half = decide(ChannelParams(0.5 * np.eye(2), 0.25 * np.eye(2)), cfg=cfg)
    ok &= half.status is Status.NO and "trace_condition_failed" in half.failed
    cex = decide(fd_counterexample(1)[0], cfg=cfg)
    ok &= cex.status is Status.NO and cex.reason == "invalid_channel"
    return ok and worst <= 1e-8, worst


def check_composition(rng, samples, cfg):
    worst = 0.0
    ok = True
    for i in range(samples):
        d = 1 + i % 3
        a, b = random_valid_channel(d, rng), random_valid_channel(d, rng)
        ab = compose(a, b)
        ok &= validity(ab, cfg).valid
        for _ in range(3):
            st = random_state(a.form, rng)
            seq, one = apply(b, apply(a, st, cfg), cfg), apply(ab, st, cfg)
            scale = 1.0 + max(np.abs(seq.cov).max(), np.abs(seq.mean).max())
            worst = max(worst, max(_gap(seq.mean, one.mean), _gap(seq.cov, one.cov)) / scale)
    return ok and worst <= 1e-9, worst


def check_env_modes(rng, samples, cfg):
    l = random_symplectic([2], rng)
    got = [
        env_mode_bound(identity_channel(2), cfg),
        env_mode_bound(ChannelParams(l, np.zeros_like(l)), cfg),
        env_mode_bound(attenuator([1], 0.7), cfg),
    ]
    return got == [0, 0, 2], float(sum(abs(g - e) for g, e in zip(got, [0, 0, 2])))


CHECKS = {
    "counterexample": check_counterexample,
    "transpose_map": check_transpose_map,
    "dilation_invertible": check_dilation_invertible,
    "dilation_singular": check_dilation_singular,
    "transpose_equivalence": check_transpose_equivalence,
    "interferometer": check_interferometer,
    "composition": check_composition,
    "env_mode_bound": check_env_modes,
}


def run_selftest(seed=0, samples=10, cfg=None):
    """Run every check; returns ``{name: {"passed": bool, "max_error": float}}``."""
    cfg = cfg or DEFAULT_TOLERANCES
    children = np.random.SeedSequence(seed).spawn(len(CHECKS))
    out = {}
    for (name, check), ss in zip(CHECKS.items(), children):
        passed, err = check(np.random.default_rng(ss), samples, cfg)
        out[name] = {"passed": bool(passed), "max_error": float(err)}
    return out
