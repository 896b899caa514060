"""Fast invariant checks runnable without pytest (``hyperbit selftest``)."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import config
from .harness import partially_entangled_instance, random_instance, verify_equivalence
from .protocol import StrategyWeights, pw_expectation, pw_q, simulate_protocol
from .quantum_core import (
    bell_chsh_instance,
    bob_quantum_expectation,
    born_correlation,
)
from .regions import RegionPoint, helix_point, in_C, in_D, minimax_gap, target_t
from .tsirelson import coordinates, tsirelson_image

INV_SQRT2 = 1 / math.sqrt(2)


def _isomorphism(seeds=range(10)) -> bool:
    for seed in seeds:
        inst = random_instance(2, 3, 2, 2, seed)
        img = tsirelson_image(inst)
        one = img.identity_vector
        if abs(np.linalg.norm(one) - 1) > 1e-8:
            return False
        for a, x_a in img.alice_vectors.items():
            xp, xm = img.alice_projector_vectors[(a, 1)], img.alice_projector_vectors[(a, -1)]
            if np.max(np.abs(xp + xm - one)) > 1e-8 or abs(x_a @ one) > 1e-8:
                return False
            if abs(xp @ one - 0.5) > 1e-8 or abs(xm @ one - 0.5) > 1e-8:
                return False
            for (b, o), y in img.bob_vectors.items():
                born = born_correlation(inst, inst.alice[a], inst.bob[(b, o)])
                if abs(x_a @ y - born) > 1e-8:
                    return False
        for branch in inst.branches():
            t = target_t(coordinates(img, *branch))
            if abs(t - bob_quantum_expectation(inst, *branch)) > 1e-8:
                return False
    return True


def _bell_anchor() -> bool:
    inst = bell_chsh_instance()
    img = tsirelson_image(inst)
    for outcome in (1, -1):
        p = coordinates(img, "0", "0", outcome)
        if max(abs(p.x - 1), abs(p.y), abs(p.z - outcome * INV_SQRT2)) > 1e-8:
            return False
    return verify_equivalence(inst, "pw").verdict


def _pw_inside_d(n=41) -> bool:
    g = np.linspace(-1, 1, n)
    for x in g:
        for y in g:
            if abs(x) + abs(y) > 1 or abs(y) >= 1:
                continue
            q = pw_q(x, y).value
            for z in g:
                if abs(pw_expectation(y, q, z) - (y + x * z)) > 1e-12:
                    return False
    return True


def _d_boundary(n=81) -> bool:
    g = np.linspace(-1, 1, n)
    for x in g:
        for y in g[1:-1]:
            if pw_q(x, y).valid != (abs(x) + abs(y) <= 1 + config.REGION_TOL):
                return False
    return True


def _d_inside_c(n=21) -> bool:
    g = np.linspace(-1, 1, n)
    return all(
        in_C(RegionPoint(x, y, z))
        for x in g for y in g for z in g if in_D(RegionPoint(x, y, z))
    )


def _gap() -> bool:
    exact = (2 - math.sqrt(2)) / (4 - math.sqrt(2))
    if abs(minimax_gap(INV_SQRT2, INV_SQRT2).gap - exact) > 1e-12:
        return False
    return minimax_gap(0.3, 0.3).gap == 0.0 and minimax_gap(1.0, 0.0).gap == 0.0


def _proposition_one() -> bool:
    inst = partially_entangled_instance()
    return (verify_equivalence(inst, "z-aware").verdict
            and not verify_equivalence(inst, "pw").verdict)


def _helix() -> bool:
    for tau in np.linspace(0, math.pi, 201):
        for branch in (1, -1):
            p = helix_point(float(tau), branch)
            if abs(p.x ** 2 + p.y ** 2 - 1) > 1e-12 or abs(abs(target_t(p)) - 1) > 1e-12:
                return False
    return True


def _monte_carlo() -> bool:
    k = StrategyWeights(0.2, 0.1, 0.5, 0.2)
    for seed, shared in ((1, "alice"), (2, "fair")):
        if not simulate_protocol(RegionPoint(0.4, 0.1, 0.3), k, 100_000, seed, shared).passed():
            return False
    return True


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("isomorphism invariants and Born reconstruction", _isomorphism),
    ("Bell/CHSH anchor", _bell_anchor),
    ("discard/flip protocol reproduces t inside D", _pw_inside_d),
    ("q in [0, 1] iff |x| + |y| <= 1", _d_boundary),
    ("D inside C", _d_inside_c),
    ("minimax gap anchor", _gap),
    ("z-aware strategies match, fixed ones fail outside D", _proposition_one),
    ("helix identities", _helix),
    ("Monte Carlo agrees with analytic value", _monte_carlo),
]


def run(stream=None) -> bool:
    import sys

    stream = stream or sys.stdout
    ok = True
    for name, check in CHECKS:
        try:
            passed = bool(check())
        except Exception as exc:  # report and keep going
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}", file=stream)
    return ok

