"""Seeded randomized checks of the operator inequalities behind the decoder analysis.

Each check draws a fresh instance from its own child of the seed and records
a margin (nonnegative when the inequality holds). A margin below ``-tol``
is a violation. ``faults`` swaps in deliberately broken fixtures so the
harness itself can be tested.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .channels import CcqMac
from .codec import (
    TypicalityConfig,
    codeword_state,
    cond_typical_projector,
    srm_povm,
    Povm,
    typical_projector,
)
from .linalg import (
    op_func,
    random_contraction,
    random_density,
    random_unitary,
    shannon_entropy,
    trace_norm,
)

CHECKS = ("hayashi_nagaoka", "projector_trick", "gentle_operator", "tr_trick",
          "typp_one", "typp_two", "typp_three", "povm")
FAULTS = ("povm", "hayashi_nagaoka")
PROPERTY_TOL = 1e-8
ORACLE_TOL = 1e-9


def _min_eig(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def _rand_psd(rng: np.random.Generator, d: int) -> np.ndarray:
    rank = int(rng.integers(1, d + 1))
    return rng.uniform(0.0, 3.0) * random_density(rng, d, rank)


def check_hayashi_nagaoka(rng, trial: int, fault: bool = False) -> float:
    """``2(I - S) + 4T - (I - (S+T)^{-1/2} S (S+T)^{-1/2})`` is PSD."""
    d = int(rng.integers(2, 7))
    if trial == 0:
        s, t = np.eye(d), np.zeros((d, d))  # equality case
    else:
        s, t = random_contraction(rng, d), _rand_psd(rng, d)
    r = op_func(s + t, "inv_sqrt_pseudo")
    lhs = np.eye(d) - r @ s @ r
    rhs = 2 * (np.eye(d) - s) + (1.0 if fault else 4.0) * t
    if fault:
        lhs = lhs + 0.5 * np.eye(d)
    return _min_eig(rhs - lhs)


def _random_mac(rng, d: int = 2) -> CcqMac:
    sts = np.array([[random_density(rng, d, int(rng.integers(1, d + 1))) for _ in range(2)] for _ in range(2)])
    return CcqMac(sts)


def check_projector_trick(rng, trial: int, fault: bool = False) -> float:
    """``Pi_{x1^n x2^n} <= 2^{n[H(B|X1X2) + delta]} rho_{x1^n x2^n}``."""
    mac = _random_mac(rng)
    n = int(rng.integers(2, 7))
    delta = float(rng.uniform(0.05, 0.5))
    p1, p2 = rng.dirichlet([1, 1]), rng.dirichlet([1, 1])
    x1 = rng.choice(2, size=n, p=p1)
    x2 = rng.choice(2, size=n, p=p2)
    flat = mac.states.reshape(-1, mac.dB, mac.dB)
    p12 = np.outer(p1, p2).ravel()
    seq = x1 * 2 + x2
    pi = cond_typical_projector(flat, seq, p12, TypicalityConfig(n, delta))
    h = sum(q * shannon_entropy(np.linalg.eigvalsh(s).clip(min=0)) for q, s in zip(p12, flat))
    rho = codeword_state(flat, seq)
    return _min_eig(2.0 ** (n * (h + delta)) * rho - pi)


def check_gentle_operator(rng, trial: int, fault: bool = False) -> float:
    """``E ||sqrt(L) rho_X sqrt(L) - rho_X||_1 <= 2 sqrt(eps)`` with ``Tr{L rho} = 1 - eps``."""
    d = int(rng.integers(2, 6))
    k = int(rng.integers(1, 5))
    probs = rng.dirichlet(np.ones(k))
    states = [random_density(rng, d) for _ in range(k)]
    if trial == 0:
        lam = np.eye(d)
    else:
        t = rng.uniform(0.0, 1.0) ** 2
        lam = (1 - t) * np.eye(d) + t * random_contraction(rng, d)
    rho = sum(p * s for p, s in zip(probs, states))
    eps = max(0.0, 1.0 - float(np.real(np.trace(lam @ rho))))
    root = op_func(lam, "sqrt")
    lhs = sum(p * trace_norm(root @ s @ root - s) for p, s in zip(probs, states))
    return 2.0 * math.sqrt(eps) - lhs


def check_tr_trick(rng, trial: int, fault: bool = False) -> float:
    """``Tr{L rho} <= Tr{L sigma} + ||rho - sigma||_1`` for ``0 <= rho, sigma, L <= I``."""
    d = int(rng.integers(2, 7))
    rho, sigma, lam = (random_contraction(rng, d) for _ in range(3))
    lhs = float(np.real(np.trace(lam @ rho)))
    return float(np.real(np.trace(lam @ sigma))) + trace_norm(rho - sigma) - lhs


def _typp_instance(rng, trial: int):
    if trial == 0:
        w, n, delta = 0.75, 10, 0.2
        u = np.eye(2)
    else:
        w = float(rng.uniform(0.02, 0.98))
        n = int(rng.integers(2, 9))
        delta = float(rng.uniform(0.05, 0.5))
        u = random_unitary(rng, 2)
    rho = (u * np.array([w, 1 - w])) @ u.conj().T
    pi = typical_projector(rho, TypicalityConfig(n, delta))
    return rho, w, n, delta, pi


def binomial_typical_mass(w: float, n: int, delta: float) -> tuple[float, int]:
    """Probability and count of typical strings for a two-letter spectrum ``(w, 1-w)``.

    Strings with ``k`` copies of the first letter have probability
    ``w^k (1-w)^(n-k)``; the sum runs over the typical ``k``.
    """
    h = shannon_entropy([w, 1 - w])
    mass, count = 0.0, 0
    for k in range(n + 1):
        if (k > 0 and w == 0) or (k < n and w == 1):
            continue
        lp = (k * math.log2(w) if k else 0.0) + ((n - k) * math.log2(1 - w) if k < n else 0.0)
        if abs(-lp / n - h) <= delta:
            mass += math.comb(n, k) * w**k * (1 - w) ** (n - k)
            count += math.comb(n, k)
    return mass, count


def check_typp_one(rng, trial: int, fault: bool = False) -> float:
    """``Tr{rho^n Pi}`` against the exact binomial tail (margin is ``ORACLE_TOL - |diff|``)."""
    rho, w, n, delta, pi = _typp_instance(rng, trial)
    rho_n = codeword_state(np.array([rho]), np.zeros(n, dtype=int))
    val = float(np.real(np.trace(rho_n @ pi)))
    mass, _ = binomial_typical_mass(w, n, delta)
    return ORACLE_TOL - abs(val - mass)


def check_typp_two(rng, trial: int, fault: bool = False) -> float:
    """``2^{-n(H+delta)} Pi <= Pi rho^n Pi <= 2^{-n(H-delta)} Pi``."""
    rho, w, n, delta, pi = _typp_instance(rng, trial)
    h = shannon_entropy([w, 1 - w])
    rho_n = codeword_state(np.array([rho]), np.zeros(n, dtype=int))
    mid = pi @ rho_n @ pi
    lo = _min_eig(mid - 2.0 ** (-n * (h + delta)) * pi)
    hi = _min_eig(2.0 ** (-n * (h - delta)) * pi - mid)
    return min(lo, hi)


def check_typp_three(rng, trial: int, fault: bool = False) -> float:
    """``(1 - eps) 2^{n(H-delta)} <= Tr{Pi} <= 2^{n(H+delta)}`` with ``1 - eps = Tr{rho^n Pi}``."""
    rho, w, n, delta, pi = _typp_instance(rng, trial)
    h = shannon_entropy([w, 1 - w])
    rank = float(np.real(np.trace(pi)))
    rho_n = codeword_state(np.array([rho]), np.zeros(n, dtype=int))
    one_minus_eps = float(np.real(np.trace(rho_n @ pi)))
    up = 2.0 ** (n * (h + delta)) - rank
    down = rank - one_minus_eps * 2.0 ** (n * (h - delta))
    return min(up, down)


def check_povm(rng, trial: int, fault: bool = False) -> float:
    """Square-root measurement outcomes are PSD and sum to the identity."""
    d = int(rng.integers(2, 9))
    k = int(rng.integers(1, 6))
    ops = [_rand_psd(rng, d) for _ in range(k)]
    povm = srm_povm(ops)
    if fault:
        povm = Povm(0.9 * povm.outcomes, povm.completion)
    return min(PROPERTY_TOL - povm.completeness_error(), povm.min_eigenvalue() + PROPERTY_TOL)


_RUNNERS: dict[str, Callable] = {
    "hayashi_nagaoka": check_hayashi_nagaoka,
    "projector_trick": check_projector_trick,
    "gentle_operator": check_gentle_operator,
    "tr_trick": check_tr_trick,
    "typp_one": check_typp_one,
    "typp_two": check_typp_two,
    "typp_three": check_typp_three,
    "povm": check_povm,
}


def property_harness(trials: int = 100, seed: int = 0, tol: float = PROPERTY_TOL,
                     faults: tuple[str, ...] = (), checks: tuple[str, ...] = CHECKS) -> dict:
    """Run every check on ``trials`` seeded instances and summarise the margins.

    The report lists each violation as ``{"check", "trial", "margin"}`` and sets
    ``passed`` only when there are none.
    """
    bad = set(faults) - set(FAULTS)
    if bad:
        raise ValueError(f"unknown fault(s) {sorted(bad)}; available: {FAULTS}")
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    results = {}
    failures = []
    for ci, name in enumerate(checks):
        runner = _RUNNERS[name]
        seqs = np.random.SeedSequence([seed, ci]).spawn(trials) if trials else []
        margins = []
        for t, ss in enumerate(seqs):
            m = runner(np.random.default_rng(ss), t, fault=name in faults)
            margins.append(m)
            if m < -tol:
                failures.append({"check": name, "trial": t, "margin": m})
        results[name] = {
            "trials": trials,
            "violations": sum(1 for m in margins if m < -tol),
            "worst_margin": min(margins) if margins else None,
        }
    return {
        "seed": int(seed),
        "trials": int(trials),
        "tolerance": tol,
        "faults": sorted(faults),
        "checks": results,
        "failures": failures,
        "passed": not failures,
    }
