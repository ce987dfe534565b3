"""Finite block-length simulation of the two-sender simultaneous decoder.

Codebooks are drawn i.i.d., the decoder is the square-root measurement built
from sandwiched typical projectors, and every error probability is an exact
trace over the ``dB**n``-dimensional output space. Typicality is entropy
typicality throughout: a string is typical when its normalised negative
log-probability is within ``delta`` of the relevant (conditional) entropy.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import CcqMac, check_distribution
from .errors import DimensionError, GuardError, ValidationError
from .linalg import (
    clip_eigenvalues,
    eig_hermitian,
    op_func,
    shannon_entropy,
    tensor_all,
    trace_distance,
)

SET_GUARD = 10**7
DIM_GUARD = 4096
POVM_TOL = 1e-8
PSD_TOL = 1e-9


@dataclass(frozen=True)
class TypicalityConfig:
    n: int
    delta: float = 0.2

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"block length must be a positive integer, got {self.n}")
        if not self.delta > 0:
            raise ValidationError(f"delta must be positive, got {self.delta}")


def _string_logprobs(per_letter: list[np.ndarray]) -> np.ndarray:
    """``sum_i log2 q_i(y_i)`` for every string, flattened in lexicographic order."""
    total = np.zeros(1)
    with np.errstate(divide="ignore"):
        for q in per_letter:
            total = np.add.outer(total, np.log2(q)).ravel()
    return total


def _typical_mask(per_letter: list[np.ndarray], h: float, delta: float) -> np.ndarray:
    n = len(per_letter)
    lp = _string_logprobs(per_letter)
    # zero-probability strings have log-probability -inf and are never typical
    return np.isfinite(lp) & (np.abs(-lp / n - h) <= delta)


def typical_set(p, cfg: TypicalityConfig) -> np.ndarray:
    """All delta-typical sequences of ``p``, one per row, in lexicographic order."""
    p = check_distribution(p, what="p")
    if p.size ** cfg.n > SET_GUARD:
        raise GuardError(f"|X|^n = {p.size}^{cfg.n} exceeds the enumeration guard {SET_GUARD}")
    mask = _typical_mask([p] * cfg.n, shannon_entropy(p), cfg.delta)
    idx = np.flatnonzero(mask)
    return np.stack(np.unravel_index(idx, (p.size,) * cfg.n), axis=1) if cfg.n else idx[:, None]


def _guard_dim(d: int, n: int):
    if d**n > DIM_GUARD:
        raise GuardError(f"dim^n = {d}^{n} = {d**n} exceeds the simulation guard {DIM_GUARD}")


def _spectra(states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ws, vs = [], []
    for s in states:
        w, v = eig_hermitian(s)
        ws.append(clip_eigenvalues(w))
        vs.append(v)
    return np.array(ws), np.array(vs)


def _projector(vecs: list[np.ndarray], mask: np.ndarray) -> np.ndarray:
    u = tensor_all(vecs)
    return (u * mask) @ u.conj().T


def typical_projector(rho, cfg: TypicalityConfig) -> np.ndarray:
    """Projector onto eigenvector products whose eigenvalue strings are typical."""
    w, v = eig_hermitian(rho)
    w = clip_eigenvalues(w)
    _guard_dim(w.size, cfg.n)
    mask = _typical_mask([w] * cfg.n, shannon_entropy(w), cfg.delta)
    return _projector([v] * cfg.n, mask)


def cond_typical_projector(states, xn, p, cfg: TypicalityConfig) -> np.ndarray:
    """The ``x^n``-conditionally typical projector of the signal states ``states[x]``.

    ``p`` is the input distribution defining ``H(B|X) = sum_x p(x) H(states[x])``;
    the eigenvalue string ``y^n`` is typical when
    ``|-(1/n) log p(y^n|x^n) - H(B|X)| <= delta``.
    """
    states = np.asarray(states, dtype=complex)
    xn = np.asarray(xn, dtype=int)
    if xn.shape != (cfg.n,):
        raise DimensionError(f"sequence of length {xn.size} does not match block length {cfg.n}")
    p = check_distribution(p, states.shape[0], what="p")
    _guard_dim(states.shape[-1], cfg.n)
    ws, vs = _spectra(states)
    h = float(sum(px * shannon_entropy(w) for px, w in zip(p, ws)))
    mask = _typical_mask([ws[x] for x in xn], h, cfg.delta)
    return _projector([vs[x] for x in xn], mask)


def averaged_states(mac: CcqMac, p1, p2):
    """Code-averaged states ``(rho_bar_x1[x1], rho_bar_x2[x2], rho_bar)``."""
    p1 = check_distribution(p1, mac.nx1, what="p1")
    p2 = check_distribution(p2, mac.nx2, what="p2")
    rx1 = np.einsum("j,ijab->iab", p2, mac.states)
    rx2 = np.einsum("i,ijab->jab", p1, mac.states)
    rbar = np.einsum("i,iab->ab", p1, rx1)
    return rx1, rx2, rbar


# ---------------------------------------------------------------- codebooks

@dataclass(frozen=True, eq=False)
class Codebook:
    """``codewords[m]`` is the length-``n`` symbol sequence of message ``m``."""

    n: int
    rate: float
    codewords: np.ndarray

    @property
    def size(self) -> int:
        return self.codewords.shape[0]


def codebook_size(n: int, rate: float) -> int:
    if rate < 0:
        raise ValidationError(f"rates must be nonnegative, got {rate}")
    # the small offset keeps 2 ** (n * rate) from rounding below an exact integer
    return max(1, int(math.floor(2.0 ** (n * rate) + 1e-9)))


def random_codebook(rng: np.random.Generator, p, n: int, rate: float) -> Codebook:
    p = check_distribution(p, what="p")
    m = codebook_size(n, rate)
    words = rng.choice(p.size, size=(m, n), p=p)
    return Codebook(n, float(rate), words)


def codeword_state(states: np.ndarray, xn) -> np.ndarray:
    """``states[x_1] ⊗ ... ⊗ states[x_n]``."""
    return tensor_all([states[x] for x in xn])


# ------------------------------------------------------------------ decoder

def sandwich_op(pi_bar: np.ndarray, pi_m1: np.ndarray, pi_m12: np.ndarray) -> np.ndarray:
    """``Pi_bar Pi_m1 Pi_m1m2 Pi_m1 Pi_bar``, the conjugation reading of the sandwich."""
    a = pi_bar @ pi_m1
    return a @ pi_m12 @ a.conj().T


@dataclass(frozen=True, eq=False)
class Povm:
    """Measurement outcomes, with ``outcomes[completion]`` the residual ``I - sum``."""

    outcomes: np.ndarray
    completion: int | None = None

    def problems(self, tol: float = POVM_TOL) -> list[str]:
        out = []
        d = self.outcomes.shape[-1]
        for k, e in enumerate(self.outcomes):
            lam = np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0]
            if lam < -PSD_TOL:
                out.append(f"outcome {k} is not PSD (min eigenvalue {lam:.3g})")
            if np.max(np.abs(e - e.conj().T)) > tol:
                out.append(f"outcome {k} is not Hermitian")
        dev = np.max(np.abs(self.outcomes.sum(axis=0) - np.eye(d)))
        if dev > tol:
            out.append(f"outcomes do not sum to the identity (max deviation {dev:.3g})")
        return out

    def completeness_error(self) -> float:
        d = self.outcomes.shape[-1]
        return float(np.max(np.abs(self.outcomes.sum(axis=0) - np.eye(d))))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.outcomes + np.conj(np.swapaxes(self.outcomes, -1, -2)))
        return float(np.linalg.eigvalsh(h)[:, 0].min())


def srm_povm(ops) -> Povm:
    """Square-root measurement ``S^{-1/2} A_k S^{-1/2}`` with a residual outcome.

    The inverse root is taken on the support of ``S = sum_k A_k``, so the
    measurement outcomes sum to the support projector and the residual
    ``I - sum_k Lambda_k`` is appended last.
    """
    ops = np.asarray(ops, dtype=complex)
    s = ops.sum(axis=0)
    r = op_func(s, "inv_sqrt_pseudo")
    lam = r @ ops @ r
    lam = 0.5 * (lam + np.conj(np.swapaxes(lam, -1, -2)))
    resid = np.eye(s.shape[0]) - lam.sum(axis=0)
    resid = 0.5 * (resid + resid.conj().T)
    return Povm(np.concatenate([lam, resid[None]]), completion=len(ops))


def _codeword_states(mac: CcqMac, cb1: Codebook, cb2: Codebook) -> np.ndarray:
    """Output states indexed by ``m1 * |M2| + m2``."""
    out = []
    for w1 in cb1.codewords:
        for w2 in cb2.codewords:
            out.append(tensor_all([mac.states[a, b] for a, b in zip(w1, w2)]))
    return np.array(out)


def _pair_traces(ops: np.ndarray, states: np.ndarray) -> np.ndarray:
    """``T[k, m] = Tr{ops[k] states[m]}`` (both Hermitian)."""
    k, d, _ = ops.shape
    a = ops.reshape(k, d * d)
    b = np.swapaxes(states, -1, -2).reshape(states.shape[0], d * d)
    return np.real(a @ b.T)


def avg_error_prob(mac: CcqMac, cb1: Codebook, cb2: Codebook, povm: Povm,
                   states: np.ndarray | None = None) -> float:
    """Exact ``(1/|M1||M2|) sum Tr{(I - Lambda_{m1,m2}) rho_{m1,m2}}``.

    Outcome ``m1 * |M2| + m2`` decodes to ``(m1, m2)``; the residual outcome is
    always an error.
    """
    if cb1.n != cb2.n:
        raise DimensionError(f"codebook block lengths differ ({cb1.n} vs {cb2.n})")
    k = cb1.size * cb2.size
    d = mac.dB ** cb1.n
    if povm.outcomes.shape[-1] != d:
        raise DimensionError(f"POVM acts on dimension {povm.outcomes.shape[-1]}, block needs {d}")
    if povm.outcomes.shape[0] < k:
        raise DimensionError(f"POVM has {povm.outcomes.shape[0]} outcomes for {k} message pairs")
    if states is None:
        states = _codeword_states(mac, cb1, cb2)
    succ = np.real(np.einsum("kab,kba->k", povm.outcomes[:k], states))
    return float(np.clip(1.0 - succ.mean(), 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class DecoderData:
    """Everything the simultaneous decoder builds for one pair of codebooks."""

    states: np.ndarray       # rho_{m1,m2}
    sandwich: np.ndarray     # Pi'_{m1,m2}
    pi_m2: np.ndarray        # smoothing projectors, one per m2
    povm: Povm
    m1: int
    m2: int


def build_decoder(mac: CcqMac, p1, p2, cb1: Codebook, cb2: Codebook, cfg: TypicalityConfig) -> DecoderData:
    if cb1.n != cfg.n or cb2.n != cfg.n:
        raise DimensionError("codebook block length differs from the typicality configuration")
    _guard_dim(mac.dB, cfg.n)
    p1 = check_distribution(p1, mac.nx1, what="p1")
    p2 = check_distribution(p2, mac.nx2, what="p2")
    rx1, rx2, rbar = averaged_states(mac, p1, p2)
    pair_states = mac.states.reshape(-1, mac.dB, mac.dB)
    p12 = np.outer(p1, p2).ravel()
    pi_bar = typical_projector(rbar, cfg)
    pi_1 = [cond_typical_projector(rx1, w, p1, cfg) for w in cb1.codewords]
    pi_2 = np.array([cond_typical_projector(rx2, w, p2, cfg) for w in cb2.codewords])
    sand = []
    for i, w1 in enumerate(cb1.codewords):
        for w2 in cb2.codewords:
            pi_12 = cond_typical_projector(pair_states, w1 * mac.nx2 + w2, p12, cfg)
            sand.append(sandwich_op(pi_bar, pi_1[i], pi_12))
    sand = np.array(sand)
    return DecoderData(_codeword_states(mac, cb1, cb2), sand, pi_2, srm_povm(sand), cb1.size, cb2.size)


@dataclass(frozen=True)
class ErrorBreakdown:
    """Message-averaged terms of the Hayashi-Nagaoka error bound for one code.

    ``p_correct_complement`` is ``1 - Tr{Pi' rho~}``, which also absorbs the trace
    lost to smoothing, so ``hn_bound`` always dominates ``error``; ``e1``, ``e2`` and ``e12``
    sum ``Tr{Pi'_{m'} rho~}`` over wrong pairs differing in ``m1`` only, ``m2``
    only and both; ``smoothing`` is ``||rho~ - rho||_1`` with
    ``rho~ = Pi_m2 rho Pi_m2``.
    """

    error: float
    p_correct_complement: float
    e1: float
    e2: float
    e12: float
    smoothing: float

    @property
    def hn_bound(self) -> float:
        return 2 * self.p_correct_complement + 4 * (self.e1 + self.e2 + self.e12) + self.smoothing

    def as_dict(self) -> dict:
        return {
            "error": self.error, "p_correct_complement": self.p_correct_complement,
            "e1": self.e1, "e2": self.e2, "e12": self.e12, "smoothing": self.smoothing,
            "hn_bound": self.hn_bound,
        }


def error_breakdown(dec: DecoderData) -> ErrorBreakdown:
    m1, m2 = dec.m1, dec.m2
    k = m1 * m2
    pi2 = dec.pi_m2[np.arange(k) % m2]
    smooth = pi2 @ dec.states @ pi2
    pen = np.array([trace_distance(a, b) for a, b in zip(smooth, dec.states)])
    t = _pair_traces(dec.sandwich, smooth)  # t[k', k] = Tr{Pi'_{k'} rho~_k}
    diag = np.diag(t)
    i1, i2 = np.divmod(np.arange(k), m2)
    same1 = i1[:, None] == i1[None, :]
    same2 = i2[:, None] == i2[None, :]
    e1 = (t * (~same1 & same2)).sum(axis=0)
    e2 = (t * (same1 & ~same2)).sum(axis=0)
    e12 = (t * (~same1 & ~same2)).sum(axis=0)
    err = avg_error_prob_from(dec)
    return ErrorBreakdown(
        err, float((1.0 - diag).mean()), float(e1.mean()), float(e2.mean()),
        float(e12.mean()), float(pen.mean()),
    )


def avg_error_prob_from(dec: DecoderData) -> float:
    k = dec.m1 * dec.m2
    succ = np.real(np.einsum("kab,kba->k", dec.povm.outcomes[:k], dec.states))
    return float(np.clip(1.0 - succ.mean(), 0.0, 1.0))


# --------------------------------------------------------------- campaigns

@dataclass
class SampleResult:
    index: int
    m1: int
    m2: int
    breakdown: ErrorBreakdown
    povm_completeness: float
    povm_min_eigenvalue: float
    problems: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = {"sample": self.index, "messages": [self.m1, self.m2]}
        d.update(self.breakdown.as_dict())
        d["povm_completeness_error"] = self.povm_completeness
        d["povm_min_eigenvalue"] = self.povm_min_eigenvalue
        d["povm_problems"] = self.problems
        return d


def simulate_sample(mac: CcqMac, p1, p2, cfg: TypicalityConfig, r1: float, r2: float,
                    rng: np.random.Generator, index: int = 0) -> SampleResult:
    cb1 = random_codebook(rng, p1, cfg.n, r1)
    cb2 = random_codebook(rng, p2, cfg.n, r2)
    dec = build_decoder(mac, p1, p2, cb1, cb2, cfg)
    return SampleResult(
        index, cb1.size, cb2.size, error_breakdown(dec),
        dec.povm.completeness_error(), dec.povm.min_eigenvalue(), dec.povm.problems(),
    )


def simulate(mac: CcqMac, p1, p2, n: int, r1: float, r2: float, samples: int = 50,
             seed: int = 0, delta: float = 0.2, n_jobs: int | None = None) -> dict:
    """Monte-Carlo campaign over ``samples`` random codebook pairs.

    Sample ``i`` draws its codebooks from an independent child of the seed, so
    the report does not depend on the number of threads.
    """
    if r1 < 0 or r2 < 0:
        raise ValidationError(f"rates must be nonnegative, got ({r1}, {r2})")
    if samples < 1:
        raise ValidationError("at least one codebook sample is required")
    cfg = TypicalityConfig(n, delta)
    _guard_dim(mac.dB, n)
    children = np.random.SeedSequence(seed).spawn(samples)

    def run(i):
        return simulate_sample(mac, p1, p2, cfg, r1, r2, np.random.default_rng(children[i]), i)

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            results = list(ex.map(run, range(samples)))
    else:
        results = [run(i) for i in range(samples)]
    errs = np.array([r.breakdown.error for r in results])
    return {
        "seed": int(seed),
        "n": int(n),
        "delta": float(delta),
        "rates": [float(r1), float(r2)],
        "messages": [codebook_size(n, r1), codebook_size(n, r2)],
        "p1": [float(x) for x in np.ravel(p1)],
        "p2": [float(x) for x in np.ravel(p2)],
        "samples": [r.as_dict() for r in results],
        "summary": {
            "mean_error": float(errs.mean()),
            "min_error": float(errs.min()),
            "max_error": float(errs.max()),
            "mean_hn_bound": float(np.mean([r.breakdown.hn_bound for r in results])),
            "max_povm_completeness_error": float(max(r.povm_completeness for r in results)),
            "min_povm_eigenvalue": float(min(r.povm_min_eigenvalue for r in results)),
            "povm_valid": all(not r.problems for r in results),
        },
    }
