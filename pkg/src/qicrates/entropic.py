"""Von Neumann entropic quantities of classical-quantum states.

A :class:`CqState` holds a joint distribution over named classical variables and
one quantum state per classical index tuple. Every information quantity used by
the rate regions is a conditional Holevo information ``I(T; B | C)`` with
classical ``T`` and ``C``, computed as ``H(B|C) - H(B|T C)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .channels import CcqMac, CcqqChannel, check_distribution
from .errors import DimensionError, ValidationError
from .linalg import clip_eigenvalues, shannon_entropy

INFO_TOL = 1e-9


def _names(v) -> tuple[str, ...]:
    if v is None:
        return ()
    if isinstance(v, str):
        return (v,)
    return tuple(v)


@dataclass(frozen=True)
class EntropicQuery:
    """``I(target; system | given)`` for classical ``target`` and ``given``."""

    target: tuple[str, ...]
    given: tuple[str, ...] = ()
    system: str = "B"

    def __post_init__(self):
        object.__setattr__(self, "target", _names(self.target))
        object.__setattr__(self, "given", _names(self.given))
        if not self.target:
            raise ValueError("query target is empty")
        overlap = set(self.target) & set(self.given)
        if overlap:
            raise ValueError(f"target and conditioning overlap: {sorted(overlap)}")


@dataclass(eq=False)
class CqState:
    """Classical-quantum state ``sum_k p(k) |k><k| ⊗ rho_k``.

    ``probs`` has one axis per entry of ``names``; ``states`` has the same leading
    axes followed by ``(D, D)``. ``dims`` lists the output factors: ``(dB,)`` for a
    single receiver, ``(dB1, dB2)`` for the two-receiver output. Output systems
    are named ``"B"`` (everything), and for two factors also ``"B1"``, ``"B2"``
    and ``"B1B2"``.
    """

    names: tuple[str, ...]
    probs: np.ndarray
    states: np.ndarray
    dims: tuple[int, ...]
    _reduced: dict = field(default_factory=dict, init=False, repr=False)
    _cond: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.names = tuple(self.names)
        self.probs = np.asarray(self.probs, dtype=float)
        self.states = np.asarray(self.states, dtype=complex)
        self.dims = tuple(int(d) for d in self.dims)
        if len(set(self.names)) != len(self.names):
            raise ValidationError(f"duplicate variable names {self.names}")
        if self.probs.ndim != len(self.names):
            raise DimensionError(f"{len(self.names)} names but probability tensor has {self.probs.ndim} axes")
        D = int(np.prod(self.dims))
        if self.states.shape != self.probs.shape + (D, D):
            raise DimensionError(f"states shape {self.states.shape} does not match {self.probs.shape + (D, D)}")
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValidationError("joint distribution must be nonnegative and sum to 1")

    @property
    def systems(self) -> tuple[str, ...]:
        return ("B",) if len(self.dims) == 1 else ("B", "B1", "B2", "B1B2")

    def output_states(self, system: str = "B") -> np.ndarray:
        if system not in self.systems:
            raise ValidationError(f"unknown output system {system!r}; state has {self.systems}")
        if system in ("B", "B1B2"):
            return self.states
        if system not in self._reduced:
            d1, d2 = self.dims
            t = self.states.reshape(self.probs.shape + (d1, d2, d1, d2))
            sub = "...ijkj->...ik" if system == "B1" else "...ijil->...jl"
            self._reduced[system] = np.einsum(sub, t)
        return self._reduced[system]

    def cond_entropy(self, given: Iterable[str] = (), system: str = "B") -> float:
        """``H(system | given) = sum_s p(s) H(rho_bar_s)`` in bits."""
        given = frozenset(_names(given))
        unknown = given - set(self.names)
        if unknown:
            raise ValidationError(f"unknown variable(s) {sorted(unknown)}; state has {self.names}")
        key = (system, given)
        if key not in self._cond:
            self._cond[key] = self._compute_cond_entropy(given, system)
        return self._cond[key]

    def _compute_cond_entropy(self, given: frozenset, system: str) -> float:
        rho = self.output_states(system)
        drop = tuple(i for i, n in enumerate(self.names) if n not in given)
        weighted = self.probs[(...,) + (None, None)] * rho
        blocks = weighted.sum(axis=drop) if drop else weighted
        ps = self.probs.sum(axis=drop) if drop else self.probs
        d = rho.shape[-1]
        blocks = blocks.reshape(-1, d, d)
        blocks = 0.5 * (blocks + np.conj(np.swapaxes(blocks, -1, -2)))
        # H(S B) - H(S) with the blocks p(s) rho_bar_s
        lam = clip_eigenvalues(np.linalg.eigvalsh(blocks).ravel())
        return shannon_entropy(lam) - shannon_entropy(np.ravel(ps))

    def info(self, target, given=(), system: str = "B", clip: bool = True) -> float:
        return holevo_info(self, EntropicQuery(_names(target), _names(given), system), clip=clip)


def holevo_info(state: CqState, q: EntropicQuery, clip: bool = True) -> float:
    """Conditional Holevo information ``I(T; B | C)`` in bits."""
    unknown = (set(q.target) | set(q.given)) - set(state.names)
    if unknown:
        raise ValidationError(f"unknown variable(s) {sorted(unknown)}; state has {state.names}")
    val = state.cond_entropy(q.given, q.system) - state.cond_entropy(q.target + q.given, q.system)
    if clip:
        return max(val, 0.0)
    return val


def build_mac_state(mac: CcqMac, p1, p2) -> CqState:
    p1 = check_distribution(p1, mac.nx1, what="p1")
    p2 = check_distribution(p2, mac.nx2, what="p2")
    return CqState(("X1", "X2"), np.outer(p1, p2), mac.states, (mac.dB,))


def build_ic_state(ch: CcqqChannel, p1, p2) -> CqState:
    """The state ``theta^{X1 X2 B1 B2}`` for product inputs on an interference channel."""
    p1 = check_distribution(p1, ch.nx1, what="p1")
    p2 = check_distribution(p2, ch.nx2, what="p2")
    return CqState(("X1", "X2"), np.outer(p1, p2), ch.states, ch.dims)


@dataclass(frozen=True, eq=False)
class HkInput:
    """Auxiliary-variable input for the Han-Kobayashi construction.

    Sender ``i`` draws a personal symbol ``U_i ~ pU_i`` and a common symbol
    ``W_i ~ pW_i`` independently and sends ``f_i[u, w]``.
    """

    pU1: np.ndarray
    pW1: np.ndarray
    pU2: np.ndarray
    pW2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray

    def __post_init__(self):
        for name in ("pU1", "pW1", "pU2", "pW2"):
            object.__setattr__(self, name, check_distribution(getattr(self, name), what=name))
        for name, pu, pw in (("f1", self.pU1, self.pW1), ("f2", self.pU2, self.pW2)):
            f = np.asarray(getattr(self, name))
            if f.shape != (pu.size, pw.size):
                raise ValidationError(f"{name} must be a {pu.size}x{pw.size} table, got shape {f.shape}")
            if not np.issubdtype(f.dtype, np.integer):
                if not np.all(f == np.round(f)):
                    raise ValidationError(f"{name} entries must be integer input symbols")
                f = f.astype(int)
            object.__setattr__(self, name, f)

    def input_distributions(self, nx1: int | None = None, nx2: int | None = None):
        """Distributions of ``X1`` and ``X2`` induced by the mixing tables."""
        out = []
        for pu, pw, f, n in ((self.pU1, self.pW1, self.f1, nx1), (self.pU2, self.pW2, self.f2, nx2)):
            px = np.zeros(int(f.max()) + 1 if n is None else n)
            np.add.at(px, f.ravel(), np.outer(pu, pw).ravel())
            out.append(px)
        return out[0], out[1]


def build_hk_state(ch: CcqqChannel, hk: HkInput) -> CqState:
    """State over ``(U1, W1, U2, W2)`` with output ``rho_{f1(u1,w1), f2(u2,w2)}``."""
    for name, f, n in (("f1", hk.f1, ch.nx1), ("f2", hk.f2, ch.nx2)):
        if f.min() < 0 or f.max() >= n:
            raise ValidationError(f"mixing table {name} maps outside the channel alphabet of size {n}")
    probs = np.einsum("a,b,c,d->abcd", hk.pU1, hk.pW1, hk.pU2, hk.pW2)
    states = ch.states[hk.f1[:, :, None, None], hk.f2[None, None, :, :]]
    return CqState(("U1", "W1", "U2", "W2"), probs, states, ch.dims)
