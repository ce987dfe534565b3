"""Channel data model: cc-qq interference channels, induced MACs, classical embedding.

A channel is stored as one array ``states`` of shape ``(|X1|, |X2|, D, D)``; input
pairs are addressed by zero-based integer indices.

Channel files are JSON documents::

    {
      "format": "qicrates-channel/1",
      "nx1": 2, "nx2": 2, "dB1": 2, "dB2": 2,
      "states": [
        {"x1": 0, "x2": 0, "matrix": [[[re, im], ...], ...]},
        ...
      ]
    }

``states`` may be replaced by a ``"classical"`` block holding a probability
table ``p[x1][x2][y1][y2]``; it is expanded with :func:`classical_embed` on load
(the output dimensions are then read from the table and ``dB1``/``dB2`` are
optional). See ``docs/channel-format.md`` for the full schema.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .linalg import DENSITY_TOL, check_density, partial_trace, random_density

FORMAT_TAG = "qicrates-channel/1"
PROB_TOL = 1e-12


def check_distribution(p, size: int | None = None, tol: float = PROB_TOL, what: str = "distribution") -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValidationError(f"{what}: expected a non-empty 1-D probability vector")
    if size is not None and a.size != size:
        raise ValidationError(f"{what}: has {a.size} entries, alphabet has {size}")
    if np.any(a < 0):
        raise ValidationError(f"{what}: negative probability")
    if abs(a.sum() - 1.0) > tol:
        raise ValidationError(f"{what}: sums to {a.sum():.15g}")
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _validate_states(states: np.ndarray, tol: float) -> None:
    nx1, nx2 = states.shape[:2]
    for x1 in range(nx1):
        for x2 in range(nx2):
            check_density(states[x1, x2], tol=tol, what=f"output state for input pair (x1={x1}, x2={x2})")


@dataclass(frozen=True, eq=False)
class CcqqChannel:
    """Classical inputs ``(x1, x2)`` mapped to states on ``B1 ⊗ B2``."""

    states: np.ndarray
    dB1: int
    dB2: int
    labels_x1: tuple[str, ...] | None = None
    labels_x2: tuple[str, ...] | None = None
    tol: float = field(default=DENSITY_TOL, repr=False)

    def __post_init__(self):
        s = np.asarray(self.states)
        D = self.dB1 * self.dB2
        if s.ndim != 4 or s.shape[2:] != (D, D):
            raise ValidationError(f"states must have shape (nx1, nx2, {D}, {D}), got {s.shape}")
        _validate_states(s, self.tol)
        object.__setattr__(self, "states", _frozen(s))
        for name, n in (("labels_x1", s.shape[0]), ("labels_x2", s.shape[1])):
            labels = getattr(self, name)
            if labels is not None:
                labels = tuple(str(v) for v in labels)
                if len(labels) != n:
                    raise ValidationError(f"{name} has {len(labels)} entries, alphabet has {n}")
                object.__setattr__(self, name, labels)

    @property
    def nx1(self) -> int:
        return self.states.shape[0]

    @property
    def nx2(self) -> int:
        return self.states.shape[1]

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dB1, self.dB2)

    def state(self, x1: int, x2: int) -> np.ndarray:
        return self.states[x1, x2]

    def __eq__(self, other):
        if not isinstance(other, CcqqChannel):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.states, other.states)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class CcqMac:
    """Classical inputs ``(x1, x2)`` mapped to states on a single system ``B``."""

    states: np.ndarray
    tol: float = field(default=DENSITY_TOL, repr=False)

    def __post_init__(self):
        s = np.asarray(self.states)
        if s.ndim != 4 or s.shape[2] != s.shape[3]:
            raise ValidationError(f"states must have shape (nx1, nx2, d, d), got {s.shape}")
        _validate_states(s, self.tol)
        object.__setattr__(self, "states", _frozen(s))

    @property
    def nx1(self) -> int:
        return self.states.shape[0]

    @property
    def nx2(self) -> int:
        return self.states.shape[1]

    @property
    def dB(self) -> int:
        return self.states.shape[2]


def induced_mac(ch: CcqqChannel, receiver: int) -> CcqMac:
    """The MAC seen by one receiver: trace out the other output system."""
    if receiver not in (1, 2):
        raise ValueError(f"receiver must be 1 or 2, got {receiver!r}")
    keep = "A" if receiver == 1 else "B"
    d = ch.dB1 if receiver == 1 else ch.dB2
    out = np.empty((ch.nx1, ch.nx2, d, d), dtype=complex)
    for x1 in range(ch.nx1):
        for x2 in range(ch.nx2):
            out[x1, x2] = partial_trace(ch.states[x1, x2], ch.dims, keep)
    return CcqMac(out)


def classical_embed(p, tol: float = 1e-9) -> CcqqChannel:
    """Embed a classical channel ``p[x1, x2, y1, y2] = p(y1, y2 | x1, x2)``.

    Each output state is diagonal in the product basis ``|y1> ⊗ |y2>``.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 4:
        raise ValidationError(f"probability table must be 4-D p[x1][x2][y1][y2], got {p.ndim}-D")
    nx1, nx2, dy1, dy2 = p.shape
    if np.any(p < 0):
        raise ValidationError("probability table has negative entries")
    sums = p.reshape(nx1, nx2, -1).sum(axis=2)
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if bad.size:
        x1, x2 = bad[0]
        raise ValidationError(
            f"conditional row for input pair (x1={x1}, x2={x2}) sums to {sums[x1, x2]:.12g}"
        )
    D = dy1 * dy2
    states = np.zeros((nx1, nx2, D, D), dtype=complex)
    idx = np.arange(D)
    states[:, :, idx, idx] = p.reshape(nx1, nx2, D)
    return CcqqChannel(states, dy1, dy2)


def product_channel(states_b1, states_b2) -> CcqqChannel:
    """Interference-free channel ``rho_{x1} ⊗ sigma_{x2}``.

    ``states_b1`` has shape ``(|X1|, dB1, dB1)`` and ``states_b2`` ``(|X2|, dB2, dB2)``.
    """
    s1 = np.asarray(states_b1, dtype=complex)
    s2 = np.asarray(states_b2, dtype=complex)
    states = np.einsum("aij,bkl->abikjl", s1, s2)
    n1, n2, d1, d2 = states.shape[:4]
    return CcqqChannel(states.reshape(n1, n2, d1 * d2, d1 * d2), d1, d2)


def swap_outputs(ch: CcqqChannel) -> CcqqChannel:
    """Relabel ``B1 <-> B2`` and ``X1 <-> X2`` (the mirror-image channel)."""
    t = ch.states.reshape(ch.nx1, ch.nx2, ch.dB1, ch.dB2, ch.dB1, ch.dB2)
    t = t.transpose(1, 0, 3, 2, 5, 4)
    D = ch.dB1 * ch.dB2
    return CcqqChannel(t.reshape(ch.nx2, ch.nx1, D, D), ch.dB2, ch.dB1)


def random_classical_table(rng: np.random.Generator, nx1: int, nx2: int, dy1: int, dy2: int,
                           concentration: float = 1.0) -> np.ndarray:
    p = rng.dirichlet(np.full(dy1 * dy2, concentration), size=(nx1, nx2))
    return p.reshape(nx1, nx2, dy1, dy2)


def random_channel(rng: np.random.Generator, nx1: int = 2, nx2: int = 2, dB1: int = 2, dB2: int = 2,
                   rank: int | None = None) -> CcqqChannel:
    D = dB1 * dB2
    states = np.array([[random_density(rng, D, rank) for _ in range(nx2)] for _ in range(nx1)])
    return CcqqChannel(states, dB1, dB2)



def random_mac(rng: np.random.Generator, nx1: int = 2, nx2: int = 2, dB: int = 2,
               rank: int | None = None) -> CcqMac:
    states = np.array([[random_density(rng, dB, rank) for _ in range(nx2)] for _ in range(nx1)])
    return CcqMac(states)

# ---------------------------------------------------------------- file format

def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _decode_matrix(obj, D: int, where: str) -> np.ndarray:
    try:
        a = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}: matrix is not a nested array of numbers") from exc
    if a.shape != (D, D, 2):
        raise ValidationError(f"{where}: expected a {D}x{D} array of [re, im] pairs, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def channel_to_dict(ch: CcqqChannel) -> dict:
    doc = {"format": FORMAT_TAG, "nx1": ch.nx1, "nx2": ch.nx2, "dB1": ch.dB1, "dB2": ch.dB2}
    if ch.labels_x1 is not None:
        doc["labels_x1"] = list(ch.labels_x1)
    if ch.labels_x2 is not None:
        doc["labels_x2"] = list(ch.labels_x2)
    doc["states"] = [
        {"x1": x1, "x2": x2, "matrix": _encode_matrix(ch.states[x1, x2])}
        for x1 in range(ch.nx1)
        for x2 in range(ch.nx2)
    ]
    return doc


def channel_from_dict(doc: dict) -> CcqqChannel:
    if not isinstance(doc, dict):
        raise ValidationError("channel file must hold a JSON object")
    fmt = doc.get("format", FORMAT_TAG)
    if fmt != FORMAT_TAG:
        raise ValidationError(f"unsupported channel format {fmt!r}")
    labels = doc.get("labels_x1"), doc.get("labels_x2")
    if "classical" in doc:
        block = doc["classical"]
        table = block.get("table") if isinstance(block, dict) else block
        try:
            p = np.array(table, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError("classical table is not a rectangular nested array") from exc
        if p.ndim != 4:
            raise ValidationError(f"classical table must be indexed [x1][x2][y1][y2], got {p.ndim} levels")
        for key, n in (("nx1", p.shape[0]), ("nx2", p.shape[1]), ("dB1", p.shape[2]), ("dB2", p.shape[3])):
            if key in doc and int(doc[key]) != n:
                raise ValidationError(f"{key}={doc[key]} disagrees with classical table shape {p.shape}")
        ch = classical_embed(p)
        if labels != (None, None):
            ch = CcqqChannel(ch.states, ch.dB1, ch.dB2, *labels)
        return ch

    try:
        nx1, nx2 = int(doc["nx1"]), int(doc["nx2"])
        dB1, dB2 = int(doc["dB1"]), int(doc["dB2"])
        entries = doc["states"]
    except KeyError as exc:
        raise ValidationError(f"channel file missing field {exc.args[0]!r}") from None
    if min(nx1, nx2, dB1, dB2) < 1:
        raise ValidationError("alphabet sizes and dimensions must be >= 1")
    D = dB1 * dB2
    states = np.zeros((nx1, nx2, D, D), dtype=complex)
    seen = set()
    for k, entry in enumerate(entries):
        try:
            x1, x2 = int(entry["x1"]), int(entry["x2"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError(f"states[{k}]: needs integer fields x1 and x2") from None
        if not (0 <= x1 < nx1 and 0 <= x2 < nx2):
            raise ValidationError(f"states[{k}]: input pair (x1={x1}, x2={x2}) out of range")
        if (x1, x2) in seen:
            raise ValidationError(f"duplicate state for input pair (x1={x1}, x2={x2})")
        seen.add((x1, x2))
        states[x1, x2] = _decode_matrix(entry.get("matrix"), D, f"input pair (x1={x1}, x2={x2})")
    missing = [(a, b) for a in range(nx1) for b in range(nx2) if (a, b) not in seen]
    if missing:
        raise ValidationError(f"no state given for input pair (x1={missing[0][0]}, x2={missing[0][1]})")
    return CcqqChannel(states, dB1, dB2, *labels)


def _dumps(doc: dict) -> str:
    # one matrix row (or table row) per line keeps files diffable and hand-editable
    lines = ["{"]
    items = list(doc.items())
    for i, (key, val) in enumerate(items):
        tail = "," if i < len(items) - 1 else ""
        if key == "states":
            lines.append('  "states": [')
            for j, st in enumerate(val):
                rows = ",\n      ".join(json.dumps(r, separators=(", ", ": ")) for r in st["matrix"])
                sep = "," if j < len(val) - 1 else ""
                lines.append(f'    {{"x1": {st["x1"]}, "x2": {st["x2"]}, "matrix": [\n      {rows}\n    ]}}{sep}')
            lines.append(f"  ]{tail}")
        elif key == "classical":
            rows = ",\n    ".join(json.dumps(r) for r in val["table"])
            lines.append(f'  "classical": {{"table": [\n    {rows}\n  ]}}{tail}')
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val)}{tail}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_channel(ch: CcqqChannel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps(channel_to_dict(ch)))


def save_classical(p, path) -> None:
    """Write a classical table ``p[x1][x2][y1][y2]`` using the shorthand block."""
    p = np.asarray(p, dtype=float)
    classical_embed(p)  # validate before writing
    nx1, nx2, dy1, dy2 = p.shape
    doc = {"format": FORMAT_TAG, "nx1": nx1, "nx2": nx2, "dB1": dy1, "dB2": dy2,
           "classical": {"table": p.tolist()}}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps(doc))


def load_channel(path: str | os.PathLike) -> CcqqChannel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: parse error: {exc}") from exc
    return channel_from_dict(doc)
