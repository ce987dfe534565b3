"""Channel constructors shared by the tests."""

import numpy as np

from qicrates.channels import CcqMac, CcqqChannel


def noiseless_product_table():
    """Y1 = X1, Y2 = X2 for binary inputs."""
    p = np.zeros((2, 2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            p[x1, x2, x1, x2] = 1.0
    return p


def swap_table():
    """Y1 = (X1, X2), Y2 = (X2, X1), each output a 2-bit symbol."""
    p = np.zeros((2, 2, 4, 4))
    for x1 in range(2):
        for x2 in range(2):
            p[x1, x2, 2 * x1 + x2, 2 * x2 + x1] = 1.0
    return p


def adder_table():
    """Binary adder at receiver 1 (Y1 = X1 + X2), nothing at receiver 2."""
    p = np.zeros((2, 2, 3, 1))
    for x1 in range(2):
        for x2 in range(2):
            p[x1, x2, x1 + x2, 0] = 1.0
    return p


def bsc(e):
    return np.array([[1 - e, e], [e, 1 - e]])


def core_side_view_table(rng):
    """Strong interference by construction.

    Both receivers see independent draws of a shared noisy MAC core ``A``.
    Receiver 1 also sees ``X2`` through a BSC, receiver 2 sees ``X1``.
    Each receiver therefore learns the other sender's input at least as
    well as the intended receiver does.
    """
    core = rng.dirichlet(np.full(3, 0.4), size=(2, 2))
    e1, e2 = rng.uniform(0, 0.5, 2)
    s1, s2 = bsc(e1), bsc(e2)
    p = np.zeros((2, 2, 6, 6))
    for x1 in range(2):
        for x2 in range(2):
            y1 = np.einsum("a,c->ac", core[x1, x2], s1[x2]).ravel()
            y2 = np.einsum("a,c->ac", core[x1, x2], s2[x1]).ravel()
            p[x1, x2] = np.outer(y1, y2)
    return p


def pure_qubit_mac():
    """Signal states |0>, |+>, |->, |1> for (x1, x2) = 00, 01, 10, 11."""
    k0, k1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    kp, km = (k0 + k1) / np.sqrt(2), (k0 - k1) / np.sqrt(2)
    pr = lambda v: np.outer(v, v.conj())
    return CcqMac(np.array([[pr(k0), pr(kp)], [pr(km), pr(k1)]]))


def and_mac():
    """Deterministic classical AND, embedded on a qubit."""
    st = np.zeros((2, 2, 2, 2))
    for x1 in range(2):
        for x2 in range(2):
            st[x1, x2, x1 & x2, x1 & x2] = 1.0
    return CcqMac(st)


def mac_as_channel(mac: CcqMac) -> CcqqChannel:
    """Interference channel whose second receiver is a trivial one-dimensional system."""
    return CcqqChannel(mac.states, mac.dB, 1)
