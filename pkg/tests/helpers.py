"""Shared test utilities."""

import numpy as np


def random_unitary(m, seed):
    """Haar-distributed unitary from the QR factorisation of a complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
