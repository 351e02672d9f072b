"""Bundled example maps, addressable by name from the command line."""

from dataclasses import dataclass

import numpy as np

from .core import Signature
from .selfmap import MapCandidate

_R2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Fixture:
    name: str
    candidate: MapCandidate
    provenance: str

    @property
    def matrix(self):
        return self.candidate.matrix

    @property
    def signature(self):
        return self.candidate.signature


def _ex51():
    M = np.zeros((4, 4))
    M[0] = [1, 0, 1, 0]
    M[1] = [0, 1, 0, 0]
    return M


def _ex52():
    I = np.eye(2)
    return np.block([[_R2 * I, I], [I, _R2 * I]])


def _ex54():
    return np.array([[1, 1, 1, 0], [1, -1, 0, 1], [1, 0, 1, 1], [0, 1, 1, -1]], dtype=float)


def _ex55(alpha=1.0):
    a = alpha
    return np.array([[1, a, 0, a], [-a, 1, a, 0], [0, a, 1, a], [a, 0, -a, 1]], dtype=float)


# Eigenpairs of the ex5.4 matrix, for reference checks.
EX54_EIGENPAIRS = [
    (1 + _R2, np.array([0.25 + _R2 / 8, _R2 / 8, 0.25 + _R2 / 8, _R2 / 8])),
    (-1 + _R2, np.array([0.25 + _R2 / 8, _R2 / 8, -0.25 - _R2 / 8, -_R2 / 8])),
    (1 - _R2, np.array([0.25 - _R2 / 8, -_R2 / 8, 0.25 - _R2 / 8, -_R2 / 8])),
    (-1 - _R2, np.array([0.25 - _R2 / 8, -_R2 / 8, -0.25 + _R2 / 8, _R2 / 8])),
]

_S22 = Signature(2, 2)

FIXTURES = {
    f.name: f
    for f in [
        Fixture(
            "ex5.1-corrected",
            MapCandidate(_ex51(), _S22),
            "[z1+z3, z2, 0, 0] on D_{2,2}: minimal map, undefined at the boundary point [1,0,-1,0] "
            "(the map [z1+z3, z4, 0, 0] would kill the positive vector e2)",
        ),
        Fixture(
            "ex5.2",
            MapCandidate(_ex52(), _S22),
            "[[sqrt2 I, I], [I, sqrt2 I]] in U(2,2): isotropic eigenspaces for sqrt2 +- 1, "
            "boundary fixed lines and no interior fixed point",
        ),
        Fixture(
            "ex5.3",
            MapCandidate(np.diag([1, -1, 1j, -1j]), _S22),
            "diag(1,-1,i,-i) in U(2,2): two interior and two exterior fixed points",
        ),
        Fixture(
            "ex5.4",
            MapCandidate(_ex54(), _S22),
            "real 4x4 element of U(2,2) with eigenvalues +-1 +- sqrt2: four boundary fixed points, "
            "none inside, no boundary fixed line",
        ),
        Fixture(
            "ex5.5",
            MapCandidate(_ex55(1.0), _S22),
            "alpha = 1 member of a non-diagonalizable family in U(2,2): characteristic polynomial "
            "(1-x)^4, two Jordan blocks of size 2",
        ),
        Fixture(
            "hyperbolic-1,1",
            MapCandidate(np.array([[_R2, 1.0], [1.0, _R2]]), Signature(1, 1)),
            "[[sqrt2, 1], [1, sqrt2]] in U(1,1): a single hyperbolic dilation of the unit disc",
        ),
    ]
}


def get_fixture(name):
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None


def ex55_matrix(alpha):
    return _ex55(alpha)
