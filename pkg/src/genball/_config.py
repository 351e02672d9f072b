"""Numerical tolerances shared by every analysis routine."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle.

    Attributes
    ----------
    null : float
        Band half-width for the normalized form value ``v^H H v / v^H v``;
        inside the band a vector is classified as null.
    rank : float
        Singular values below ``rank * sigma_max`` count as zero.
    eig : float
        Admissible eigen-residual ``|Mv - lambda v|`` relative to ``|M|``.
    psd : float
        Hermitian matrices with ``lambda_min >= -psd * scale`` count as
        positive semi-definite.
    cluster : float
        Eigenvalues closer than ``cluster * |M|`` are treated as one
        (possibly defective) eigenvalue.
    """

    null: float = 1e-8
    rank: float = 1e-10
    eig: float = 1e-9
    psd: float = 1e-9
    cluster: float = 1e-6

    def __post_init__(self):
        for name in ("null", "rank", "eig", "psd", "cluster"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")

    def with_(self, **changes):
        return replace(self, **changes)


DEFAULT_TOLERANCES = Tolerances()


def resolve(tol):
    return DEFAULT_TOLERANCES if tol is None else tol
