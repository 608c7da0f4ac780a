from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the library.

    Matrix equality is ``||X - Y||_F <= eq_tol * n``; update maps compare their
    Choi matrices with ``eq_tol * n**2``.
    """

    herm_tol: float = 1e-10
    recon_tol: float = 1e-9
    eq_tol: float = 1e-9
    cluster_tol: float = 1e-8
    prob_floor: float = 1e-12
    psd_tol: float = 1e-10
    proj_tol: float = 1e-9

    def as_dict(self):
        return asdict(self)


DEFAULT_TOL = Tolerances()
