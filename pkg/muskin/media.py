"""
Physical parameters of the transmission problem and every derived scalar
that the solver, the asymptotic expansion and the stability bounds use.

Time dependence is ``exp(-i omega t)``. The two media are the outer
conductor ``Omega_plus`` and the inner, highly permeable conductor
``Omega_minus``.
"""

import logging
import math
import cmath
from typing import Any, Literal, Tuple

from pydantic import BaseModel
from backports.cached_property import cached_property

from muskin.errors import ParameterDomainError


logger = logging.getLogger(__name__)

Side = Literal["plus", "minus"]


class MediaParams(BaseModel):
    """
    One parameter set of the transmission problem, in coherent SI units

    Example
    -------
    ::

        p = MediaParams(omega=1.0, eps0=1.0, mu_plus=1.0, mu_r=1e4,
                        sigma_plus=1.0, sigma_minus=50.0)
        d = p.derived
        print(d.eps, d.lambda_)

    """

    omega: float
    """Angular frequency in rad/s, strictly positive"""

    eps0: float
    """Electric permittivity in F/m"""

    mu_plus: float
    """Magnetic permeability of the outer medium in H/m"""

    mu_r: float
    """Relative permeability mu_minus / mu_plus, at least 1"""

    sigma_plus: float
    """Conductivity of the outer medium in S/m"""

    sigma_minus: float
    """Conductivity of the inner medium in S/m"""

    def __init__(self, **kwargs: Any) -> None:
        super().__init__(**kwargs)
        check_domain(self)

    @property
    def mu_minus(self) -> float:
        return self.mu_r * self.mu_plus

    @cached_property
    def derived(self) -> "DerivedParams":
        return derive_params(self)

    def with_mu_r(self, mu_r: float) -> "MediaParams":
        """Returns a copy that differs only in the contrast ``mu_r``"""
        return MediaParams(**{**self.model_dump(), "mu_r": mu_r})

    def sigma(self, side: Side) -> float:
        return self.sigma_plus if side == "plus" else self.sigma_minus

    def mu(self, side: Side) -> float:
        return self.mu_plus if side == "plus" else self.mu_minus

    class Config:
        frozen = True
        ignored_types = (cached_property,)


class DerivedParams(BaseModel):
    """
    Derived quantities of a :class:`MediaParams` set

    ``lambda_`` is the complex boundary-layer rate, normalised such that
    ``-lambda_**2 == kappa_plus**2 * alpha_minus`` and ``Re(lambda_) > 0``.
    The interior wavenumber is ``k_minus = 1j * lambda_ / eps``.
    """

    media: MediaParams
    eps: float
    kappa_plus: float
    delta_plus: float
    delta_minus: float
    alpha_plus: complex
    alpha_minus: complex
    theta_minus: float
    lambda_: complex
    stab_m: float
    stab_C1: float
    stab_C2: float

    @property
    def k_plus(self) -> complex:
        """Wavenumber of the outer medium, ``k_plus**2 = kappa_plus**2 * alpha_plus``"""
        return self.kappa_plus * cmath.sqrt(self.alpha_plus)

    @property
    def k_minus(self) -> complex:
        """Wavenumber of the inner medium, ``k_minus**2 = kappa_plus**2 * alpha_minus / eps**2``"""
        return 1j * self.lambda_ / self.eps

    @property
    def contrast(self) -> complex:
        """The ratio ``alpha_minus / alpha_plus`` entering the surface traces"""
        return self.alpha_minus / self.alpha_plus

    def wavenumber(self, side: Side) -> complex:
        return self.k_plus if side == "plus" else self.k_minus

    def alpha(self, side: Side) -> complex:
        return self.alpha_plus if side == "plus" else self.alpha_minus

    def admittance(self, side: Side) -> complex:
        """The factor ``i omega eps0 - sigma`` of the medium on ``side``"""
        p = self.media
        return 1j * p.omega * p.eps0 - p.sigma(side)

    def impedance_factor(self, side: Side) -> complex:
        """The inverse of :meth:`admittance`, mapping ``j - curl H`` to ``E``"""
        return 1.0 / self.admittance(side)

    class Config:
        frozen = True
        arbitrary_types_allowed = True


def check_domain(p: MediaParams) -> None:
    """
    Raises :class:`muskin.errors.ParameterDomainError` if ``p`` is not
    an admissible parameter set
    """
    for name in ("omega", "eps0", "mu_plus", "sigma_plus", "sigma_minus"):
        value = getattr(p, name)
        if not math.isfinite(value) or value <= 0:
            raise ParameterDomainError(f"{name} must be positive and finite, got {value}")
    if not math.isfinite(p.mu_r) or p.mu_r < 1:
        raise ParameterDomainError(f"mu_r must be at least 1, got {p.mu_r}")


def _delta(p: MediaParams, sigma: float) -> float:
    return math.sqrt(p.omega * p.eps0 / sigma)


def stability_constants(p: MediaParams) -> Tuple[float, float, float]:
    """
    The constants ``m``, ``C1`` and ``C2`` of the uniform energy bounds

    ``||curl H|| <= C1 ||j||`` and ``sqrt(mu_minus) ||H||_{Omega_minus} <= C2 ||j||``
    hold for every solution with perfectly insulating outer boundary.

    Parameters
    ----------
    p: :class:`MediaParams`
        The parameter set

    Returns
    -------
    tuple of float
        ``(m, C1, C2)``

    Raises
    ------
    ParameterDomainError
        If ``p`` is not admissible
    """
    check_domain(p)
    w2 = (p.omega * p.eps0) ** 2
    m = min(math.sqrt(w2 + s**2) for s in (p.sigma_plus, p.sigma_minus))
    c1 = max((w2 + s**2) / s for s in (p.sigma_plus, p.sigma_minus)) / m
    c2 = math.sqrt(p.eps0 * c1**2 / m**2 + c1 / (p.omega * m))
    return m, c1, c2


def derive_params(p: MediaParams) -> DerivedParams:
    """
    Computes all derived quantities of a parameter set

    Parameters
    ----------
    p: :class:`MediaParams`
        The parameter set

    Returns
    -------
    :class:`DerivedParams`

    Raises
    ------
    ParameterDomainError
        If ``p`` is not admissible
    """
    check_domain(p)
    kappa_plus = p.omega * math.sqrt(p.eps0 * p.mu_plus)
    delta_plus = _delta(p, p.sigma_plus)
    delta_minus = _delta(p, p.sigma_minus)
    theta_minus = math.atan(1.0 / delta_minus**2)
    modulus = kappa_plus * (1.0 + 1.0 / delta_minus**4) ** 0.25
    lambda_ = modulus * cmath.exp(0.5j * (theta_minus - math.pi))
    m, c1, c2 = stability_constants(p)
    logger.debug("Derived lambda=%s for mu_r=%s", lambda_, p.mu_r)
    return DerivedParams(
        media=p,
        eps=1.0 / math.sqrt(p.mu_r),
        kappa_plus=kappa_plus,
        delta_plus=delta_plus,
        delta_minus=delta_minus,
        alpha_plus=complex(1.0, 1.0 / delta_plus**2),
        alpha_minus=complex(1.0, 1.0 / delta_minus**2),
        theta_minus=theta_minus,
        lambda_=lambda_,
        stab_m=m,
        stab_C1=c1,
        stab_C2=c2,
    )
