"""
Ohmic Bath - decoherence functions Gamma(t, T) and Theta(t)

Units: hbar = k_B = 1. Times are in the user's time unit, frequencies in its
inverse. The ohmic spectral density is J(w) = eta * w * exp(-w / omega_c).

Closed forms:
    Theta(t) = eta * omega_c * t - eta * arctan(omega_c * t)
    Gamma(t) = eta * ln(1 + omega_c^2 t^2) + eta * ln(sinh(x) / x),  x = pi t / beta_hbar

The quadrature oracles integrate the defining frequency integrals independently
with scipy.integrate.quad.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Tuple, Union

import numpy as np
from scipy import integrate

from libs.dephasing_exceptions import DomainError, QuadratureError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

THERMAL_OVERFLOW_X = 30.0
THERMAL_SERIES_X = 1e-3
QUAD_OSCILLATION_NODES = 16
QUAD_LIMIT = 500
QUAD_EPSREL = 1e-10
QUAD_ACCEPT_RELERR = 1e-7


class Regime(Enum):
    """Time regimes of the collective dephasing dynamics"""
    SUB_CUTOFF = "sub-cutoff"
    QUANTUM = "quantum"
    THERMAL = "thermal"


@dataclass(frozen=True)
class BathParams:
    """
    Ohmic bath parameters

    Args:
        eta: Dimensionless coupling strength (>= 0)
        omega_c: Cutoff frequency (> 0)
        beta_hbar: Thermal time hbar/(k_B T) (> 0); math.inf is zero temperature
    """

    eta: float
    omega_c: float
    beta_hbar: float

    def __post_init__(self):
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise DomainError("BAD_BATH", f"eta must be finite and >= 0, got {self.eta}")
        if not (self.omega_c > 0 and math.isfinite(self.omega_c)):
            raise DomainError("BAD_BATH", f"omega_c must be finite and > 0, got {self.omega_c}")
        if not self.beta_hbar > 0:
            raise DomainError("BAD_BATH", f"beta_hbar must be > 0 or inf, got {self.beta_hbar}")

    @classmethod
    def calibrated(cls) -> "BathParams":
        return cls(eta=1e-3, omega_c=100.0, beta_hbar=1.0)

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta_hbar)

    @property
    def omega_T(self) -> float:
        """Thermal frequency pi / beta_hbar (0 at zero temperature)"""
        return 0.0 if self.zero_temperature else math.pi / self.beta_hbar

    def to_dict(self) -> dict:
        return {
            "eta": self.eta,
            "omega_c": self.omega_c,
            "beta_hbar": "inf" if self.zero_temperature else self.beta_hbar,
        }


@dataclass(frozen=True)
class DephasingFactors:
    """Damping exponent gamma and collective phase theta at one time"""
    gamma: float
    theta: float


def _check_time(t: ArrayLike):
    if np.any(np.asarray(t) < 0):
        raise DomainError("BAD_TIME", f"time must be >= 0, got {t}")


def _as_output(value: np.ndarray, like: ArrayLike) -> ArrayLike:
    return float(value) if np.ndim(like) == 0 else value


def spectral_density(omega: ArrayLike, p: BathParams) -> ArrayLike:
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(omega_arr < 0):
        raise DomainError("BAD_FREQUENCY", f"omega must be >= 0, got {omega}")
    return _as_output(p.eta * omega_arr * np.exp(-omega_arr / p.omega_c), omega)


def theta_closed(t: ArrayLike, p: BathParams) -> ArrayLike:
    _check_time(t)
    wt = p.omega_c * np.asarray(t, dtype=float)
    return _as_output(p.eta * (wt - np.arctan(wt)), t)


def _log_sinhc(x: np.ndarray) -> np.ndarray:
    """ln(sinh(x)/x) for x >= 0 without overflow or cancellation"""
    x = np.asarray(x, dtype=float)
    mid = np.clip(x, THERMAL_SERIES_X, THERMAL_OVERFLOW_X)
    series = x ** 2 / 6 - x ** 4 / 180 + x ** 6 / 2835
    direct = np.log(np.sinh(mid) / mid)
    large = np.maximum(x, THERMAL_OVERFLOW_X)
    asymptotic = large - np.log(2 * large)
    return np.where(
        x < THERMAL_SERIES_X, series, np.where(x > THERMAL_OVERFLOW_X, asymptotic, direct)
    )


def gamma_vacuum(t: ArrayLike, p: BathParams) -> ArrayLike:
    _check_time(t)
    wt = p.omega_c * np.asarray(t, dtype=float)
    return _as_output(p.eta * np.log1p(wt ** 2), t)


def gamma_thermal(t: ArrayLike, p: BathParams) -> ArrayLike:
    _check_time(t)
    t_arr = np.asarray(t, dtype=float)
    if p.zero_temperature:
        return _as_output(np.zeros_like(t_arr), t)
    return _as_output(p.eta * _log_sinhc(math.pi * t_arr / p.beta_hbar), t)


def gamma_closed(t: ArrayLike, p: BathParams) -> ArrayLike:
    vacuum = np.asarray(gamma_vacuum(t, p))
    thermal = np.asarray(gamma_thermal(t, p))
    return _as_output(vacuum + thermal, t)


@lru_cache(maxsize=1 << 16)
def dephasing_factors(t: float, p: BathParams) -> DephasingFactors:
    return DephasingFactors(gamma=gamma_closed(t, p), theta=theta_closed(t, p))


# --- quadrature oracles -----------------------------------------------------


def _upper_limit(t: float, p: BathParams) -> float:
    return p.omega_c * max(50.0, 20.0 + 10.0 * math.log1p(p.omega_c * t))


def _quad(
    quantity: str, t: float, func: Callable, a: float, b: float, scale: float = 0.0, **kwargs
) -> float:
    out = integrate.quad(
        func, a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT, full_output=1, **kwargs
    )
    value, abserr = out[0], out[1]
    if len(out) > 3:
        diagnostic = str(out[3])
        if abserr > QUAD_ACCEPT_RELERR * max(abs(value), scale, 1e-300):
            raise QuadratureError(quantity, t, abserr, diagnostic)
        logger.debug(
            f"{quantity}_quad(t={t}) on [{a}, {b}]: {diagnostic.strip()} (abserr={abserr:.2e})"
        )
    return value


def _oscillatory_integral(
    quantity: str,
    t: float,
    upper: float,
    smooth: Callable[[float], float],
    envelope: Callable[[float], float],
    weight: str,
) -> float:
    """
    Integral of smooth(w) over [0, upper] where smooth = envelope * (oscillating part)

    The first QUAD_OSCILLATION_NODES half periods are integrated directly with
    breakpoints at the nodes k*pi/t. The remainder is split into the
    non-oscillating envelope integral and a cos/sin weighted integral.
    """
    node = math.pi / t
    split = min(upper, QUAD_OSCILLATION_NODES * node)
    points = [k * node for k in range(1, QUAD_OSCILLATION_NODES) if k * node < split]
    head = _quad(quantity, t, smooth, 0.0, split, points=points or None)
    if split >= upper:
        return head

    if weight == "cos":
        # smooth = envelope * (1 - cos(wt))
        plain = _quad(quantity, t, envelope, split, upper)
        weighted = _quad(
            quantity, t, envelope, split, upper, scale=abs(plain), weight="cos", wvar=t
        )
        return head + plain - weighted
    # smooth = envelope * (wt - sin(wt))
    plain = t * _quad(quantity, t, lambda w: w * envelope(w), split, upper)
    weighted = _quad(
        quantity, t, envelope, split, upper, scale=abs(plain), weight="sin", wvar=t
    )
    return head + plain - weighted


def _one_minus_cos(w: float, t: float) -> float:
    return 2.0 * math.sin(0.5 * w * t) ** 2


def gamma_quad(t: float, p: BathParams) -> float:
    """
    Gamma(t) by adaptive quadrature

    Vacuum part:  2 eta * int exp(-w/omega_c) (1 - cos wt) / w dw  = eta ln(1 + omega_c^2 t^2)
    Thermal part: eta * int (1 - cos wt) / w * (coth(beta w / 2) - 1) dw = eta ln(sinh x / x)

    Raises:
        QuadratureError: tolerance not reached
    """
    _check_time(t)
    t = float(t)
    if t == 0.0:
        return 0.0

    def vacuum_envelope(w: float) -> float:
        return 2.0 * p.eta * math.exp(-w / p.omega_c) / w

    def vacuum(w: float) -> float:
        if w == 0.0:
            return 0.0
        return vacuum_envelope(w) * _one_minus_cos(w, t)

    total = _oscillatory_integral("gamma", t, _upper_limit(t, p), vacuum, vacuum_envelope, "cos")

    if not p.zero_temperature:
        beta = p.beta_hbar

        def thermal_envelope(w: float) -> float:
            if beta * w > 700.0:
                return 0.0
            return 2.0 * p.eta / (w * math.expm1(beta * w))

        def thermal(w: float) -> float:
            if w == 0.0:
                return p.eta * t * t / beta
            return thermal_envelope(w) * _one_minus_cos(w, t)

        # Bose factor tail beyond beta*w = 60 is below 1e-26
        total += _oscillatory_integral("gamma", t, 60.0 / beta, thermal, thermal_envelope, "cos")

    return total


def theta_quad(t: float, p: BathParams) -> float:
    """
    Theta(t) = eta * int exp(-w/omega_c) (wt - sin wt) / w dw by adaptive quadrature

    Raises:
        QuadratureError: tolerance not reached
    """
    _check_time(t)
    t = float(t)
    if t == 0.0:
        return 0.0

    def envelope(w: float) -> float:
        return p.eta * math.exp(-w / p.omega_c) / w

    def integrand(w: float) -> float:
        if w == 0.0:
            return 0.0
        x = w * t
        if x < 1e-3:
            odd = x ** 3 / 6 - x ** 5 / 120 + x ** 7 / 5040
        else:
            odd = x - math.sin(x)
        return envelope(w) * odd

    return _oscillatory_integral("theta", t, _upper_limit(t, p), integrand, envelope, "sin")


# --- regimes and asymptotes ---------------------------------------------------


def characteristic_times(p: BathParams) -> Tuple[float, float]:
    """(tau_c, tau_T) = (1/omega_c, 1/omega_T); tau_T is inf at zero temperature"""
    tau_T = math.inf if p.zero_temperature else 1.0 / p.omega_T
    return 1.0 / p.omega_c, tau_T


def classify_regime(t: float, p: BathParams) -> Regime:
    _check_time(t)
    tau_c, tau_T = characteristic_times(p)
    if t < tau_c:
        return Regime.SUB_CUTOFF
    if t < tau_T:
        return Regime.QUANTUM
    return Regime.THERMAL


def gamma_asymptote(t: float, p: BathParams, regime: Regime) -> float:
    """
    Leading behaviour of Gamma in a regime

    sub-cutoff: eta omega_c^2 t^2 (quadratic onset)
    quantum:    2 eta ln(omega_c t), coherences decay as (omega_c t)^(-2 eta)
    thermal:    eta omega_T t, exponential decay of coherences
    """
    _check_time(t)
    if regime is Regime.SUB_CUTOFF:
        return p.eta * (p.omega_c * t) ** 2
    if regime is Regime.QUANTUM:
        return 2.0 * p.eta * math.log(p.omega_c * t) if t > 0 else 0.0
    return p.eta * p.omega_T * t


def coherence_envelope(t: float, p: BathParams, delta_m: int) -> float:
    """|coherence factor| between sigma_z^(T) eigenvalues differing by delta_m"""
    return math.exp(-gamma_closed(t, p) * delta_m ** 2)
