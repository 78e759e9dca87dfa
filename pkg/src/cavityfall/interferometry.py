"""Two-port free-fall interferometer: signal, shot-noise SNR, Q threshold.

A Gaussian mode of initial width sigma0 is released at rest in a vertical
whispering-gallery cylinder; gratings at heights +/- y_out couple light out
onto a photodiode, with an engineered pi offset between the arms.  The
gravity-induced phase gradient tilts the expanding mode, so the photodiode
signal

    I(t) = exp(-omega0*t/Q - y_out^2/sigma^2(t)) * (1 - cos(dphi(t))),
    dphi(t) = omega0*g*t*2*y_out/c^2,

starts fully destructive (I(0) = 0) and grows until cavity decay wins.  A
shot-noise-limited detection of average power P_avg with efficiency eta_det
over integration time T_int gives

    Sn(t) = sqrt(I(t) * P_avg * eta_det * T_int / (hbar*omega0)),

the square root of the detected signal photon count.

Two width laws are provided.  "corrected" (default) is the standard Gaussian
spreading law written with hbar/m = c^2/(n_s^2*omega0):

    sigma^2(t) = sigma0^2 + [c^2 t / (2 omega0 n_s^2 sigma0)]^2.

"paper_verbatim" drops the square on the second term, which is dimensionally
a length, not an area; it is kept selectable because it is what produced the
published SNR curves, and the divergence between the two models is reported
rather than hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, ValidationError
from .units import c, g_earth, hbar

WIDTH_MODELS = ("corrected", "paper_verbatim")

#: Default trace window in cavity lifetimes: the signal envelope t^2 e^(-t/tau)
#: peaks at 2*tau, and the mode-expansion factor pushes the optimum a few tau
#: later, so ten lifetimes bracket the whole feature.
TRACE_LIFETIMES = 10.0

_PEAK_REL_TOL = 1e-9
_CROSS_REL_TOL = 1e-9
_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete parameter set of the free-fall interference experiment (SI)."""

    lambda0: float
    sigma0: float
    y_out: float
    P_avg: float
    eta_det: float
    T_int: float
    Q: float
    n_s: float = 1.0
    g: float = g_earth
    width_model: str = "corrected"

    def __post_init__(self) -> None:
        positive = (
            ("lambda0", self.lambda0),
            ("sigma0", self.sigma0),
            ("y_out", self.y_out),
            ("P_avg", self.P_avg),
            ("eta_det", self.eta_det),
            ("T_int", self.T_int),
            ("Q", self.Q),
            ("g", self.g),
        )
        for name, value in positive:
            if not (value > 0.0 and math.isfinite(value)):
                raise ValidationError(f"{name} must be > 0, got {value!r}")
        if self.eta_det > 1.0:
            raise ValidationError(f"eta_det must be in (0, 1], got {self.eta_det!r}")
        if not (self.n_s >= 1.0 and math.isfinite(self.n_s)):
            raise ValidationError(f"n_s must be >= 1, got {self.n_s!r}")
        if self.width_model not in WIDTH_MODELS:
            raise ValidationError(
                f"width_model must be one of {WIDTH_MODELS}, got {self.width_model!r}"
            )

    @property
    def omega0(self) -> float:
        """Rest angular frequency 2*pi*c/lambda0 [rad/s]."""
        return 2.0 * math.pi * c / self.lambda0

    @classmethod
    def caf2_reference(cls, Q: float = 7e10, width_model: str = "corrected") -> "ExperimentConfig":
        """Reference CaF2 whispering-gallery configuration: 1064 nm light,
        10 cm initial mode, out-couplers at +/- 50 cm, 1 mW average power,
        1e-3 detection efficiency, one hour integration."""
        return cls(
            lambda0=1.064e-6,
            sigma0=0.1,
            y_out=0.5,
            P_avg=1e-3,
            eta_det=1e-3,
            T_int=3600.0,
            Q=Q,
            n_s=1.43,
            g=9.81,
            width_model=width_model,
        )


@dataclass
class SnrTrace:
    """Sampled interference signal and SNR with refined peak and crossing."""

    t: np.ndarray
    i_signal: np.ndarray
    sn: np.ndarray
    t_peak: float
    sn_peak: float
    t_cross: float | None


@dataclass(frozen=True)
class QThresholdResult:
    """Outcome of the quality-factor bisection, with its iteration log."""

    q_min: float
    sn_peak: float
    iterations: tuple[tuple[float, float, float, float], ...]


def _require_time(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
        raise ValidationError("t must be finite and >= 0")
    return arr


def _width_squared(cfg: ExperimentConfig, t: np.ndarray) -> np.ndarray:
    term = c**2 * t / (2.0 * cfg.omega0 * cfg.n_s**2 * cfg.sigma0)
    if cfg.width_model == "paper_verbatim":
        return cfg.sigma0**2 + term
    return cfg.sigma0**2 + term**2


def mode_width(cfg: ExperimentConfig, t) -> np.ndarray | float:
    """Vertical mode width sigma(t) [m] under the configured width model."""
    return np.sqrt(_width_squared(cfg, _require_time(t)))


def phase_difference(cfg: ExperimentConfig, t) -> np.ndarray | float:
    """Gravity-induced phase difference between the out-coupling ports:
    dphi = omega0*g*t*2*y_out/c^2 [rad]; independent of n_s at fixed omega0."""
    return cfg.omega0 * cfg.g * _require_time(t) * 2.0 * cfg.y_out / c**2


def interference_signal(cfg: ExperimentConfig, t) -> np.ndarray | float:
    """Photodiode signal fraction I(t) >= 0, with I(0) = 0.

    1 - cos(dphi) is evaluated as 2*sin(dphi/2)^2, which neither cancels nor
    underflows at the tiny early-time phase differences.
    """
    t_arr = _require_time(t)
    dphi = cfg.omega0 * cfg.g * t_arr * 2.0 * cfg.y_out / c**2
    envelope = np.exp(-cfg.omega0 * t_arr / cfg.Q - cfg.y_out**2 / _width_squared(cfg, t_arr))
    return envelope * 2.0 * np.sin(0.5 * dphi) ** 2


def snr(cfg: ExperimentConfig, t) -> np.ndarray | float:
    """Shot-noise SNR sqrt(I * P_avg * eta_det * T_int / (hbar*omega0)).

    The detected-power factor P_avg*eta_det makes the count under the root a
    photon number.
    """
    photons = cfg.P_avg * cfg.eta_det * cfg.T_int / (hbar * cfg.omega0)
    return np.sqrt(interference_signal(cfg, t) * photons)


def _refine_peak(f, a: float, b: float) -> tuple[float, float]:
    # golden-section maximization; deterministic, converges far below the
    # 1e-6 relative contract
    x1 = b - _INV_GOLDEN * (b - a)
    x2 = a + _INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > _PEAK_REL_TOL * max(abs(a), abs(b)):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_GOLDEN * (b - a)
            f1 = f(x1)
    t_peak = 0.5 * (a + b)
    return t_peak, f(t_peak)


def _refine_crossing(f, a: float, b: float, level: float = 1.0) -> float:
    # bisection for the first upward crossing f(t) = level inside [a, b]
    fa = f(a) - level
    while (b - a) > _CROSS_REL_TOL * b:
        mid = 0.5 * (a + b)
        if fa * (f(mid) - level) <= 0.0:
            b = mid
        else:
            a = mid
            fa = f(a) - level
    return 0.5 * (a + b)


def snr_trace(cfg: ExperimentConfig, t_max: float | None = None, n_samples: int = 512) -> SnrTrace:
    """Uniformly sampled Sn(t) on [0, t_max] with refined peak and crossing.

    t_max defaults to TRACE_LIFETIMES * Q/omega0.  The peak and the first
    Sn = 1 crossing (when one exists) are located to much better than 1e-6
    relative in t.
    """
    if t_max is None:
        t_max = TRACE_LIFETIMES * cfg.Q / cfg.omega0
    if not (t_max > 0.0 and math.isfinite(t_max)):
        raise ValidationError(f"t_max must be > 0, got {t_max!r}")
    if n_samples < 16:
        raise ValidationError(f"n_samples must be >= 16, got {n_samples!r}")

    t = np.linspace(0.0, t_max, n_samples)
    i_signal = np.asarray(interference_signal(cfg, t))
    sn_values = np.asarray(snr(cfg, t))

    def sn_at(ti: float) -> float:
        return float(snr(cfg, ti))

    idx = int(np.argmax(sn_values))
    if 0 < idx < n_samples - 1 and sn_values[idx] > 0.0:
        t_peak, sn_peak = _refine_peak(sn_at, float(t[idx - 1]), float(t[idx + 1]))
    else:
        t_peak, sn_peak = float(t[idx]), float(sn_values[idx])

    t_cross: float | None = None
    above = np.nonzero(sn_values >= 1.0)[0]
    if above.size:
        first = int(above[0])
        t_cross = _refine_crossing(sn_at, float(t[max(first - 1, 0)]), float(t[first]))
    elif sn_peak >= 1.0:
        t_cross = _refine_crossing(sn_at, float(t[max(idx - 1, 0)]), t_peak)

    return SnrTrace(t=t, i_signal=i_signal, sn=sn_values, t_peak=t_peak, sn_peak=sn_peak, t_cross=t_cross)


def q_threshold(cfg: ExperimentConfig, q_lo: float, q_hi: float, rel_tol: float = 1e-4) -> QThresholdResult:
    """Smallest quality factor whose peak SNR reaches 1, by bisection.

    Sn_peak is strictly increasing in Q (only the decay factor exp(-w0 t/Q)
    depends on it), so bisection on [q_lo, q_hi] is valid; the bracket must
    satisfy Sn_peak(q_lo) < 1 < Sn_peak(q_hi).
    """
    if not (0.0 < q_lo < q_hi):
        raise ValidationError(f"need 0 < q_lo < q_hi, got {q_lo!r}, {q_hi!r}")

    def peak(q: float) -> float:
        return snr_trace(replace(cfg, Q=q)).sn_peak

    peak_lo, peak_hi = peak(q_lo), peak(q_hi)
    if not (peak_lo < 1.0 < peak_hi):
        raise DomainError(
            f"bracket does not straddle Sn_peak = 1: Sn_peak({q_lo:g}) = {peak_lo:g}, "
            f"Sn_peak({q_hi:g}) = {peak_hi:g}"
        )

    iterations: list[tuple[float, float, float, float]] = []
    lo, hi = q_lo, q_hi
    while (hi - lo) > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        peak_mid = peak(mid)
        iterations.append((lo, hi, mid, peak_mid))
        if peak_mid < 1.0:
            lo = mid
        else:
            hi = mid
    q_min = 0.5 * (lo + hi)
    return QThresholdResult(q_min=q_min, sn_peak=peak(q_min), iterations=tuple(iterations))
