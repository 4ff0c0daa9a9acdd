"""Reference bounds for the full-duplex Gaussian relay channel.

Classic comparison curves: the cut-set upper bound and the
decode-and-forward (DF) and compress-and-forward (CF) lower bounds, in the
standard correlated-Gaussian-input instantiations. The cut-set and DF bounds
maximize over the source/relay input correlation with a scalar golden-section
search; CF has a closed form with Gaussian quantization at the relay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .info import awgn_capacity

__all__ = ["RelaySpec", "cutset_bound", "df_bound", "cf_bound"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RelaySpec:
    """Link SNRs of a three-node relay channel, all linear and positive."""

    gamma_sd: float
    gamma_sr: float
    gamma_rd: float

    def __post_init__(self):
        for name in ("gamma_sd", "gamma_sr", "gamma_rd"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


def _golden_max(func, lo: float, hi: float, tol: float = 1e-8) -> float:
    """Maximum of a unimodal function on [lo, hi] by golden-section search."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = func(d)
    mid = 0.5 * (a + b)
    return max(func(mid), func(lo), func(hi))


def _mac_cut(spec: RelaySpec, rho: float) -> float:
    coherent = (
        spec.gamma_sd
        + spec.gamma_rd
        + 2.0 * rho * math.sqrt(spec.gamma_sd * spec.gamma_rd)
    )
    return awgn_capacity(coherent)


def cutset_bound(spec: RelaySpec) -> float:
    """Cut-set upper bound, maximized over the input correlation.

    For correlation rho the broadcast cut carries (1 - rho^2) of the source
    power to {relay, destination} and the multi-access cut gains the coherent
    combining term; the bound is the best worst cut:

        max over rho in [0, 1] of
            min{C(gamma_sd + gamma_rd + 2*rho*sqrt(gamma_sd*gamma_rd)),
                C((1 - rho^2)*(gamma_sd + gamma_sr))}
    """

    def value(rho: float) -> float:
        broadcast = awgn_capacity(
            (1.0 - rho * rho) * (spec.gamma_sd + spec.gamma_sr)
        )
        return min(_mac_cut(spec, rho), broadcast)

    return _golden_max(value, 0.0, 1.0)


def df_bound(spec: RelaySpec) -> float:
    """Decode-and-forward lower bound with coherent relay transmission.

    The relay must fully decode, so the first term sees only the
    source-to-relay link at the power fraction not committed to coherence:

        max over rho in [0, 1] of
            min{C((1 - rho^2)*gamma_sr),
                C(gamma_sd + gamma_rd + 2*rho*sqrt(gamma_sd*gamma_rd))}

    Can fall below the direct-link capacity when gamma_sr < gamma_sd.
    """

    def value(rho: float) -> float:
        decode = awgn_capacity((1.0 - rho * rho) * spec.gamma_sr)
        return min(_mac_cut(spec, rho), decode)

    return _golden_max(value, 0.0, 1.0)


def cf_bound(spec: RelaySpec) -> float:
    """Compress-and-forward lower bound with Gaussian quantization.

    The relay quantizes its observation with noise sigma_q^2 sized so the
    compressed description fits the relay-to-destination link:

        sigma_q^2 = (1 + gamma_sd + gamma_sr) / gamma_rd
        R = C(gamma_sd + gamma_sr / (1 + sigma_q^2))
    """
    sigma_q = (1.0 + spec.gamma_sd + spec.gamma_sr) / spec.gamma_rd
    return awgn_capacity(spec.gamma_sd + spec.gamma_sr / (1.0 + sigma_q))
