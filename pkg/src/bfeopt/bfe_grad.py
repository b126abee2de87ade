"""Gradient-angle binary forward exploration, global and per-parameter.

Instead of comparing probe losses, these variants compare the gradient before
and after a trial step through the angle between the two slopes. The global
variant shrinks or grows a single rate until the worst per-dimension angle
crosses a threshold; the adaptive variant (AdaBFE) gives every parameter
dimension its own rate and exit state, probing all still-active dimensions
jointly with one gradient evaluation per inner pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .core import (
    Batch,
    Branch,
    NonFiniteEvaluation,
    NonTermination,
    Objective,
    RateState,
    StepOutcome,
    angular_deviation,
)
from .bfe_loss import CAP_EXP

DEG = math.pi / 180.0


class ThresholdMode(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"  # per-dim threshold = ratio * |arctan(g_i)|


class ZoomOutExit(str, Enum):
    HALVE_COMMIT_TRIAL = "halve_commit_trial"
    QUARTER_FRESH_STEP = "quarter_fresh_step"


@dataclass(frozen=True)
class BfeGradConfig:
    eta0: float = 0.001
    angle_threshold: float = 1.0 * DEG
    threshold_mode: ThresholdMode = ThresholdMode.ABSOLUTE
    relative_ratio: float = 0.01
    base: int = 2
    zoom_out_exit: ZoomOutExit = ZoomOutExit.HALVE_COMMIT_TRIAL
    pre_halve: bool = False
    adaptive: bool = False
    max_inner: int = 60
    lim_zero: float = 0.001
    max_steps: int = 1000
    threshold_floor: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.angle_threshold < math.pi / 2:
            raise ValueError("angle_threshold must be in (0, pi/2)")
        if self.eta0 <= 0:
            raise ValueError("eta0 must be positive")
        if self.base < 2:
            raise ValueError("base must be >= 2")


@dataclass(frozen=True)
class GradProbe:
    """Gradients before/after a joint trial step and the per-dim angles."""

    g: np.ndarray
    theta_trial: np.ndarray
    g_star: np.ndarray
    eps_per_dim: np.ndarray
    eps_max: float


def grad_probe(obj: Objective, theta: np.ndarray, rates, batch: Batch) -> GradProbe:
    """Probe the gradient change across one trial step.

    ``rates`` is a scalar (broadcast) or a per-dimension array. Costs exactly
    2 gradient evaluations.
    """
    theta = np.asarray(theta, dtype=float)
    rates = np.broadcast_to(np.asarray(rates, dtype=float), theta.shape)
    g = np.asarray(obj.grad(theta, batch), dtype=float)
    theta_trial = theta - rates * g
    g_star = np.asarray(obj.grad(theta_trial, batch), dtype=float)
    if not np.all(np.isfinite(g_star)):
        raise NonFiniteEvaluation("non-finite gradient at trial point")
    eps = np.atleast_1d(angular_deviation(g, g_star))
    return GradProbe(g=g, theta_trial=theta_trial, g_star=g_star,
                     eps_per_dim=eps, eps_max=float(eps.max()))


def _thresholds(g: np.ndarray, cfg: BfeGradConfig) -> np.ndarray:
    """Per-dimension angle thresholds for the configured mode."""
    if cfg.threshold_mode is ThresholdMode.RELATIVE:
        thr = cfg.relative_ratio * np.abs(np.arctan(g))
        return np.maximum(thr, cfg.threshold_floor)
    return np.full(np.shape(g), cfg.angle_threshold)


def _exceeds(probe: GradProbe, cfg: BfeGradConfig) -> bool:
    return bool(np.any(probe.eps_per_dim >= _thresholds(probe.g, cfg)))


def bfe_grad_step(obj: Objective, theta: np.ndarray, rate: RateState,
                  cfg: BfeGradConfig, batch: Batch,
                  zoom_in: bool = True) -> StepOutcome:
    """One time-step of the global gradient-angle BFE.

    ``zoom_in`` is the carried branch state: True after a step that ended
    with the angle at/above threshold, False after one that ended below.
    """
    base = float(cfg.base)
    eta = rate.eta
    lo = rate.eta0 * base ** -CAP_EXP
    hi = rate.eta0 * base ** CAP_EXP
    etas: list[float] = []
    inner = 0
    capped = False

    if zoom_in:
        while True:
            inner += 1
            if inner > cfg.max_inner:
                raise NonTermination(
                    f"grad zoom-in exceeded max_inner={cfg.max_inner}",
                    etas=etas)
            etas.append(eta)
            probe = grad_probe(obj, theta, eta, batch)
            eta = eta / base
            if not _exceeds(probe, cfg):
                break
            if eta <= lo * (1.0 + 1e-9):
                eta = lo
                capped = True
                break
        if not capped:
            eta = eta * base  # undo the final shrink; rate of the last probe
        theta_next = probe.theta_trial
        branch = Branch.ZOOM_IN
    else:
        while True:
            inner += 1
            if inner > cfg.max_inner:
                raise NonTermination(
                    f"grad zoom-out exceeded max_inner={cfg.max_inner}",
                    etas=etas)
            etas.append(eta)
            probe = grad_probe(obj, theta, eta, batch)
            eta = eta * base
            if _exceeds(probe, cfg):
                break
            if eta >= hi * (1.0 - 1e-9):
                eta = hi
                capped = True
                break
        if capped:
            theta_next = probe.theta_trial
        elif cfg.zoom_out_exit is ZoomOutExit.QUARTER_FRESH_STEP:
            eta = eta / (base * base)
            theta_next = theta - eta * probe.g
        else:
            eta = eta / base
            theta_next = probe.theta_trial
        branch = Branch.ZOOM_OUT

    return StepOutcome(theta_next=theta_next, eta_next=eta,
                       inner_loops=inner, loss_committed=math.nan,
                       branch=branch, eps_comp=probe.eps_max,
                       eps_val=float(_thresholds(probe.g, cfg).max()),
                       capped=capped)


def adabfe_step(obj: Objective, theta: np.ndarray, rate: RateState,
                cfg: BfeGradConfig, batch: Batch,
                zoom_in: np.ndarray | None = None) -> StepOutcome:
    """One time-step of per-parameter AdaBFE.

    Each dimension keeps its own rate and branch; active dimensions probe
    jointly (one gradient evaluation at the joint trial point per inner
    pass) and freeze their trial coordinate once their exit condition holds.
    """
    theta = np.asarray(theta, dtype=float)
    dim = theta.size
    base = float(cfg.base)
    if rate.per_dim is None:
        raise ValueError("adabfe_step requires per-dimension rates")
    eta = np.array(rate.per_dim, dtype=float).copy()
    if eta.size != dim:
        raise ValueError("per-dimension rate count must match theta")
    if zoom_in is None:
        zoom_in = np.ones(dim, dtype=bool)
    zoom_in = np.array(zoom_in, dtype=bool).copy()
    zoom_next = zoom_in.copy()

    lo = rate.eta0 * base ** -CAP_EXP
    hi = rate.eta0 * base ** CAP_EXP

    g = np.asarray(obj.grad(theta, batch), dtype=float)  # fixed base gradient
    thresholds = _thresholds(g, cfg)
    committed = theta.copy()
    active = np.ones(dim, dtype=bool)
    capped = False
    inner = 0
    last_eps = np.zeros(dim)

    while active.any():
        inner += 1
        if inner > cfg.max_inner:
            raise NonTermination(
                f"adabfe exceeded max_inner={cfg.max_inner}",
                stuck_dims=list(np.nonzero(active)[0]))
        if cfg.pre_halve:
            shrink = active & zoom_in
            eta[shrink] = eta[shrink] / base
        trial = committed.copy()
        trial[active] = theta[active] - eta[active] * g[active]
        g_star = np.asarray(obj.grad(trial, batch), dtype=float)
        if not np.all(np.isfinite(g_star)):
            raise NonFiniteEvaluation("non-finite gradient at joint trial point")
        eps = np.atleast_1d(angular_deviation(g, g_star))
        last_eps[active] = eps[active]

        for i in np.nonzero(active)[0]:
            exceed = eps[i] >= thresholds[i]
            if zoom_in[i]:
                if exceed:
                    if not cfg.pre_halve:
                        eta[i] = eta[i] / base
                    if eta[i] <= lo * (1.0 + 1e-9):
                        eta[i] = lo
                        committed[i] = trial[i]
                        active[i] = False
                        capped = True
                else:
                    committed[i] = trial[i]
                    active[i] = False
                    zoom_next[i] = False
            else:
                if exceed:
                    committed[i] = trial[i]
                    active[i] = False
                    zoom_next[i] = True
                else:
                    eta[i] = eta[i] * base
                    if eta[i] >= hi * (1.0 - 1e-9):
                        eta[i] = hi
                        committed[i] = trial[i]
                        active[i] = False
                        capped = True

    branch = Branch.ZOOM_IN if zoom_in.all() else Branch.ZOOM_OUT
    return StepOutcome(theta_next=committed, eta_next=float(eta.mean()),
                       inner_loops=inner, loss_committed=math.nan,
                       branch=branch, eps_comp=float(last_eps.max()),
                       eps_val=float(thresholds.max()), capped=capped,
                       rates_next=eta, branches_next=zoom_next)


class BfeGradOptimizer:
    """Stateful driver for the global gradient-angle variant."""

    def __init__(self, cfg: BfeGradConfig):
        self.cfg = cfg
        self.eta = cfg.eta0
        self.zoom_in = True

    def step(self, obj: Objective, theta: np.ndarray, batch: Batch,
             epoch: int = 0) -> StepOutcome:
        rate = RateState(eta=self.eta, eta0=self.cfg.eta0, base=self.cfg.base)
        out = bfe_grad_step(obj, theta, rate, self.cfg, batch,
                            zoom_in=self.zoom_in)
        self.eta = out.eta_next
        # zoom-in ends below threshold -> zoom-out next; zoom-out ends
        # at/above threshold -> zoom-in next
        self.zoom_in = out.branch is Branch.ZOOM_OUT
        return out


class AdaBfeOptimizer:
    """Stateful driver for the per-parameter adaptive variant."""

    def __init__(self, cfg: BfeGradConfig, dim: int):
        self.cfg = cfg
        self.rates = np.full(dim, cfg.eta0, dtype=float)
        self.zoom_in = np.ones(dim, dtype=bool)

    def step(self, obj: Objective, theta: np.ndarray, batch: Batch,
             epoch: int = 0) -> StepOutcome:
        rate = RateState(eta=self.cfg.eta0, eta0=self.cfg.eta0,
                         per_dim=self.rates, base=self.cfg.base)
        out = adabfe_step(obj, theta, rate, self.cfg, batch,
                          zoom_in=self.zoom_in)
        self.rates = out.rates_next
        self.zoom_in = out.branches_next
        return out
