"""Loss-comparison binary forward exploration.

One time-step probes the loss ahead of the current point: a full step at the
current rate versus two half-rate substeps. While the two probe losses
disagree beyond a scaled threshold the rate is shrunk (zoom-in); while they
agree the rate is grown (zoom-out) and then backed off once. The branch taken
at each step is selected by the comparison pair carried over from the
previous step. A zoom-in-only variant resets the rate each step and skips the
zoom-out loop entirely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .core import (
    Batch,
    Branch,
    CriterionState,
    LossPair,
    NonFiniteEvaluation,
    NonTermination,
    Objective,
    RateState,
    StepOutcome,
    TraceRecord,
    eval_criterion_threshold,
    rms_grad_norm,
)

# lattice exponent bound: rates live in [eta0 * base**-CAP, eta0 * base**CAP]
CAP_EXP = 60


class CommitPolicy(str, Enum):
    HALF_STEP = "half_step"    # commit the half-rate trial point
    FULL_STEP = "full_step"    # commit the full trial point, restore the rate


class ResetPolicy(str, Enum):
    PREV_ETA = "prev_eta"
    DOUBLE_PREV_ETA = "double_prev_eta"


@dataclass(frozen=True)
class BfeLossConfig:
    eta0: float = 0.001
    crit: CriterionState = field(default_factory=CriterionState)
    base: int = 2
    commit_policy: CommitPolicy = CommitPolicy.HALF_STEP
    max_inner: int = 60
    lim_zero: float = 0.001
    max_steps: int = 1000
    zoom_in_only: bool = False
    reset_policy: ResetPolicy = ResetPolicy.DOUBLE_PREV_ETA
    force_zoom_in: bool = False  # restart every step in the zoom-in branch

    def __post_init__(self):
        if self.eta0 <= 0:
            raise ValueError("eta0 must be positive")
        if self.max_inner < 1:
            raise ValueError("max_inner must be >= 1")
        if self.lim_zero <= 0:
            raise ValueError("lim_zero must be positive")
        if self.base < 2:
            raise ValueError("base must be >= 2")


def _check_finite(pair: LossPair, eta: float) -> LossPair:
    if not (math.isfinite(pair.loss1) and math.isfinite(pair.loss2)):
        raise NonFiniteEvaluation(
            f"non-finite trial loss at eta={eta!r}", eta=eta)
    return pair


def loss_pair_zoom_in(obj: Objective, theta: np.ndarray, eta: float,
                      batch: Batch) -> LossPair:
    """One full step vs. two half-rate substeps from ``theta``.

    Costs exactly 2 gradient and 2 loss evaluations.
    """
    g = obj.grad(theta, batch)
    trial_full = theta - eta * g
    trial_half = theta - (eta / 2.0) * g
    trial_two_step = trial_half - (eta / 2.0) * obj.grad(trial_half, batch)
    loss1 = obj.loss(trial_full, batch)
    loss2 = obj.loss(trial_two_step, batch)
    return _check_finite(
        LossPair(loss1, loss2, trial_half, trial_full, trial_two_step), eta)


def loss_pair_zoom_out(obj: Objective, theta: np.ndarray, eta: float,
                       batch: Batch) -> LossPair:
    """Two full-rate substeps vs. one double-rate step from ``theta``.

    Costs exactly 2 gradient and 2 loss evaluations.
    """
    g = obj.grad(theta, batch)
    trial_half = theta - eta * g
    trial_two_step = trial_half - eta * obj.grad(trial_half, batch)
    trial_full = theta - 2.0 * eta * g
    loss1 = obj.loss(trial_two_step, batch)
    loss2 = obj.loss(trial_full, batch)
    return _check_finite(
        LossPair(loss1, loss2, trial_half, trial_full, trial_two_step), eta)


def bfe_step(obj: Objective, theta: np.ndarray, rate: RateState,
             crit: CriterionState, cfg: BfeLossConfig, batch: Batch,
             epoch: int = 0) -> StepOutcome:
    """One outer time-step of the loss-comparison BFE algorithm.

    The carried-in ``crit`` pair selects the branch: eps_comp >= eps_val runs
    the rate-shrinking loop, otherwise the rate-growing loop. The mini-batch
    is held fixed for all inner probes.
    """
    base = float(cfg.base)
    eta = rate.eta
    lo = rate.eta0 * base ** -CAP_EXP
    hi = rate.eta0 * base ** CAP_EXP
    etas: list[float] = []
    inner = 0
    capped = False

    if crit.eps_comp >= crit.eps_val:
        while True:
            inner += 1
            if inner > cfg.max_inner:
                raise NonTermination(
                    f"zoom-in exceeded max_inner={cfg.max_inner}", etas=etas)
            etas.append(eta)
            pair = loss_pair_zoom_in(obj, theta, eta, batch)
            eps_comp = abs(pair.loss2 - pair.loss1)
            eps_val = eval_criterion_threshold(pair.loss1, pair.loss2, crit,
                                               epoch)
            eta = eta / base
            if eps_comp < eps_val:
                break
            if eta <= lo * (1.0 + 1e-9):
                eta = lo
                capped = True
                break
        if capped:
            eta_next = eta
            theta_next = pair.trial_half
            loss_committed = pair.loss2
        elif cfg.commit_policy is CommitPolicy.FULL_STEP:
            eta_next = eta * base
            theta_next = pair.trial_full
            loss_committed = pair.loss1
        else:
            eta_next = eta
            theta_next = pair.trial_half
            loss_committed = pair.loss2
        branch = Branch.ZOOM_IN
    else:
        while True:
            inner += 1
            if inner > cfg.max_inner:
                raise NonTermination(
                    f"zoom-out exceeded max_inner={cfg.max_inner}", etas=etas)
            etas.append(eta)
            pair = loss_pair_zoom_out(obj, theta, eta, batch)
            eps_comp = abs(pair.loss2 - pair.loss1)
            eps_val = eval_criterion_threshold(pair.loss1, pair.loss2, crit,
                                               epoch)
            eta = eta * base
            if eps_comp >= eps_val:
                break
            if eta >= hi * (1.0 - 1e-9):
                eta = hi
                capped = True
                break
        if not capped:
            eta = eta / base
        eta_next = eta
        theta_next = pair.trial_half
        loss_committed = pair.loss1
        branch = Branch.ZOOM_OUT

    return StepOutcome(theta_next=theta_next, eta_next=eta_next,
                       inner_loops=inner, loss_committed=loss_committed,
                       branch=branch, eps_comp=eps_comp, eps_val=eps_val,
                       capped=capped)


def zoom_in_only_step(obj: Objective, theta: np.ndarray, rate: RateState,
                      crit: CriterionState, cfg: BfeLossConfig, batch: Batch,
                      epoch: int = 0) -> StepOutcome:
    """Zoom-in-only variant: reset the rate, run the shrinking loop once.

    The rate is re-seeded from the previously committed rate (optionally
    doubled) so the search always starts from the shrinking side.
    """
    eta = rate.eta
    if cfg.reset_policy is ResetPolicy.DOUBLE_PREV_ETA:
        eta = eta * cfg.base
    hi = rate.eta0 * float(cfg.base) ** CAP_EXP
    eta = min(eta, hi)
    forced = replace(crit, eps_comp=math.inf)
    # this variant always commits the half-rate trial point
    cfg = replace(cfg, commit_policy=CommitPolicy.HALF_STEP)
    return bfe_step(obj, theta, replace(rate, eta=eta), forced, cfg, batch,
                    epoch)


class BfeLossOptimizer:
    """Stateful driver threading the rate and carried criterion pair."""

    def __init__(self, cfg: BfeLossConfig):
        self.cfg = cfg
        self.eta = cfg.eta0
        self.crit = cfg.crit

    def step(self, obj: Objective, theta: np.ndarray, batch: Batch,
             epoch: int = 0) -> StepOutcome:
        rate = RateState(eta=self.eta, eta0=self.cfg.eta0, base=self.cfg.base)
        if self.cfg.zoom_in_only:
            out = zoom_in_only_step(obj, theta, rate, self.crit, self.cfg,
                                    batch, epoch)
        else:
            out = bfe_step(obj, theta, rate, self.crit, self.cfg, batch,
                           epoch)
        self.eta = out.eta_next
        eps_comp = math.inf if self.cfg.force_zoom_in else out.eps_comp
        self.crit = replace(self.crit, eps_comp=eps_comp,
                            eps_val=out.eps_val)
        return out


def run(obj: Objective, theta0: np.ndarray, cfg: BfeLossConfig,
        batches) -> tuple[np.ndarray, list[TraceRecord]]:
    """Outer loop: one batch per time-step until the gradient RMS falls
    below ``cfg.lim_zero`` on the current batch, or ``max_steps`` is hit.
    """
    opt = BfeLossOptimizer(cfg)
    theta = np.asarray(theta0, dtype=float)
    trace: list[TraceRecord] = []
    for t, batch in enumerate(batches, start=1):
        if t > cfg.max_steps:
            break
        gnorm = rms_grad_norm(obj.grad(theta, batch))
        if gnorm < cfg.lim_zero:
            break
        out = opt.step(obj, theta, batch, epoch=getattr(batches, "epoch", 0))
        theta = out.theta_next
        trace.append(TraceRecord(step=t, batch_loss=obj.loss(theta, batch),
                                 full_loss=obj.loss(theta, None),
                                 eta=out.eta_next,
                                 inner_loops=out.inner_loops,
                                 grad_norm=gnorm))
    return theta, trace
