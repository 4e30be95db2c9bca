"""Welfare accounting for an equilibrium and the inequalities it must satisfy.

Auctions are split by the kind of their rightful (highest-value) winner:

* ``A`` value collected by value maximizers,
* ``B`` value utility maximizers collect in auctions they rightfully own,
* ``C`` all payments in auctions owned by value maximizers,
* ``D`` payments by non-owners in auctions owned by utility maximizers,
* ``V1`` / ``V2`` optimal welfare of auctions owned by value / utility maximizers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bounds import payment_floor
from .core import AuctionInstance, Kind, OutcomeSummary, StrategyProfile, evaluate_profile, rightful_winner


class LocalTerm(NamedTuple):
    auction: int
    x: float
    bound: float
    others_payment: float


@dataclass(frozen=True)
class AuditLedger:
    A: float
    B: float
    C: float
    D: float
    V1: float
    V2: float
    x_value: float
    y_value: float
    per_auction: tuple
    welfare: float
    total_payment: float
    owner_payment: float


class AuditResult(NamedTuple):
    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool

    def to_dict(self) -> dict:
        return self._asdict()


def _result(name, lhs, rhs, tol) -> AuditResult:
    return AuditResult(name, float(lhs), float(rhs), float(lhs - rhs), bool(lhs >= rhs - tol))


def _local_term(instance, outcome, auction, gamma=0.0) -> LocalTerm:
    rw = rightful_winner(instance, auction)
    v = float(instance.values[rw, auction])
    x = float(np.clip(outcome.win_prob[rw, auction], 0.0, 1.0))
    others = float(outcome.exp_payment[:, auction].sum() - outcome.exp_payment[rw, auction])
    return LocalTerm(auction, x, float(payment_floor(x, gamma)) * v, others)


def compute_ledger(instance: AuctionInstance, profile: StrategyProfile,
                   outcome: OutcomeSummary | None = None) -> AuditLedger:
    outcome = outcome or evaluate_profile(instance, profile)
    n, m = instance.values.shape
    owner = [rightful_winner(instance, j) for j in range(m)]
    top = instance.values.max(axis=0)
    owned_by_vm = np.array([instance.kinds[owner[j]] is Kind.VALUE for j in range(m)])
    is_vm = np.array([k is Kind.VALUE for k in instance.kinds])

    A = float(outcome.per_bidder_value[is_vm].sum())
    B = sum(float(outcome.exp_value[owner[j], j]) for j in range(m) if not owned_by_vm[j])
    C = float(outcome.exp_payment[:, owned_by_vm].sum())
    D = 0.0
    owner_payment = 0.0
    for j in np.flatnonzero(~owned_by_vm):
        col = outcome.exp_payment[:, j]
        D += float(col.sum() - col[owner[j]])
        owner_payment += float(col[owner[j]])
    V1 = float(top[owned_by_vm].sum())
    V2 = float(top[~owned_by_vm].sum())
    x = min(1.0, A / V1) if V1 > 0 else 1.0
    y = min(1.0, B / V2) if V2 > 0 else 1.0
    per_auction = tuple(_local_term(instance, outcome, int(j)) for j in np.flatnonzero(~owned_by_vm))
    return AuditLedger(A, B, C, D, V1, V2, x, y, per_auction,
                       outcome.welfare, float(outcome.per_bidder_payment.sum()), owner_payment)


def default_tolerance(instance: AuctionInstance, epsilon: float) -> float:
    return instance.num_bidders * instance.num_auctions * epsilon


def audit_lemma_value(ledger: AuditLedger, tol: float = 1e-9) -> AuditResult:
    """Value maximizers' value plus payments in their auctions cover their auctions."""
    return _result("value", ledger.A + ledger.C, ledger.V1, tol)


def audit_lemma_value_ml(ledger: AuditLedger, gamma: float, tol: float = 1e-9) -> AuditResult:
    return _result("value-ml", (1.0 - gamma) * ledger.A + ledger.C, ledger.V1, tol)


def audit_lemma_local(instance, profile, auction: int, tol: float = 1e-9, outcome=None) -> AuditResult:
    """Competing payment in ``auction`` is at least ``(1 - x + x ln x) v`` for the owner's win rate x."""
    return audit_lemma_local_ml(instance, profile, auction, 0.0, tol, outcome, name="local")


def audit_lemma_local_ml(instance, profile, auction: int, gamma: float, tol: float = 1e-9,
                         outcome=None, name: str = "local-ml") -> AuditResult:
    outcome = outcome or evaluate_profile(instance, profile)
    term = _local_term(instance, outcome, auction, gamma)
    return _result(f"{name}[{auction}]", term.others_payment, term.bound, tol)


def audit_lemma_combination(instance, profile, ledger: AuditLedger, tol: float = 1e-9) -> AuditResult:
    return _result("combination", ledger.welfare, max(ledger.A, ledger.C + ledger.D) + ledger.B, tol)


def run_audits(instance: AuctionInstance, profile: StrategyProfile, epsilon: float = 1e-9,
               tol: float | None = None) -> list:
    """Every applicable inequality for a profile; reserve-aware ones only when reserves are set.

    The per-auction local checks cover auctions owned by utility maximizers.
    """
    tol = default_tolerance(instance, epsilon) if tol is None else tol
    outcome = evaluate_profile(instance, profile)
    ledger = compute_ledger(instance, profile, outcome)
    results = [audit_lemma_value(ledger, tol)]
    results += [audit_lemma_local(instance, profile, t.auction, tol, outcome) for t in ledger.per_auction]
    results.append(audit_lemma_combination(instance, profile, ledger, tol))
    if instance.reserves is not None:
        g = instance.gamma
        results.append(audit_lemma_value_ml(ledger, g, tol))
        results += [audit_lemma_local_ml(instance, profile, t.auction, g, tol, outcome)
                    for t in ledger.per_auction]
    return results
