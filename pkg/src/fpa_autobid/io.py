"""JSON formats for instances and strategy profiles.

Instance::

    {"n": 2, "m": 2, "values": [[1, 0], [0, 0.99]], "kinds": ["value", "value"],
     "reserves": [0.5, 0.5], "gamma": 0.5}

Profile: an ``n x m`` array of atom lists, e.g.
``[{"bid": 0.5, "prob": 0.5}, {"abstain": true, "prob": 0.5}]``.
"""

from __future__ import annotations

import json
import math

from .core import ABSTAIN, AuctionInstance, BidDistribution, Kind, StrategyProfile


class FormatError(ValueError):
    """Malformed input document; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _number(x, field):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise FormatError(field, f"expected a finite number, got {x!r}")
    return float(x)


def instance_to_dict(inst: AuctionInstance) -> dict:
    d = {
        "n": inst.num_bidders,
        "m": inst.num_auctions,
        "values": inst.values.tolist(),
        "kinds": [k.value for k in inst.kinds],
    }
    if inst.reserves is not None:
        d["reserves"] = inst.reserves.tolist()
        d["gamma"] = inst.gamma
    return d


def instance_from_dict(d) -> AuctionInstance:
    if not isinstance(d, dict):
        raise FormatError("instance", "expected an object")
    for key in ("n", "m", "values", "kinds"):
        if key not in d:
            raise FormatError(key, "missing")
    unknown = set(d) - {"n", "m", "values", "kinds", "reserves", "gamma"}
    if unknown:
        raise FormatError(sorted(unknown)[0], "unknown field")
    n, m = d["n"], d["m"]
    if not isinstance(n, int) or n < 1:
        raise FormatError("n", f"expected a positive integer, got {n!r}")
    if not isinstance(m, int) or m < 1:
        raise FormatError("m", f"expected a positive integer, got {m!r}")
    values = d["values"]
    if not isinstance(values, list) or len(values) != n:
        raise FormatError("values", f"expected {n} rows")
    rows = []
    for i, row in enumerate(values):
        if not isinstance(row, list) or len(row) != m:
            raise FormatError(f"values[{i}]", f"expected {m} entries")
        rows.append([_number(v, f"values[{i}][{j}]") for j, v in enumerate(row)])
        if any(v < 0 for v in rows[-1]):
            raise FormatError(f"values[{i}]", "values must be nonnegative")
    kinds = d["kinds"]
    if not isinstance(kinds, list) or len(kinds) != n:
        raise FormatError("kinds", f"expected {n} entries")
    try:
        kinds = [Kind(k) for k in kinds]
    except ValueError as e:
        raise FormatError("kinds", "entries must be 'utility' or 'value'") from e
    reserves = d.get("reserves")
    gamma = d.get("gamma")
    if reserves is not None:
        if not isinstance(reserves, list) or len(reserves) != m:
            raise FormatError("reserves", f"expected {m} entries")
        reserves = [_number(r, f"reserves[{j}]") for j, r in enumerate(reserves)]
    if gamma is not None:
        gamma = _number(gamma, "gamma")
    try:
        return AuctionInstance(rows, tuple(kinds), reserves, gamma)
    except ValueError as e:
        raise FormatError("reserves" if reserves is not None and "reserve" in str(e) else "instance", str(e)) from e


def distribution_to_list(d: BidDistribution) -> list:
    return [{"abstain": True, "prob": p} if b is ABSTAIN else {"bid": b, "prob": p} for b, p in d.atoms]


def distribution_from_list(atoms, field: str) -> BidDistribution:
    if not isinstance(atoms, list) or not atoms:
        raise FormatError(field, "expected a nonempty list of atoms")
    pairs = []
    for k, a in enumerate(atoms):
        f = f"{field}[{k}]"
        if not isinstance(a, dict) or "prob" not in a:
            raise FormatError(f, "atom needs 'prob' and one of 'bid' / 'abstain'")
        p = _number(a["prob"], f + ".prob")
        if p <= 0 or p > 1:
            raise FormatError(f + ".prob", f"probability must lie in (0, 1], got {p!r}")
        if a.get("abstain"):
            pairs.append((ABSTAIN, p))
        elif "bid" in a:
            b = _number(a["bid"], f + ".bid")
            if b < 0:
                raise FormatError(f + ".bid", "bids must be nonnegative")
            pairs.append((b, p))
        else:
            raise FormatError(f, "atom needs 'bid' or 'abstain'")
    try:
        return BidDistribution.from_pairs(pairs)
    except ValueError as e:
        raise FormatError(field, str(e)) from e


def profile_to_list(profile: StrategyProfile) -> list:
    return [[distribution_to_list(d) for d in row] for row in profile.strategies]


def profile_from_list(rows, instance: AuctionInstance | None = None) -> StrategyProfile:
    if not isinstance(rows, list) or not rows:
        raise FormatError("profile", "expected an n x m array of atom lists")
    prof = StrategyProfile(tuple(
        tuple(distribution_from_list(atoms, f"profile[{i}][{j}]") for j, atoms in enumerate(row))
        for i, row in enumerate(rows)
    ))
    if instance is not None and prof.shape != instance.values.shape:
        raise FormatError("profile", f"shape {prof.shape} does not match instance {instance.values.shape}")
    return prof


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_document(text: str):
    """Parse ``{"instance": ..., "profile": ...}`` or a bare instance object."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError("document", f"invalid JSON ({e.msg} at line {e.lineno})") from e
    if isinstance(doc, dict) and "instance" in doc:
        inst = instance_from_dict(doc["instance"])
        prof = profile_from_list(doc["profile"], inst) if doc.get("profile") is not None else None
        return inst, prof, doc
    return instance_from_dict(doc), None, {"instance": doc}
