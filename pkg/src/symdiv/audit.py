"""Chain audits over seeded corpora and the JSON report they produce."""

from datetime import datetime, timezone
import json
import math
from importlib import resources

from . import __version__
from .differences import select_chains
from .distributions import PairSampler, sample_pair
from .measures import MEASURES

SCHEMA_RESOURCE = "report.schema.json"


def report_schema():
    """The published JSON schema every report validates against."""
    text = resources.files("symdiv").joinpath(SCHEMA_RESOURCE).read_text()
    return json.loads(text)


def _chain_summary(chain):
    return {
        "id": chain.id,
        "group": chain.group,
        "expression": str(chain),
        "links": chain.links,
        "pairs": 0,
        "min_slack": math.inf,
        "min_relative_slack": math.inf,
        "violation_count": 0,
        "violations": [],
    }


def audit_chains(sampler, pairs, chains="all"):
    """Evaluate every selected chain on pairs ``0 .. pairs-1`` of ``sampler``.

    Returns one summary dict per chain.  ``min_relative_slack`` is the
    smallest slack divided by ``max(1, largest chain term)``, the quantity
    compared against the ``-1e-10`` acceptance threshold.
    """
    if pairs < 1:
        raise ValueError(f"need at least one pair, got {pairs}")
    if isinstance(chains, str) or not all(hasattr(c, "evaluate") for c in chains):
        chains = select_chains(chains)
    needed = set()
    for c in chains:
        needed |= c.measures()
    summaries = [_chain_summary(c) for c in chains]

    for index in range(pairs):
        p, q = sample_pair(sampler, index)
        values = {m: MEASURES[m](p, q) for m in needed}
        for chain, summary in zip(chains, summaries):
            vals, slacks, tol = chain.evaluate(values)
            scale = tol / 1e-10
            summary["pairs"] += 1
            for link, slack in enumerate(slacks):
                if slack < summary["min_slack"]:
                    summary["min_slack"] = slack
                if slack / scale < summary["min_relative_slack"]:
                    summary["min_relative_slack"] = slack / scale
                if slack < -tol:
                    summary["violations"].append({
                        "pair_index": index,
                        "chain": chain.id,
                        "link": link,
                        "lhs": vals[link],
                        "rhs": vals[link + 1],
                        "slack": slack,
                        "tolerance": tol,
                    })
    for s in summaries:
        s["violation_count"] = len(s["violations"])
    return summaries


def build_report(config, chains=(), certificates=(), timestamp=None):
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return {
        "version": __version__,
        "generated_at": timestamp,
        "config": config,
        "chains": list(chains),
        "certificates": [c.to_dict() if hasattr(c, "to_dict") else c for c in certificates],
    }


def run_audit(seed, pairs, n_min=2, n_max=64, skew=1e6, chains="all"):
    """Sample a corpus, audit the chains, and return the full report dict."""
    sampler = PairSampler(seed=seed, n_min=n_min, n_max=n_max, skew=skew)
    selected = select_chains(chains)
    summaries = audit_chains(sampler, pairs, selected)
    config = {
        "command": "audit",
        "seed": seed,
        "pairs": pairs,
        "n_min": n_min,
        "n_max": n_max,
        "skew": skew,
        "chains": [c.id for c in selected],
        "prng": "numpy PCG64, SeedSequence(entropy=seed, spawn_key=(index,))",
        "tolerance": "slack >= -1e-10 * max(1, largest chain term)",
    }
    return build_report(config, chains=summaries)


def total_violations(report):
    return sum(c["violation_count"] for c in report["chains"])


def dumps(report):
    """Serialize a report; floats use the shortest repr that round-trips."""
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
