"""Expectation-value reconstruction and sampling-overhead accounting."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cutter import CutPlan, SubcircuitPair, enumerate_all, instantiate
from .errors import IntractableEnumeration
from .ir import Circuit, PauliObservable
from .mcx_decompose import Strategy, decompose_mcx, mcx_test_circuit
from .qpd import CutKind, gamma_per_cut, overhead_per_cut
from .sim import expectation, make_rng, run_exact_branches

MAX_EXACT_PAIRS = 1 << 16
BLOCK_SIZE = 8192


@dataclass(frozen=True)
class Estimate:
    value: float
    standard_error: float
    gamma: float
    samples_used: int

    def as_dict(self) -> dict:
        return {"value": self.value, "std_error": self.standard_error,
                "gamma": self.gamma, "samples": self.samples_used}


def plan_gamma(plan: CutPlan, classical_comm: bool = False) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return float(math.prod(gamma_per_cut(cut.kind, classical_comm) for cut in plan.cuts))


@lru_cache(maxsize=4096)
def side_expectation(circuit: Circuit, sign_bits: tuple[int, ...],
                     obs: PauliObservable) -> float:
    """Sign-weighted expectation of one subcircuit, summed over measurement branches."""
    total = 0.0
    for b in run_exact_branches(circuit):
        if b.weight == 0.0:
            continue
        sign = -1 if sum(b.classbits[i] for i in sign_bits) % 2 else 1
        total += b.weight * sign * expectation(b.state, obs)
    return total


def pair_factors(pair: SubcircuitPair, obs: PauliObservable) -> tuple[float, float]:
    obs_a, obs_b = pair.split_observable(obs)
    return (side_expectation(pair.circuit_a, pair.sign_bits("A"), obs_a),
            side_expectation(pair.circuit_b, pair.sign_bits("B"), obs_b))


def uncut_expectation(c: Circuit, obs: PauliObservable) -> float:
    """Reference value from simulating ``c`` whole (wire-cut markers are no-ops)."""
    return side_expectation(c, (), obs)


def _check_tractable(plan: CutPlan):
    if plan.num_pairs > MAX_EXACT_PAIRS:
        raise IntractableEnumeration(
            f"{plan.num_pairs} subcircuit pairs exceed the limit of {MAX_EXACT_PAIRS}")


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return list(map(fn, items))
    with ThreadPoolExecutor(jobs) as pool:
        return list(pool.map(fn, items))


def reconstruct_exact(c: Circuit, plan: CutPlan, obs: PauliObservable,
                      jobs: int = 1) -> Estimate:
    """Weighted sum over all pairs of ``coefficient * E_A * E_B``."""
    _check_tractable(plan)
    pairs = [p for _, p in enumerate_all(c, plan)]
    factors = _map(lambda p: pair_factors(p, obs), pairs, jobs)
    value = 0.0
    for p, (ea, eb) in zip(pairs, factors):
        value += float(p.coefficient) * ea * eb
    return Estimate(value, 0.0, plan_gamma(plan), 0)


def _draw_block(seed: int, block: int, n: int, probs):
    rng = make_rng(seed, block)
    terms = np.column_stack([rng.choice(len(p), size=n, p=p) for p in probs]) \
        if probs else np.zeros((n, 0), dtype=int)
    return terms, rng.random((n, 2))


def reconstruct_mc(c: Circuit, plan: CutPlan, obs: PauliObservable, samples: int,
                   seed: int, jobs: int = 1) -> Estimate:
    """Quasi-probability Monte Carlo estimate with one shot per drawn assignment.

    Each sample draws one term per cut with probability ``|c_i| / gamma_i``,
    takes one shot of each subcircuit and scores
    ``gamma * sign(coefficient) * (signed outcome A) * (signed outcome B)``.
    A side's signed outcome is +1/-1 with mean equal to its exact
    sign-weighted expectation, so it is drawn directly from that two-point
    distribution. Samples are generated in fixed blocks, block ``k`` using the
    stream ``(seed, k)``; results do not depend on ``jobs``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    probs = []
    for cut in plan.cuts:
        w = np.array([abs(float(t.coefficient)) for t in cut.basis.terms])
        probs.append(w / w.sum())
    gamma = float(plan.gamma)
    sizes = [min(BLOCK_SIZE, samples - s) for s in range(0, samples, BLOCK_SIZE)]
    draws = _map(lambda kb: _draw_block(seed, kb[0], kb[1], probs), list(enumerate(sizes)), jobs)
    terms = np.concatenate([d[0] for d in draws])
    uniforms = np.concatenate([d[1] for d in draws])

    uniq, inverse = np.unique(terms, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)

    def stats(row):
        pair = instantiate(c, plan, tuple(row))
        ea, eb = pair_factors(pair, obs)
        return (1.0 if pair.coefficient > 0 else -1.0, (1 + ea) / 2, (1 + eb) / 2)

    table = np.array(_map(stats, [tuple(r) for r in uniq], jobs), dtype=float).reshape(-1, 3)
    sign, p_a, p_b = table[inverse, 0], table[inverse, 1], table[inverse, 2]
    shot_a = np.where(uniforms[:, 0] < p_a, 1.0, -1.0)
    shot_b = np.where(uniforms[:, 1] < p_b, 1.0, -1.0)
    values = gamma * sign * shot_a * shot_b
    se = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return Estimate(float(values.mean()), se, gamma, samples)


# ---------------------------------------------------------------------------
# Overhead table
# ---------------------------------------------------------------------------

PRIOR_WORK_GAMMA = 6  # direct multi-controlled-Z cut, any number of controls
STRATEGY_ROWS = ("prior_work", "dec2a", "dec2ad", "dec1")
CSV_HEADER = "strategy,extra_qubits,n,overhead_no_cc,overhead_cc,analytic_flag"


@dataclass(frozen=True)
class OverheadRow:
    strategy: str
    extra_qubits: int
    n: int
    gate_cuts: int
    wire_cuts: int
    overhead_no_cc: int
    overhead_cc: int
    analytic_flag: str  # which columns have no executable protocol here: "all" or "cc"

    def csv(self) -> str:
        return (f"{self.strategy},{self.extra_qubits},{self.n},{self.overhead_no_cc},"
                f"{self.overhead_cc},{self.analytic_flag}")


@dataclass(frozen=True)
class OverheadReport:
    n: int
    rows: tuple[OverheadRow, ...]

    def row(self, strategy: str) -> OverheadRow:
        return next(r for r in self.rows if r.strategy == strategy)

    def to_csv(self) -> str:
        return "\n".join([CSV_HEADER, *(r.csv() for r in self.rows)]) + "\n"


def _cuts_per_gate(strategy: Strategy) -> tuple[int, int, int]:
    # Counted on a CCCX split 2|1+target; independent of the split sizes.
    res = decompose_mcx(mcx_test_circuit(2, 1), 0, strategy)
    return len(res.ancillas), res.crossing_gate_count, res.crossing_wire_count


def overhead_table(n: int, strategies=STRATEGY_ROWS) -> OverheadReport:
    """Sampling overhead for ``n`` bipartitioned MCX gates per strategy."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = []
    for name in strategies:
        if name == "prior_work":
            o = PRIOR_WORK_GAMMA ** (2 * n)
            rows.append(OverheadRow(name, 0, n, n, 0, o, o, "all"))
            continue
        extra, g, w = _cuts_per_gate(Strategy(name))
        g, w = g * n, w * n
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            no_cc = overhead_per_cut(CutKind.GATE_CX) ** g * overhead_per_cut(CutKind.WIRE) ** w
            cc = (overhead_per_cut(CutKind.GATE_CX, True) ** g
                  * overhead_per_cut(CutKind.WIRE, True) ** w)
        rows.append(OverheadRow(name, extra, n, g, w, no_cc, cc, "cc"))
    return OverheadReport(n, tuple(rows))
