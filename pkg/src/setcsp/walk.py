"""Lazy random walks: the MA verifier for ACAC and exact hitting probabilities.

Randomness comes from Philox4x64-10 (``numpy.random.Philox``), a counter-based
generator.  Trial ``i`` of a run with seed ``s`` uses key ``s`` and a counter
starting at ``(0, 0, i, 0)``, so each trial owns a fixed substream no matter
how many trials run.  Step ``k`` of a walk consumes the ``k``-th double ``u``
of its substream: the walk stays put when ``u < 1/2`` and otherwise moves to
neighbor ``floor((2u - 1) * deg)`` of the sorted neighbor list.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .acac import AcacInstance, ExplicitGraph, IntegrityError, materialize
from .core import ValidationError, check_bits, from_int, to_int
from .oracle import min_boundary_ratio_with_set

LAZINESS = Fraction(1, 2)
CHUNK = 4096
VECTOR_MAX_BITS = 20
MAX_DP_VERTICES = 1 << 14
# used when the boundary ratio is >= 1/2: the escape lemma needs some delta < 1/2
DELTA_CAP = Fraction(49, 100)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    seed = int(seed) & (2**64 - 1)
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, trial, 0]))


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    trials: int
    seed: int
    laziness: Fraction = LAZINESS

    def __post_init__(self):
        if self.steps < 1 or self.trials < 1:
            raise ValidationError("steps and trials must be positive")
        if self.laziness != LAZINESS:
            raise ValidationError("the walk is lazy with probability exactly 1/2")


@dataclass(frozen=True)
class VerifierParams:
    epsilon: Fraction
    d: int
    n: int

    def __post_init__(self):
        if self.epsilon is None:
            raise ValidationError("the verifier needs an explicit epsilon")
        eps = Fraction(self.epsilon)
        if not 0 < eps < 1:
            raise ValidationError("epsilon must lie in (0, 1)")
        object.__setattr__(self, "epsilon", eps)

    @property
    def d_eff(self) -> int:
        # an edgeless graph still needs a positive degree for the formulas
        return max(self.d, 1)

    @property
    def q1(self) -> int:
        d, eps = self.d_eff, self.epsilon
        return math.ceil(float(16 * d * d / eps**2) * (self.n + math.log(2 * d / eps)))

    @property
    def q2(self) -> int:
        return math.ceil(4 * self.d_eff / self.epsilon)

    @property
    def trials(self) -> int:
        return max(self.n, 1) * self.q2

    @classmethod
    def for_instance(cls, acac: AcacInstance, epsilon=None) -> "VerifierParams":
        eps = epsilon if epsilon is not None else acac.epsilon
        if eps is None:
            raise ValidationError("instance carries no epsilon; pass one explicitly")
        return cls(Fraction(eps), acac.degree_bound, acac.n)


@dataclass(frozen=True)
class WalkOutcome:
    hit: bool
    vertex: str
    step: int


def _move(u: float, nbrs) -> int | None:
    if u < 0.5 or not nbrs:
        return None
    deg = len(nbrs)
    return nbrs[min(int((2.0 * u - 1.0) * deg), deg - 1)]


def lazy_walk(acac: AcacInstance, start: str, steps: int, rng: np.random.Generator) -> WalkOutcome:
    """Walk ``steps`` lazy steps from ``start``; stop at the first marked vertex."""
    check_bits(start, acac.n)
    N = 1 << acac.n
    v = to_int(start)
    if acac.marked_int(v):
        return WalkOutcome(True, start, 0)
    done = 0
    while done < steps:
        draws = rng.random(min(CHUNK, steps - done))
        for u in draws:
            done += 1
            nxt = _move(u, acac.neighbors_int(v))
            if nxt is None:
                continue
            if not 0 <= nxt < N:
                raise IntegrityError(f"neighbor oracle returned out-of-range vertex {nxt}")
            v = nxt
            if acac.marked_int(v):
                return WalkOutcome(True, from_int(v, acac.n), done)
    return WalkOutcome(False, from_int(v, acac.n), steps)


@dataclass(frozen=True)
class VerifyResult:
    verdict: str
    config: WalkConfig
    trials_run: int
    first_hit_trial: int | None
    first_hit_step: int | None

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "trials": self.config.trials,
            "steps": self.config.steps,
            "seed": self.config.seed,
            "trials_run": self.trials_run,
            "first_hit_trial": self.first_hit_trial,
            "first_hit_step": self.first_hit_step,
        }


class _Csr:
    def __init__(self, g: ExplicitGraph):
        deg = np.array([len(a) for a in g.adjacency], dtype=np.int64)
        self.deg = deg
        self.indptr = np.concatenate([[0], np.cumsum(deg)])
        self.flat = np.array([u for a in g.adjacency for u in a] or [0], dtype=np.int64)
        self.marked = np.zeros(g.num_vertices, dtype=bool)
        self.marked[list(g.marked)] = True


def _vector_batch(csr: _Csr, start: int, steps: int, seed: int, trials: range,
                  short_circuit: bool = True):
    """Hit steps (0 = no hit) for a batch of trials, all walked in lockstep."""
    B = len(trials)
    gens = [trial_rng(seed, t) for t in trials]
    pos = np.full(B, start, dtype=np.int64)
    hit_step = np.zeros(B, dtype=np.int64)
    active = np.ones(B, dtype=bool)
    done = 0
    while done < steps and active.any():
        c = min(CHUNK, steps - done)
        draws = np.stack([g.random(c) for g in gens])
        for k in range(c):
            u = draws[:, k]
            deg = csr.deg[pos]
            move = active & (u >= 0.5) & (deg > 0)
            if move.any():
                idx = np.minimum(np.floor((2.0 * u - 1.0) * deg).astype(np.int64), deg - 1)
                nxt = csr.flat[csr.indptr[pos] + np.maximum(idx, 0)]
                pos = np.where(move, nxt, pos)
                newly = move & csr.marked[pos]
                if newly.any():
                    hit_step[newly] = done + k + 1
                    active &= ~newly
                    if short_circuit:
                        # later trials cannot change the first hit
                        active[int(np.argmax(hit_step > 0)) + 1:] = False
        done += c
    return hit_step


def ma_verify(acac: AcacInstance, witness: str, params: VerifierParams, seed: int, *,
              audit: bool = False, trials_override: int | None = None,
              steps_override: int | None = None, engine: str = "auto",
              batch: int = 1024) -> VerifyResult:
    """Run ``n·q2`` lazy walks of ``q1`` steps from ``witness``; reject on any marked vertex."""
    check_bits(witness, acac.n)
    config = WalkConfig(steps_override or params.q1, trials_override or params.trials, int(seed))
    if engine == "auto":
        engine = "vector" if acac.n <= VECTOR_MAX_BITS else "scalar"
    first_trial = first_step = None
    trials_run = 0
    if acac.marked(witness):
        return VerifyResult("reject", config, config.trials if audit else 1, 0, 0)
    if engine == "scalar":
        for t in range(config.trials):
            out = lazy_walk(acac, witness, config.steps, trial_rng(config.seed, t))
            trials_run += 1
            if out.hit and first_trial is None:
                first_trial, first_step = t, out.step
                if not audit:
                    break
    elif engine == "vector":
        csr = _Csr(materialize(acac))
        start = to_int(witness)
        for lo in range(0, config.trials, batch):
            trials = range(lo, min(lo + batch, config.trials))
            hits = _vector_batch(csr, start, config.steps, config.seed, trials, not audit)
            hit_idx = np.nonzero(hits)[0]
            if len(hit_idx) and first_trial is None:
                i = int(hit_idx[0])
                first_trial, first_step = lo + i, int(hits[i])
                if not audit:
                    trials_run += i + 1
                    break
            trials_run += len(trials)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    verdict = "reject" if first_trial is not None else "accept"
    return VerifyResult(verdict, config, trials_run, first_trial, first_step)


# --------------------------------------------------------------------------
# exact hitting probabilities

def _hitting_dp(g: ExplicitGraph, absorbing: set[int]):
    """Yield ``(k, H, scale)`` with ``H[v] / scale`` the exact probability that a
    ``k``-step lazy walk from ``v`` visits ``absorbing``."""
    if g.num_vertices > MAX_DP_VERTICES:
        raise ValidationError(f"exact DP needs at most {MAX_DP_VERTICES} vertices")
    degs = {g.degree(v) for v in range(g.num_vertices) if v not in absorbing and g.degree(v)}
    L = 2 * math.lcm(*degs) if degs else 2
    half = L // 2
    coef = [L // (2 * g.degree(v)) if g.degree(v) else 0 for v in range(g.num_vertices)]
    H = [1 if v in absorbing else 0 for v in range(g.num_vertices)]
    scale = 1
    k = 0
    yield k, H, scale
    while True:
        k += 1
        scale *= L
        new = [0] * g.num_vertices
        for v in range(g.num_vertices):
            if v in absorbing:
                new[v] = scale
            elif coef[v]:
                new[v] = half * H[v] + coef[v] * sum(H[u] for u in g.adjacency[v])
            else:
                new[v] = L * H[v]
        H = new
        yield k, H, scale


def hitting_probability(g: ExplicitGraph, start: int, steps: int) -> Fraction:
    for k, H, scale in _hitting_dp(g, set(g.marked)):
        if k == steps:
            return Fraction(H[start], scale)


def escape_step_budget(d: int, delta: Fraction, n: int) -> int:
    return math.ceil(float(16 * d * d / delta**2) * (n + math.log(2 * d / delta)))


@dataclass(frozen=True)
class EscapeReport:
    hypothesis_met: bool
    reason: str
    ratio: Fraction | None = None
    delta: Fraction | None = None
    clamped: bool = False
    d: int | None = None
    n: int | None = None
    budget: int | None = None
    threshold: Fraction | None = None
    steps_needed: int | None = None
    min_probability: Fraction | None = None
    worst_start: int | None = None
    holds: bool | None = None

    def to_json(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v
        return out


def check_escape_lemma(g: ExplicitGraph, A: Iterable[int] | None = None,
                       d: int | None = None) -> EscapeReport:
    """Check the escape-time bound exactly on an explicit graph.

    ``A`` defaults to the unmarked vertices and ``B`` is its complement.  The
    hitting probability into ``B`` is nondecreasing in the walk length, so the
    DP stops at the first length reaching ``δ/(4d)``; the bound holds when that
    length is within the step budget.
    """
    A = sorted(set(range(g.num_vertices)) - set(g.marked) if A is None else set(A))
    B = set(range(g.num_vertices)) - set(A)
    if not A or not B:
        raise ValidationError("both A and its complement must be nonempty")
    ratio, _ = min_boundary_ratio_with_set(g, A)
    if ratio == 0:
        return EscapeReport(False, "some subset of A has empty boundary (delta = 0)", ratio=ratio)
    clamped = ratio >= Fraction(1, 2)
    delta = DELTA_CAP if clamped else ratio
    dmax = max(g.degree(v) for v in A)
    if d is None:
        d = dmax
    elif dmax > d:
        return EscapeReport(False, f"a vertex of A has degree {dmax} > d = {d}", ratio=ratio)
    n = max(1, (g.num_vertices - 1).bit_length())
    budget = escape_step_budget(d, delta, n)
    threshold = delta / (4 * d)
    a, b = threshold.numerator, threshold.denominator
    for k, H, scale in _hitting_dp(g, B):
        worst = min(A, key=lambda v: H[v])
        if b * H[worst] >= a * scale or k >= budget:
            reached = b * H[worst] >= a * scale
            return EscapeReport(
                True, "ok" if g.is_connected() else "ok (graph not connected)",
                ratio=ratio, delta=delta, clamped=clamped, d=d, n=n, budget=budget,
                threshold=threshold, steps_needed=k if reached else None,
                min_probability=Fraction(H[worst], scale), worst_start=worst,
                holds=reached and k <= budget)
