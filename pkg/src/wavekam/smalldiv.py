"""Small divisors omega.k (+/- lambda_a) (+/- lambda_b): evaluation, combinatorial
resonance classification, and finite-resolution lower-bound scans.

Divisor kinds:
    D0 = omega . k
    D1 = omega . k + lambda_a
    D2 = omega . k + lambda_a + lambda_b
    D3 = omega . k + lambda_a - lambda_b
with k an integer vector over the tangential set and a, b normal modes.
Resonance is decided by the index pattern (k = -e_s etc.), never by a numeric
zero test: for integer k and generic mass those patterns are exactly the
divisors that vanish identically in the mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .intervals import Interval, interval_frequency
from .spectrum import AdmissibleSet, FrequencySystem, MeasureEstimate, _count_boundary_cells, _mass_grid

KINDS = ("D0", "D1", "D2", "D3")


def bracket(s: int) -> int:
    """<s> = max(|s|, 1)."""
    return max(abs(s), 1)


@dataclass(frozen=True)
class DivisorQuery:
    kind: str
    k: tuple[int, ...]
    a: Optional[int] = None
    b: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown divisor kind {self.kind}")
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        needs_a = self.kind in ("D1", "D2", "D3")
        needs_b = self.kind in ("D2", "D3")
        if needs_a != (self.a is not None) or needs_b != (self.b is not None):
            raise ValueError(f"{self.kind} query has wrong (a, b) arity: {self}")


@dataclass
class DivisorReport:
    query: DivisorQuery
    value: float
    resonant: bool
    bound_required: float
    satisfied: bool
    certified: Optional[bool] = None
    mass: Optional[float] = None

    def as_line(self) -> str:
        q = self.query
        k_str = ",".join(str(x) for x in q.k)
        return (
            f"kind={q.kind} k={k_str} a={q.a} b={q.b} value={self.value!r} "
            f"required={self.bound_required!r} resonant={int(self.resonant)} "
            f"satisfied={int(self.satisfied)}"
            + ("" if self.certified is None else f" certified={int(self.certified)}")
        )


def divisor_weight(q: DivisorQuery) -> float:
    """Weight multiplying kappa in the lower bound for each kind."""
    if q.kind == "D0":
        return 1.0
    if q.kind == "D1":
        return float(bracket(q.a))
    if q.kind == "D2":
        return float(bracket(q.a) + bracket(q.b))
    return float(1 + abs(abs(q.a) - abs(q.b)))


def _check_normal(A: AdmissibleSet, s: int, name: str) -> None:
    if A.is_tangential(s):
        raise ValueError(f"{name}={s} is tangential; normal mode expected")


def evaluate_divisor(q: DivisorQuery, fs: FrequencySystem, A: AdmissibleSet) -> float:
    """Signed value of the divisor at the system's mass."""
    if len(q.k) != A.n:
        raise ValueError(f"k must have length {A.n}")
    value = float(np.dot(q.k, fs.omega_vector(A)))
    if q.kind in ("D1", "D2", "D3"):
        _check_normal(A, q.a, "a")
        value += float(fs.lam(q.a))
    if q.kind == "D2":
        _check_normal(A, q.b, "b")
        value += float(fs.lam(q.b))
    elif q.kind == "D3":
        _check_normal(A, q.b, "b")
        value -= float(fs.lam(q.b))
    return value


def evaluate_divisor_interval(q: DivisorQuery, m: float, A: AdmissibleSet) -> Interval:
    """Certified enclosure of the divisor value at mass m."""
    total = Interval.point(0.0)
    for ka, a in zip(q.k, A.modes):
        if ka != 0:
            total = total + interval_frequency(a, m) * ka
    if q.kind in ("D1", "D2", "D3"):
        total = total + interval_frequency(q.a, m)
    if q.kind == "D2":
        total = total + interval_frequency(q.b, m)
    elif q.kind == "D3":
        total = total - interval_frequency(q.b, m)
    return total


def certify_lower_bound(q: DivisorQuery, m: float, A: AdmissibleSet,
                        kappa: float) -> bool:
    """Rigorous check |divisor| >= kappa * weight at mass m via directed
    rounding; True only when the bound provably holds."""
    iv = evaluate_divisor_interval(q, m, A)
    return iv.abs_lower() >= kappa * divisor_weight(q)


def _unit(A: AdmissibleSet, s: int) -> tuple[int, ...]:
    e = [0] * A.n
    e[A.index_of(s)] = 1
    return tuple(e)


def _neg(k: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in k)


def _add(k1: Sequence[int], k2: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(k1, k2))


def classify_resonant(q: DivisorQuery, A: AdmissibleSet) -> bool:
    """Combinatorial resonance test per kind.

    D0: k = 0.  D1: k = -e_s with |a| = |s|.  D2: k = -e_s - e_s' with
    {|a|, |b|} = {|s|, |s'|}.  D3: k = -e_s + e_s' with |a| = |s|, |b| = |s'|.
    """
    if q.kind == "D0":
        return all(x == 0 for x in q.k)
    if q.kind == "D1":
        for s in A.modes:
            if abs(q.a) == abs(s) and q.k == _neg(_unit(A, s)):
                return True
        return False
    if q.kind == "D2":
        target = sorted((abs(q.a), abs(q.b)))
        for s in A.modes:
            for sp in A.modes:
                if sorted((abs(s), abs(sp))) == target and q.k == _neg(
                    _add(_unit(A, s), _unit(A, sp))
                ):
                    return True
        return False
    # D3: a pairs with the -e_s entry, b with the +e_s' entry
    for s in A.modes:
        for sp in A.modes:
            if abs(q.a) == abs(s) and abs(q.b) == abs(sp):
                if q.k == _add(_neg(_unit(A, s)), _unit(A, sp)):
                    return True
    return False


# ---------------------------------------------------------------------------
# Enumeration and scans
# ---------------------------------------------------------------------------

def _k_vectors(n: int, N: int) -> Iterator[tuple[int, ...]]:
    """Integer vectors with 0 < |k|_1 <= N."""
    def rec(prefix: list[int], budget: int, dims_left: int):
        if dims_left == 0:
            if any(prefix):
                yield tuple(prefix)
            return
        for v in range(-budget, budget + 1):
            yield from rec(prefix + [v], budget - abs(v), dims_left - 1)

    yield from rec([], N, n)


DEFAULT_RHO_EXPONENT = "1/(4((n+2)^2+1)(n+2))"


def default_mode_cutoff(A: AdmissibleSet, N: int) -> int:
    """Default normal-mode truncation 2 (max|A| + 2) N."""
    return math.ceil(2 * (A.n_bound + 2) * N)


def scan_metadata(A: AdmissibleSet, kappa: float, N: int, S: int) -> dict:
    """Truncation caps and exponents recorded alongside scan results."""
    n = A.n
    rho = 1.0 / (4 * ((n + 2) ** 2 + 1) * (n + 2))
    return {
        "C_A": A.n_bound,
        "S": S,
        "d1_d2_cap": default_mode_cutoff(A, N),
        "d3_b_cap": 2 * kappa ** (-rho) + (A.n_bound + 3) * N,
        "rho_exponent": rho,
        "tau_d0": 1.0 / n,
        "iota_d0": float(n),
        "tau_d1_d2": 1.0 / (n + 1),
        "iota_d1_d2": (n + 1) * (2 * n + 3) + 1.0 / (n + 1),
        "tau_d3": 1.0 / (2 * (n + 2)),
        "iota_d3": (n + 2) * (2 * n + 5) + 1.0 / (2 * (n + 2)),
    }


def enumerate_queries(A: AdmissibleSet, N: int, S: int,
                      kinds: Sequence[str] = KINDS) -> Iterator[DivisorQuery]:
    """All queries with 0 < |k|_1 <= N and |a|, |b| <= S normal, plus the
    k = 0 family for D3 (which has an unconditional 1/8 lower bound)."""
    normals = [s for s in range(-S, S + 1) if A.is_normal(s)]
    ks = list(_k_vectors(A.n, N))
    if "D0" in kinds:
        for k in ks:
            yield DivisorQuery("D0", k)
    if "D1" in kinds:
        for k in ks:
            for a in normals:
                yield DivisorQuery("D1", k, a=a)
    if "D2" in kinds:
        for k in ks:
            for a in normals:
                for b in normals:
                    yield DivisorQuery("D2", k, a=a, b=b)
    if "D3" in kinds:
        zero = tuple([0] * A.n)
        for k in list(ks) + [zero]:
            for a in normals:
                for b in normals:
                    if k == zero and abs(a) == abs(b):
                        continue
                    yield DivisorQuery("D3", k, a=a, b=b)


def scan_lower_bounds(fs: FrequencySystem, A: AdmissibleSet, kappa: float, N: int,
                      S: Optional[int] = None, certify: bool = False,
                      kinds: Sequence[str] = KINDS) -> list[DivisorReport]:
    """Check |divisor| >= kappa * weight over the finite query range.

    Returns the violations only; an empty list certifies the bounds at this
    resolution.  The k = 0 branch of D3 uses the unconditional constant 1/8,
    so it is checked against max(kappa, 1/8) being unnecessary; it simply
    participates with the same kappa bound (valid whenever kappa <= 1/8).
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    if S is None:
        S = default_mode_cutoff(A, N)
    if S < A.n_bound:
        raise ValueError("S must cover the tangential set")
    violations = []
    for q in enumerate_queries(A, N, S, kinds):
        resonant = classify_resonant(q, A)
        if resonant:
            continue
        value = evaluate_divisor(q, fs, A)
        required = kappa * divisor_weight(q)
        if abs(value) < required:
            report = DivisorReport(q, value, False, required, False, mass=fs.mass)
            if certify:
                iv = evaluate_divisor_interval(q, fs.mass, A)
                report.certified = iv.abs_upper() < required
            violations.append(report)
    return violations


def excluded_mass_scan(A: AdmissibleSet, kappa: float, N: int,
                       S: Optional[int] = None, grid: int = 10 ** 4,
                       kinds: Sequence[str] = KINDS) -> MeasureEstimate:
    """Fraction of grid masses in [1,2] at which some lower bound fails.

    Vectorized over the mass grid: each non-resonant query contributes a
    violation mask; the excluded set is their union.
    """
    if S is None:
        S = default_mode_cutoff(A, N)
    masses = _mass_grid(grid)
    omega_grid = np.stack([np.sqrt(a * a + masses) for a in A.modes])
    lam_cache: dict[int, np.ndarray] = {}

    def lam(s: int) -> np.ndarray:
        if s not in lam_cache:
            lam_cache[s] = np.sqrt(s * s + masses)
        return lam_cache[s]

    excluded = np.zeros(grid, dtype=bool)
    for q in enumerate_queries(A, N, S, kinds):
        if classify_resonant(q, A):
            continue
        value = np.tensordot(np.array(q.k, dtype=float), omega_grid, axes=1)
        if q.kind in ("D1", "D2", "D3"):
            value = value + lam(q.a)
        if q.kind == "D2":
            value = value + lam(q.b)
        elif q.kind == "D3":
            value = value - lam(q.b)
        excluded |= np.abs(value) < kappa * divisor_weight(q)
    meta = scan_metadata(A, kappa, N, S)
    n = A.n
    tau, iota = meta["tau_d3"], meta["iota_d3"]
    return MeasureEstimate(
        analytic_bound=float(kappa ** tau * N ** iota),
        sampled_measure=float(np.mean(excluded)),
        grid_points=grid,
        boundary_cells=_count_boundary_cells(excluded),
        parameters={"kappa": kappa, "N": N, **meta,
                    "bound_shape": "C * kappa^tau * N^iota (per-kind exponents in metadata)"},
    )
