"""Order-4 Birkhoff normal form for H2 + P4.

The homological equation {H2, chi4} = Z4 + Q4 - P4 is solved monomial by
monomial.  Writing d(mono) = sum_xi lambda - sum_eta lambda, the generator
coefficient is i * c / d for every removed monomial; the split is decided by
the tangential count t = number of monomial factors with index in the
tangential set A:

    (4,0)/(0,4) pattern        -> removed always (|d| > 4)
    (3,1)/(1,3), t >= 2        -> removed (gated by the minimum divisor)
    (3,1)/(1,3), t <  2        -> kept in Q4 (cubic in the normal directions)
    (2,2), t >= 2, resonant    -> kept in Z4 (vanishing divisor)
    (2,2), t >= 2, non-res     -> removed (gated)
    (2,2), t <  2              -> kept in Q4

Resonance of a (2,2) monomial is the combinatorial test {|i|,|j|} = {|k|,|l|}
on factor indices, which is exactly the set of divisors vanishing identically
in the mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .polyham import (
    Monomial,
    P4Split,
    PolyHamiltonian,
    bracket_with_h2,
    mono,
    monomial_divisor,
    poisson_bracket,
)
from .spectrum import AdmissibleSet, FrequencySystem

ModeSetLike = Union[AdmissibleSet, Iterable[int]]


def _tangential(A: ModeSetLike) -> frozenset[int]:
    if isinstance(A, AdmissibleSet):
        return frozenset(A.modes)
    return frozenset(int(a) for a in A)


def tangential_count(m: Monomial, modes: frozenset[int]) -> int:
    """Number of monomial factors (with multiplicity) indexed in the set."""
    return sum(1 for s in m.xi if s in modes) + sum(1 for s in m.eta if s in modes)


def is_r2(m: Monomial) -> bool:
    """(2,2) monomial whose divisor vanishes identically in the mass."""
    if len(m.xi) != 2 or len(m.eta) != 2:
        return False
    return sorted(abs(s) for s in m.xi) == sorted(abs(s) for s in m.eta)


def is_action(m: Monomial) -> bool:
    """Pure action monomial I_l I_k: xi and eta indices pair identically."""
    return sorted(m.xi) == sorted(m.eta)


@dataclass(frozen=True)
class ResonanceFlags:
    in_J: bool
    in_J2: bool
    in_R2: bool
    omega_kind: Optional[int]  # 0, 1 or 2 by sign pattern, None outside J


def resonance_membership(quad: Sequence[int], A: ModeSetLike) -> ResonanceFlags:
    """Classify an integer quadruple (i, j, k, l) read as the 2-2 monomial
    xi_i xi_j eta_k eta_l: zero momentum, tangential count >= 2, and the
    identically-vanishing divisor pattern.  Purely combinatorial."""
    i, j, k, l = (int(x) for x in quad)
    modes = _tangential(A)
    in_j = (i + j) == (k + l)
    count = sum(1 for x in (i, j, k, l) if x in modes)
    in_j2 = in_j and count >= 2
    in_r2 = sorted((abs(i), abs(j))) == sorted((abs(k), abs(l)))
    return ResonanceFlags(
        in_J=in_j,
        in_J2=in_j2,
        in_R2=in_r2,
        omega_kind=2 if in_j else None,
    )


class NearResonanceError(RuntimeError):
    """Raised when the minimum non-resonant divisor falls below the gate."""

    def __init__(self, monomial: Monomial, value: float, threshold: float):
        self.monomial = monomial
        self.value = value
        self.threshold = threshold
        super().__init__(
            f"divisor {value:.3e} below gate {threshold:.3e} at monomial "
            f"xi={monomial.xi} eta={monomial.eta} (near-resonant mass)"
        )


@dataclass
class NormalFormResult:
    chi4: PolyHamiltonian
    Z4: PolyHamiltonian
    Q4: PolyHamiltonian
    R6_truncated: Optional[PolyHamiltonian]
    residual_norm: float
    gamma_min: float
    mass: float
    modes: tuple[int, ...]
    cutoff: int

    def serialize(self) -> str:
        header = (
            f"# modes: {','.join(str(a) for a in self.modes)}\n"
            f"# mass: {self.mass!r}\n"
            f"# cutoff: {self.cutoff}\n"
            f"# gamma_min: {self.gamma_min!r}\n"
            f"# residual_norm: {self.residual_norm!r}\n"
        )
        parts = [header]
        for name, poly in (("chi4", self.chi4), ("Z4", self.Z4), ("Q4", self.Q4)):
            parts.append(f"# section: {name}\n" + poly.serialize())
        return "".join(parts)


def solve_homological(p4: P4Split, fs: FrequencySystem, A: ModeSetLike,
                      gamma_threshold: float = 1e-8,
                      with_remainder: bool = False) -> NormalFormResult:
    """Solve {H2, chi4} = Z4 + Q4 - P4 exactly, coefficient by coefficient.

    gamma_threshold gates the minimum |divisor| over the removed monomials
    with tangential count >= 2 (the all-xi/all-eta divisors are always > 4).
    The degree-6 remainder {P4, chi4} + (1/2){{H2, chi4}, chi4} is computed
    only on request; it is quadratic in the term count.
    """
    modes = _tangential(A)
    cutoff = p4.cutoff
    chi_terms: dict[Monomial, complex] = {}
    z_terms: dict[Monomial, complex] = {}
    q_terms: dict[Monomial, complex] = {}
    gamma_min = math.inf
    worst: Optional[tuple[Monomial, float]] = None
    for m, c in p4.total:
        nxi = len(m.xi)
        t = tangential_count(m, modes)
        if nxi in (0, 4):
            remove, gated = True, False
        elif nxi in (1, 3):
            remove, gated = t >= 2, True
        else:
            if t < 2:
                remove, gated = False, False
            elif is_r2(m):
                remove, gated = False, False
                z_terms[m] = c
                continue
            else:
                remove, gated = True, True
        if not remove:
            q_terms[m] = c
            continue
        d = monomial_divisor(m, fs)
        if gated:
            if abs(d) < gamma_min:
                gamma_min = abs(d)
                worst = (m, d)
            if abs(d) < gamma_threshold:
                raise NearResonanceError(m, d, gamma_threshold)
        chi_terms[m] = 1j * c / d
    chi4 = PolyHamiltonian(cutoff, chi_terms)
    z4 = PolyHamiltonian(cutoff, z_terms)
    q4 = PolyHamiltonian(cutoff, q_terms)
    defect = bracket_with_h2(chi4, fs).max_coeff_diff(z4 + q4 - p4.total)
    scale = p4.total.max_abs_coeff() or 1.0
    r6 = None
    if with_remainder:
        h2chi = bracket_with_h2(chi4, fs)
        r6 = (
            poisson_bracket(p4.total, chi4, max_degree=6)
            + poisson_bracket(h2chi, chi4, max_degree=6).scale(0.5)
        ).truncate_degree(6).filter(lambda m: m.degree == 6)
    return NormalFormResult(
        chi4=chi4,
        Z4=z4,
        Q4=q4,
        R6_truncated=r6,
        residual_norm=defect / scale,
        gamma_min=gamma_min,
        mass=fs.mass,
        modes=tuple(sorted(modes)),
        cutoff=cutoff,
    )


# ---------------------------------------------------------------------------
# Vanishing of the non-action resonant part
# ---------------------------------------------------------------------------

@dataclass
class ZVanishingReport:
    """Enumeration evidence for the resonant 2-2 part of the normal form.

    counts[r] holds (total, action, non_action) for tangential count r; the
    claim under test is that every non-action class is empty.  survivors
    lists any non-action monomial with its quadruple.
    """

    counts: dict[int, tuple[int, int, int]]
    survivors: list[tuple[Monomial, complex]]

    @property
    def all_empty(self) -> bool:
        return not self.survivors

    def non_empty_classes(self) -> list[int]:
        return sorted(r for r, (_, _, na) in self.counts.items() if na > 0)


def verify_zminus_vanishing(nf: NormalFormResult, A: ModeSetLike) -> ZVanishingReport:
    """Partition the resonant 2-2 monomials by tangential count r in {2,3,4}
    and check that every non-action class is empty.

    A survivor would indicate a mis-specified tangential set or a resonance
    misclassification; the enumeration counts are returned as evidence.
    """
    modes = _tangential(A)
    counts: dict[int, list[int]] = {r: [0, 0, 0] for r in (2, 3, 4)}
    survivors: list[tuple[Monomial, complex]] = []
    for m, c in nf.Z4:
        r = tangential_count(m, modes)
        if r not in counts:
            counts[r] = [0, 0, 0]
        counts[r][0] += 1
        if is_action(m):
            counts[r][1] += 1
        else:
            counts[r][2] += 1
            survivors.append((m, c))
    return ZVanishingReport(
        counts={r: tuple(v) for r, v in counts.items()},
        survivors=survivors,
    )


def z4_action_coefficient_table(nf: NormalFormResult, A: ModeSetLike) -> dict[tuple[int, int], tuple[complex, float]]:
    """For each unordered tangential pair {l, k}, the coefficient of I_l I_k
    in Z4 next to the closed form (3/4pi)(4 - 3 delta_{l,k})/(lambda_l lambda_k)."""
    modes = sorted(_tangential(A))
    fs = FrequencySystem(nf.mass)
    table = {}
    for i, l in enumerate(modes):
        for k in modes[i:]:
            monomial = mono(sorted((l, k)), sorted((l, k)))
            actual = nf.Z4.coeff(monomial)
            delta = 1.0 if l == k else 0.0
            predicted = (3.0 / (4.0 * math.pi)) * (4.0 - 3.0 * delta) / float(
                fs.lam(l) * fs.lam(k))
            table[(l, k)] = (actual, predicted)
    return table


# ---------------------------------------------------------------------------
# Frequency matrix and rescaled normal form
# ---------------------------------------------------------------------------

def frequency_matrix(fs: FrequencySystem, A: AdmissibleSet) -> np.ndarray:
    """M[k, l] = (3/2pi)(4 - 3 delta_{l,k}) / (lambda_k lambda_l); symmetric."""
    lam = fs.omega_vector(A)
    n = A.n
    M = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            delta = 1.0 if i == j else 0.0
            M[i, j] = (3.0 / (2.0 * math.pi)) * (4.0 - 3.0 * delta) / (lam[i] * lam[j])
    return M


def det_m_closed_form(fs: FrequencySystem, A: AdmissibleSet) -> float:
    """det M = (3/2pi)^n (prod lambda_l^-2) (4n - 3) (-3)^(n-1)."""
    lam = fs.omega_vector(A)
    n = A.n
    return (
        (3.0 / (2.0 * math.pi)) ** n
        * float(np.prod(lam ** -2.0))
        * (4 * n - 3)
        * (-3.0) ** (n - 1)
    )


@dataclass
class JetReport:
    """Sizes of the order-(<=2) jet of the rescaled perturbation at r = zeta = 0.

    Component norms are l1 sums of absolute coefficients (an upper bound for
    the sup over real angles).  r2_block_norm is the max entry of the exact
    r-quadratic coefficient matrix, the O(nu) leading part of f; the jet
    proper is O(nu^(3/2)) once the degree-6 remainder is included.
    """

    value_norm: float
    grad_r_norm: float
    grad_zeta_norm: float
    hess_zeta_norm: float
    r2_block_norm: float
    r_zeta_norm: float
    q4_jet_norm: float
    r6_jet_norm: float

    @property
    def jet_total(self) -> float:
        return self.value_norm + self.grad_r_norm + self.grad_zeta_norm + self.hess_zeta_norm


@dataclass
class RescaledNormalForm:
    """Internal/external frequency maps after the action rescaling I = nu(rho + r).

    Omega_k(rho) = omega_k + nu (M rho)_k and
    Lambda_a(rho) = lambda_a + nu (3/pi) (1/lambda_a) sum_l rho_l / lambda_l;
    both affine in rho.
    """

    A: AdmissibleSet
    fs: FrequencySystem
    nu: float
    rho: np.ndarray
    M: np.ndarray
    cutoff: int
    r2_matrix: np.ndarray          # coefficient of r_l r_a in f, times 1/nu
    jet: Optional[JetReport]
    lambda_shift_constant: float   # C with |Lambda_a - lambda_a| <= C nu / <a>

    @property
    def Omega(self) -> dict[int, float]:
        vec = self.omega_of(self.rho)
        return {a: float(v) for a, v in zip(self.A.modes, vec)}

    def omega_of(self, rho: Optional[np.ndarray] = None) -> np.ndarray:
        rho = self.rho if rho is None else np.asarray(rho, dtype=float)
        return self.fs.omega_vector(self.A) + self.nu * (self.M @ rho)

    def lambda_of(self, s, rho: Optional[np.ndarray] = None):
        rho = self.rho if rho is None else np.asarray(rho, dtype=float)
        lam_t = self.fs.omega_vector(self.A)
        shift = (3.0 / math.pi) * float(np.sum(rho / lam_t))
        lam_s = self.fs.lam(s)
        return lam_s + self.nu * shift / lam_s

    def frequency_shift_constant(self) -> float:
        """Reported C for |Lambda_a - lambda_a| <= C nu |a|^-1 over rho in [1,2]^A."""
        return self.lambda_shift_constant

    def quadratic_block(self, a: int, rho: Optional[np.ndarray] = None) -> np.ndarray:
        lam = float(self.lambda_of(a, rho))
        return np.array([[0.0, lam], [lam, 0.0]])


_J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def hamiltonian_block_spectrum(rnf: RescaledNormalForm, a: int) -> np.ndarray:
    """Eigenvalues of i J A_a; should be {+i Lambda_a, -i Lambda_a}."""
    block = rnf.quadratic_block(a)
    return np.linalg.eigvals(1j * _J2 @ block)


def _jet_from_polynomial(poly: Optional[PolyHamiltonian], modes: frozenset[int],
                         nu: float, rho_map: dict[int, float]) -> tuple[float, float, float, float]:
    """Accumulate (value, grad_r, grad_zeta, hess_zeta) l1 sizes contributed
    by nu^{-1} (poly o rescaling): a monomial with nT tangential factors and
    nL normal factors scales as nu^(deg/2 - 1); only nL <= 2 reaches the jet."""
    if poly is None or len(poly) == 0:
        return (0.0, 0.0, 0.0, 0.0)
    value = grad_r = grad_z = hess_z = 0.0
    for m, c in poly:
        idx = list(m.xi) + list(m.eta)
        normal = [s for s in idx if s not in modes]
        tangential = [s for s in idx if s in modes]
        n_l = len(normal)
        if n_l > 2:
            continue
        scale = abs(c) * nu ** (m.degree / 2.0 - 1.0)
        for s in tangential:
            scale *= math.sqrt(rho_map[s])
        if n_l == 0:
            value += scale
            # d/dr of prod sqrt(rho_a + r_a) at r = 0: one factor 1/(2 rho_a)
            grad_r += scale * sum(0.5 / rho_map[s] for s in tangential)
        elif n_l == 1:
            grad_z += scale
        else:
            hess_z += scale
    return (value, grad_r, grad_z, hess_z)


def rescale(nf: NormalFormResult, fs: FrequencySystem, A: AdmissibleSet, nu: float,
            rho: Sequence[float]) -> RescaledNormalForm:
    """Rescaled normal form around the torus with actions I = nu rho.

    rho lies in [1,2]^A.  The perturbation decomposes into the exact
    r-quadratic block, the r (xi eta) cross block, and the scaled quartic tail
    and degree-6 remainder; their jet at r = zeta = 0 is extracted
    symbolically (normal-factor count <= 2).
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (A.n,):
        raise ValueError(f"rho must have length {A.n}")
    if np.any(rho < 1.0) or np.any(rho > 2.0):
        raise ValueError("rho must lie in [1, 2]^A")
    lam_t = fs.omega_vector(A)
    M = frequency_matrix(fs, A)
    r2 = np.empty((A.n, A.n))
    for i in range(A.n):
        for j in range(A.n):
            delta = 1.0 if i == j else 0.0
            r2[i, j] = (3.0 / (4.0 * math.pi)) * (4.0 - 3.0 * delta) / (lam_t[i] * lam_t[j])
    modes = frozenset(A.modes)
    rho_map = {a: float(r) for a, r in zip(A.modes, rho)}
    q4_jet = _jet_from_polynomial(nf.Q4, modes, nu, rho_map)
    r6_jet = _jet_from_polynomial(nf.R6_truncated, modes, nu, rho_map)
    jet = JetReport(
        value_norm=q4_jet[0] + r6_jet[0],
        grad_r_norm=q4_jet[1] + r6_jet[1],
        grad_zeta_norm=q4_jet[2] + r6_jet[2],
        hess_zeta_norm=q4_jet[3] + r6_jet[3],
        r2_block_norm=nu * float(np.max(np.abs(r2))),
        r_zeta_norm=nu * (3.0 / math.pi) * float(np.max(1.0 / lam_t)),
        q4_jet_norm=sum(q4_jet),
        r6_jet_norm=sum(r6_jet),
    )
    shift_c = (3.0 / math.pi) * float(np.sum(2.0 / lam_t))
    return RescaledNormalForm(
        A=A,
        fs=fs,
        nu=nu,
        rho=rho,
        M=M,
        cutoff=nf.cutoff,
        r2_matrix=r2,
        jet=jet,
        lambda_shift_constant=shift_c,
    )
