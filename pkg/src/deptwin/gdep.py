"""Generalized DEP wrench model: quadratic forms and multipole expansion.

The micro-object is a rigid cloud of polarizable volume elements.  Element
k carries the effective dipole p_k = alpha_k E(r_k) with

    alpha_k = 3 eps0 eps_m v_k K(omega),
    K(omega) = (eps_o* - eps_m*) / (eps_o* + 2 eps_m*)   (Clausius-Mossotti)

where eps* = eps0 eps_r - j sigma / omega.  Time-averaged force and torque
of a phasor drive u (one complex amplitude per electrode) are quadratic
forms

    F_a = u^H P_a u,   T_a = u^H Q_a u,

with P_a, Q_a Hermitian n x n matrices assembled from per-element kernels

    F-kernel = 1/2 Re[(alpha_k E_i . grad) E_j*],
    T-kernel = 1/2 Re[alpha_k E_i x E_j*] + (r_k - r) x F-kernel.

A second evaluation route expands the same wrench about the body origin
using charge-equivalent multipole moments of the dipole cloud: a dipole p
at offset d has charge moments Q^(n) = n sym(p (x) d^(n-1)), so

    F_a = 1/2 Re[ sum_n (1/n!) Q^(n) (.)^n grad^n E_a* ],
    T_a = 1/2 Re[ sum_n (1/(n-1)!) eps_abc Q^(n)_{b,...} (.)^{n-1} grad^{n-1} E_c* ],

which converges to the direct per-element sum and needs the basis field
derivatives at the body origin only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .field import ElectrodeBasis, FieldDerivatives, _electrode_derivs
from .geometry import ObjectModel, Pose
from .hydro import Wrench

__all__ = [
    "EPS0",
    "MaterialProperties",
    "WrenchFormSet",
    "MultipoleSet",
    "cm_factor",
    "assemble_forms",
    "eval_wrench",
    "eval_wrench_batch",
    "direct_wrench",
    "multipole_moments",
    "eval_wrench_multipole",
]

EPS0 = 8.8541878128e-12  # vacuum permittivity (F/m)

# Levi-Civita symbol
_EPS3 = np.zeros((3, 3, 3))
for _i, _j, _k in itertools.permutations(range(3)):
    _EPS3[_i, _j, _k] = (_i - _j) * (_j - _k) * (_k - _i) / 2.0


@dataclass(frozen=True)
class MaterialProperties:
    """Medium/object material pair.

    Relative permittivities, conductivities in S/m, mass densities in
    kg/m^3 and the dynamic viscosity of the medium in Pa s.
    """

    eps_m: float  # medium relative permittivity
    sigma_m: float  # medium conductivity (S/m)
    eps_o: float  # object relative permittivity
    sigma_o: float  # object conductivity (S/m)
    rho_m: float  # medium density (kg/m^3)
    rho_o: float  # object density (kg/m^3)
    mu: float  # medium dynamic viscosity (Pa s)

    @classmethod
    def water_su8(cls) -> "MaterialProperties":
        """DI-water solution and SU-8 polymer at 25 C."""
        return cls(
            eps_m=80.0,
            sigma_m=1.6e-3,  # 16 uS/cm
            eps_o=3.2,
            sigma_o=5.556e-15,  # 5.556e-11 uS/cm
            rho_m=998.0,
            rho_o=1190.0,
            mu=0.9078e-3,
        )


def cm_factor(m: MaterialProperties, omega: float) -> complex:
    """Clausius-Mossotti factor at angular frequency omega (rad/s).

    At omega = 0 the conductivity-only limit (sigma_o - sigma_m) /
    (sigma_o + 2 sigma_m) is returned.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    if omega == 0.0:
        return complex((m.sigma_o - m.sigma_m) / (m.sigma_o + 2.0 * m.sigma_m))
    em = EPS0 * m.eps_m - 1j * m.sigma_m / omega
    eo = EPS0 * m.eps_o - 1j * m.sigma_o / omega
    return complex((eo - em) / (eo + 2.0 * em))


def _alphas(obj: ObjectModel, m: MaterialProperties, omega: float) -> np.ndarray:
    """Per-element effective dipole polarizability (complex, F m^2)."""
    return 3.0 * EPS0 * m.eps_m * obj.volumes * cm_factor(m, omega)


@dataclass
class WrenchFormSet:
    """Hermitian quadratic forms of the wrench for one object pose.

    F_forms[a] and T_forms[a] are n x n Hermitian matrices so that
    F_a = u^H F_forms[a] u (and likewise for torque about the body origin).
    """

    F_forms: np.ndarray  # (3, n, n) complex
    T_forms: np.ndarray  # (3, n, n) complex
    origin: np.ndarray  # body origin the torque refers to (3,)
    n_electrodes: int

    def stacked(self) -> np.ndarray:
        """(6, n, n) array [P_x, P_y, P_z, Q_x, Q_y, Q_z]."""
        return np.concatenate([self.F_forms, self.T_forms], axis=0)


def _basis_E_dE(basis: ElectrodeBasis, points: np.ndarray, max_order: int = 2):
    """Stacked per-electrode field data at a batch of points.

    Returns (E, dE[, d2E]): E[i, m, a] = a-component of electrode i's field
    at point m; dE[i, m, b, a] = d_b E_a.  Real float arrays.
    """
    per_el = _electrode_derivs(basis, points, max_order)
    E = np.stack([-p[1] for p in per_el])
    dE = np.stack([-p[2] for p in per_el])
    return E, dE


def assemble_forms(
    obj: ObjectModel,
    pose: Pose,
    basis: ElectrodeBasis,
    m: MaterialProperties,
    omega: float,
) -> WrenchFormSet:
    """Assemble the six Hermitian wrench forms at the given pose."""
    centers = obj.world_centers(pose)
    d = centers - pose.p
    alpha = _alphas(obj, m, omega)
    E, dE = _basis_E_dE(basis, centers)
    half_alpha = 0.5 * alpha
    # force kernels: P_raw[a, j, i] = sum_m (alpha_m/2) E[i,m,b] dE[j,m,b,a]
    P = np.einsum("m,imb,jmba->aji", half_alpha, E, dE)
    # torque: dipole rotation + lever arm of the element force kernel
    Q = np.einsum("m,abc,imb,jmc->aji", half_alpha, _EPS3, E, E)
    Q += np.einsum("abc,mb,m,ime,jmec->aji", _EPS3, d, half_alpha, E, dE)
    P = 0.5 * (P + np.conj(np.swapaxes(P, 1, 2)))
    Q = 0.5 * (Q + np.conj(np.swapaxes(Q, 1, 2)))
    return WrenchFormSet(
        F_forms=P, T_forms=Q, origin=pose.p.copy(), n_electrodes=basis.n_electrodes
    )


def eval_wrench(forms: WrenchFormSet, u: np.ndarray) -> Wrench:
    """Evaluate F_a = u^H P_a u, T_a = u^H Q_a u for a drive phasor u."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    if len(u) != forms.n_electrodes:
        raise ValueError("drive length does not match form size")
    w = np.einsum("i,kij,j->k", np.conj(u), forms.stacked(), u).real
    return Wrench(w[:3], w[3:])


def eval_wrench_batch(forms: WrenchFormSet, u_batch: np.ndarray) -> np.ndarray:
    """Wrench rows for many drive vectors at once; returns (m, 6)."""
    U = np.asarray(u_batch, dtype=complex)
    return np.einsum("mi,kij,mj->mk", np.conj(U), forms.stacked(), U).real


def direct_wrench(
    obj: ObjectModel,
    pose: Pose,
    basis: ElectrodeBasis,
    m: MaterialProperties,
    omega: float,
    u: np.ndarray,
) -> Wrench:
    """Reference evaluation: superpose the total field at every element and
    sum the per-element dipole force and torque directly.

    Mathematically identical to eval_wrench(assemble_forms(...), u); kept
    as an independent code path (and used as the fast plant-side evaluator,
    since it avoids the n x n form assembly).
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    centers = obj.world_centers(pose)
    d = centers - pose.p
    alpha = _alphas(obj, m, omega)
    E, dE = _basis_E_dE(basis, centers)
    Et = np.einsum("i,ima->ma", u, E)  # total field at elements
    dEt = np.einsum("i,imba->mba", u, dE)
    Fk = 0.5 * np.real(
        alpha[:, None] * np.einsum("mb,mba->ma", Et, np.conj(dEt))
    )
    Tk = 0.5 * np.real(
        alpha[:, None] * np.einsum("abc,mb,mc->ma", _EPS3, Et, np.conj(Et))
    )
    T = Tk + np.cross(d, Fk)
    return Wrench(Fk.sum(axis=0), T.sum(axis=0))


# ---------------------------------------------------------------------------
# multipole route
# ---------------------------------------------------------------------------


def _symmetrize(t: np.ndarray) -> np.ndarray:
    k = t.ndim
    if k <= 1:
        return t
    acc = np.zeros_like(t)
    perms = list(itertools.permutations(range(k)))
    for p in perms:
        acc += np.transpose(t, p)
    return acc / len(perms)


@dataclass
class MultipoleSet:
    """Charge-equivalent multipole moments of the dipole cloud, per basis
    electrode, about a fixed expansion origin.

    moments[n] has shape (n_electrodes,) + (3,)*n and is symmetric in its
    tensor indices; the drive-weighted moment is sum_i u_i moments[n][i].
    """

    origin: np.ndarray
    order: int
    moments: dict[int, np.ndarray]

    @property
    def n_electrodes(self) -> int:
        return self.moments[1].shape[0]


def multipole_moments(
    obj: ObjectModel,
    pose: Pose,
    basis_fields: list[FieldDerivatives],
    m: MaterialProperties,
    omega: float,
    order: int = 5,
) -> MultipoleSet:
    """Multipole moments up to ``order`` from origin field derivatives.

    basis_fields must be evaluated at the body origin with max_order at
    least order + 1; element fields are reconstructed by Taylor expansion
    from the same derivative data, so no field evaluations away from the
    origin are needed.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    for f in basis_fields:
        if f.max_order < order + 1:
            raise ValueError("basis fields need max_order >= order + 1")
        if not np.allclose(f.x, pose.p):
            raise ValueError("basis fields must be evaluated at the body origin")
    centers = obj.world_centers(pose)
    d = centers - pose.p  # (M, 3)
    alpha = _alphas(obj, m, omega)
    n_el = len(basis_fields)
    mmax = basis_fields[0].max_order

    moments: dict[int, np.ndarray] = {}
    E_rec = np.empty((n_el, len(d), 3), dtype=complex)
    for i, f in enumerate(basis_fields):
        # E_a(r + d) = -sum_t (1/t!) d^{g1..gt} D^{t+1}_{g1..gt a}
        acc = np.broadcast_to(-f.tensors[1], (len(d), 3)).copy()
        for t in range(1, mmax):
            X = np.tensordot(d, f.tensors[t + 1], axes=(1, 0))  # (M,) + (3,)*t
            for _ in range(t - 1):
                X = np.einsum("mi...,mi->m...", X, d)
            acc += -X / math.factorial(t)
        E_rec[i] = acc
    p_elem = alpha[None, :, None] * E_rec  # per-element dipoles (n_el, M, 3)

    for n in range(1, order + 1):
        # raw = sum_m p (x) d^(n-1); then charge-equivalent n * sym(...)
        operands = [p_elem]
        script = "ima"
        letters = "bcde"
        for j in range(n - 1):
            operands.append(d)
            script += f",m{letters[j]}"
        script += "->i" + "a" + letters[: n - 1]
        raw = np.einsum(script, *operands)
        sym = np.stack([_symmetrize(raw[i]) for i in range(n_el)])
        moments[n] = n * sym
    return MultipoleSet(origin=pose.p.copy(), order=order, moments=moments)


def eval_wrench_multipole(
    mp: MultipoleSet, f: FieldDerivatives, u: np.ndarray
) -> Wrench:
    """Wrench from multipole moments and total-field derivatives at the
    expansion origin.

    ``f`` is the drive-superposed field (same u) at mp.origin with
    max_order >= mp.order + 1.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    if len(u) != mp.n_electrodes:
        raise ValueError("drive length does not match moment set")
    if f.max_order < mp.order + 1:
        raise ValueError("field derivatives need max_order >= order + 1")
    if not np.allclose(f.x, mp.origin):
        raise ValueError("field derivatives must be at the expansion origin")
    F = np.zeros(3, dtype=complex)
    T = np.zeros(3, dtype=complex)
    for n in range(1, mp.order + 1):
        q = np.einsum("i,i...->...", u, mp.moments[n])  # (3,)*n
        # grad^n E*_a = -conj(D^(n+1))_{g1..gn a}
        gradE = -np.conj(f.tensors[n + 1])
        axes = (list(range(n)), list(range(n)))
        F += np.tensordot(q, gradE, axes=axes) / math.factorial(n)
        # torque: contract n-1 indices, one epsilon
        gradEc = -np.conj(f.tensors[n])
        if n == 1:
            Y = np.multiply.outer(q, gradEc)
        else:
            axes = (list(range(1, n)), list(range(n - 1)))
            Y = np.tensordot(q, gradEc, axes=axes)
        T += np.einsum("abc,bc->a", _EPS3, Y) / math.factorial(n - 1)
    return Wrench(0.5 * F.real, 0.5 * T.real)
