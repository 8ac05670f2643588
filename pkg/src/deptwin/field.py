"""Electric field basis of a point-source electrode surrogate.

Each electrode is approximated by a small set of point sources in the
chamber plane.  The basis potential of electrode i is

    phi_i(x) = scale_i * sum_s w_s / (4 pi |x - s|)        [V]

i.e. the unit-drive potential with every other electrode grounded; the
scale normalizes the listed sources to roughly 1 V on the electrode
surface.  Spatial derivative tensors D^k = grad^k phi are exact: each
component of grad^k (1/r) is a polynomial in (x, y, z) over an odd power
of r, generated once by a term-rewriting recurrence and evaluated
vectorized.  Harmonicity (traceless D^k for k >= 2) comes out of the
closed form for free and is used as a test invariant, not enforced.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldDomainError",
    "FieldDerivatives",
    "ElectrodeBasis",
    "basis_derivatives",
    "superpose",
    "rotate_derivatives",
    "MAX_ORDER",
]

MAX_ORDER = 6  # highest supported potential derivative order

FOUR_PI = 4.0 * np.pi


class FieldDomainError(ValueError):
    """Raised when a field evaluation point violates source clearance."""


# ---------------------------------------------------------------------------
# closed-form derivatives of 1/r
#
# A term is (a, b, c, p, coef) meaning  coef * x^a y^b z^c * r^(-p).
# d/dx [x^a y^b z^c r^-p] = a x^(a-1) y^b z^c r^-p - p x^(a+1) y^b z^c r^-(p+2)
# Starting from 1/r = (0,0,0,1,1) every derivative stays in this family.
# ---------------------------------------------------------------------------


def _differentiate(terms, axis):
    out: dict[tuple[int, int, int, int], float] = {}
    for a, b, c, p, coef in terms:
        mono = [a, b, c]
        if mono[axis] > 0:
            key = tuple(mono[:axis] + [mono[axis] - 1] + mono[axis + 1 :]) + (p,)
            out[key] = out.get(key, 0.0) + coef * mono[axis]
        key = tuple(mono[:axis] + [mono[axis] + 1] + mono[axis + 1 :]) + (p + 2,)
        out[key] = out.get(key, 0.0) - coef * p
    return [(a, b, c, p, v) for (a, b, c, p), v in out.items() if v != 0.0]


def _build_terms(max_order: int):
    """Terms for every sorted multi-index up to max_order."""
    terms = {(): [(0, 0, 0, 1, 1.0)]}
    frontier = [()]
    for _ in range(max_order):
        nxt = []
        for mi in frontier:
            start = mi[-1] if mi else 0
            for axis in range(start, 3):
                nmi = mi + (axis,)
                if nmi not in terms:
                    terms[nmi] = _differentiate(terms[mi], axis)
                    nxt.append(nmi)
        frontier = nxt
    return terms


_TERMS = _build_terms(MAX_ORDER)

# For each order: the sorted multi-indices, and a gather map from the dense
# 3^k flat index to the position of the sorted component.
_SORTED_MIS = {
    k: [mi for mi in _TERMS if len(mi) == k] for k in range(MAX_ORDER + 1)
}
_GATHER = {}
for _k in range(1, MAX_ORDER + 1):
    lookup = {mi: j for j, mi in enumerate(_SORTED_MIS[_k])}
    flat = np.empty(3**_k, dtype=np.intp)
    for j, idx in enumerate(itertools.product(range(3), repeat=_k)):
        flat[j] = lookup[tuple(sorted(idx))]
    _GATHER[_k] = flat


def _inv_r_derivs_low(rvec: np.ndarray, max_order: int) -> list[np.ndarray]:
    """Closed-form T0..T2 fast path (the hot case in the control loop)."""
    r2 = np.einsum("...i,...i->...", rvec, rvec)
    if np.any(r2 <= 0.0):
        raise FieldDomainError("field evaluation at a source location")
    inv_r = 1.0 / np.sqrt(r2)
    out = [inv_r]
    if max_order >= 1:
        inv_r3 = inv_r / r2
        out.append(-rvec * inv_r3[..., None])
    if max_order >= 2:
        inv_r5 = inv_r3 / r2
        t2 = 3.0 * rvec[..., :, None] * rvec[..., None, :] * inv_r5[..., None, None]
        idx = np.arange(3)
        t2[..., idx, idx] -= inv_r3[..., None]
        out.append(t2)
    return out


def _inv_r_derivs(rvec: np.ndarray, max_order: int) -> list[np.ndarray]:
    """Derivative tensors of 1/|rvec| for a batch of separation vectors.

    rvec: (..., 3).  Returns [T0, T1, ..., Tk] with Tk of shape (..., 3,..,3).
    Orders up to 2 use hardcoded closed forms; the general term-rewriting
    path covers the rest (and doubles as the oracle for the closed forms).
    """
    if max_order <= 2:
        return _inv_r_derivs_low(rvec, max_order)
    x, y, z = rvec[..., 0], rvec[..., 1], rvec[..., 2]
    r2 = x * x + y * y + z * z
    if np.any(r2 <= 0.0):
        raise FieldDomainError("field evaluation at a source location")
    inv_r2 = 1.0 / r2
    inv_r = np.sqrt(inv_r2)
    # powers of coordinates up to max_order, inverse odd powers of r
    max_pow = max_order + 1
    xs = [np.ones_like(x)]
    ys = [np.ones_like(y)]
    zs = [np.ones_like(z)]
    for _ in range(max_pow):
        xs.append(xs[-1] * x)
        ys.append(ys[-1] * y)
        zs.append(zs[-1] * z)
    rp = {1: inv_r}
    for p in range(3, 2 * max_order + 2, 2):
        rp[p] = rp[p - 2] * inv_r2
    out = []
    for k in range(max_order + 1):
        mis = _SORTED_MIS[k]
        vals = np.empty(rvec.shape[:-1] + (len(mis),))
        for j, mi in enumerate(mis):
            acc = None
            for a, b, c, p, coef in _TERMS[mi]:
                t = coef * xs[a] * ys[b] * zs[c] * rp[p]
                acc = t if acc is None else acc + t
            vals[..., j] = acc
        if k == 0:
            out.append(vals[..., 0])
        else:
            dense = vals[..., _GATHER[k]]
            out.append(dense.reshape(rvec.shape[:-1] + (3,) * k))
    return out


@dataclass
class FieldDerivatives:
    """Potential derivative tensors of one (basis or total) field at x.

    tensors[k] has shape (3,)*k and holds grad^k phi; the electric field is
    E = -tensors[1] and grad E = -tensors[2], etc.  Complex dtype so that
    phasor superpositions of basis fields reuse the same container.
    """

    x: np.ndarray
    potential: complex
    tensors: dict[int, np.ndarray]
    max_order: int

    def field(self) -> np.ndarray:
        return -self.tensors[1]

    def grad_field(self) -> np.ndarray:
        """(dE)_ba = d_b E_a = -D2[b, a]."""
        return -self.tensors[2]


@dataclass
class ElectrodeBasis:
    """Point-source surrogate for an n-electrode array.

    sources[i] is an (S_i, 3) array of source positions for electrode i,
    weights[i] the matching dimensionless source weights, and scales[i] the
    volt normalization of the electrode's unit-drive potential.
    """

    sources: list[np.ndarray]
    weights: list[np.ndarray]
    scales: np.ndarray
    clearance: float = 5e-6  # m, minimum evaluation distance from any source

    def __post_init__(self):
        self.sources = [np.asarray(s, dtype=float).reshape(-1, 3) for s in self.sources]
        self.weights = [np.asarray(w, dtype=float).reshape(-1) for w in self.weights]
        self.scales = np.asarray(self.scales, dtype=float).reshape(-1)
        if not (len(self.sources) == len(self.weights) == len(self.scales)):
            raise ValueError("sources/weights/scales length mismatch")
        for s, w in zip(self.sources, self.weights):
            if len(s) != len(w):
                raise ValueError("per-electrode sources and weights differ in length")
        self._all_sources = np.concatenate(self.sources, axis=0)

    @property
    def n_electrodes(self) -> int:
        return len(self.sources)

    def all_sources(self) -> np.ndarray:
        return self._all_sources

    def check_clearance(self, points: np.ndarray) -> None:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d2 = ((pts[:, None, :] - self._all_sources[None, :, :]) ** 2).sum(-1)
        dmin = np.sqrt(d2.min())
        if dmin < self.clearance:
            raise FieldDomainError(
                f"evaluation point {dmin * 1e6:.2f} um from a source "
                f"(clearance {self.clearance * 1e6:.1f} um)"
            )

    @classmethod
    def quadrupole(
        cls,
        n_electrodes: int = 4,
        tip_radius: float = 200e-6,
        sources_per_electrode: int = 3,
        arc_half_angle_deg: float = 35.0,
        z: float = -100e-6,
        surface_offset: float = 9.843436e-6,
        clearance: float = 5e-6,
    ) -> "ElectrodeBasis":
        """Evenly spaced wedge electrodes with tip edges on a circle.

        Each electrode is sources_per_electrode unit sources spread along
        a tangential arc of +/- arc_half_angle_deg on the tip circle,
        mimicking the broad leading edge of a wedge electrode (a single
        radial needle exaggerates near-rim field gradients and with them
        the parasitic wrench floor at large working radii).  The source
        plane sits at z (default 100 um below the chamber floor, i.e. the
        metal is buried under a spacer layer): recessing the sources both
        removes the interior bump from the vertical force profile --
        making the levitation basin monotone below the hover height --
        and keeps the working disc inside the cone where lateral forces
        of both signs stay achievable while levitating (the depth trades
        outward push, which grows with recess, against the inward pull
        left near the rim, which shrinks; the default keeps both above
        1e-10 N across the working disc for the reference object).  The
        per-electrode scale is set so the mean potential at surface_offset
        above each source is 1; surface_offset therefore doubles as the
        field-strength calibration of the surrogate (the default pins the
        hover equilibrium of the reference object at 100 um at the nominal
        drive amplitude).
        """
        sources, weights, scales = [], [], []
        up = np.array([0.0, 0.0, surface_offset])
        # cap the arc so adjacent electrodes keep a gap (matters for n > 4)
        half = min(np.deg2rad(arc_half_angle_deg), 0.78 * np.pi / n_electrodes)
        for i in range(n_electrodes):
            ang = 2.0 * np.pi * i / n_electrodes
            if sources_per_electrode > 1:
                angs = ang + np.linspace(-half, half, sources_per_electrode)
            else:
                angs = np.array([ang])
            pts = np.stack(
                [
                    tip_radius * np.cos(angs),
                    tip_radius * np.sin(angs),
                    np.full(len(angs), z),
                ],
                axis=1,
            )
            w = np.ones(len(pts))
            probe = pts + up
            d = np.linalg.norm(probe[:, None, :] - pts[None, :, :], axis=-1)
            pot = (w[None, :] / (FOUR_PI * d)).sum(axis=1)
            sources.append(pts)
            weights.append(w)
            scales.append(1.0 / pot.mean())
        return cls(sources, weights, np.array(scales), clearance=clearance)


def _electrode_derivs(
    basis: ElectrodeBasis, points: np.ndarray, max_order: int
) -> list[list[np.ndarray]]:
    """Per-electrode derivative tensors at a batch of points.

    Returns per electrode a list [phi, D1, ..., Dk]; each entry has leading
    batch shape (N,).  Values are real floats (sources are real); callers
    promote to complex when superposing phasors.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    basis.check_clearance(pts)
    out = []
    for s, w, scale in zip(basis.sources, basis.weights, basis.scales):
        rvec = pts[:, None, :] - s[None, :, :]  # (N, S, 3)
        tensors = _inv_r_derivs(rvec, max_order)
        coef = scale * w / FOUR_PI
        # weight-sum over the source axis
        per = [np.einsum("ns...,s->n...", t, coef) for t in tensors]
        out.append(per)
    return out


def basis_derivatives(
    basis: ElectrodeBasis, x: np.ndarray, max_order: int = 2
) -> list[FieldDerivatives]:
    """Unit-drive potential derivatives of every electrode at point x."""
    if not 1 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must be in 1..{MAX_ORDER}")
    x = np.asarray(x, dtype=float).reshape(3)
    per_el = _electrode_derivs(basis, x[None, :], max_order)
    fields = []
    for per in per_el:
        tensors = {
            k: per[k][0].astype(complex) for k in range(1, max_order + 1)
        }
        fields.append(
            FieldDerivatives(
                x=x.copy(),
                potential=complex(per[0][0]),
                tensors=tensors,
                max_order=max_order,
            )
        )
    return fields


def superpose(fields: list[FieldDerivatives], u: np.ndarray) -> FieldDerivatives:
    """Linear phasor combination sum_i u_i * fields[i]."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    if len(u) != len(fields):
        raise ValueError("drive vector length does not match basis size")
    base = fields[0]
    for f in fields[1:]:
        if f.max_order != base.max_order or not np.allclose(f.x, base.x):
            raise ValueError("superpose requires matching points and orders")
    tensors = {
        k: sum(ui * f.tensors[k] for ui, f in zip(u, fields))
        for k in range(1, base.max_order + 1)
    }
    pot = sum(ui * f.potential for ui, f in zip(u, fields))
    return FieldDerivatives(
        x=base.x.copy(), potential=pot, tensors=tensors, max_order=base.max_order
    )


def rotate_derivatives(f: FieldDerivatives, R: np.ndarray) -> FieldDerivatives:
    """Rotate all derivative tensors by R (applied to every index)."""
    R = np.asarray(R, dtype=float)
    tensors = {}
    for k, t in f.tensors.items():
        for axis in range(k):
            t = np.moveaxis(np.tensordot(R, t, axes=(1, axis)), 0, axis)
        tensors[k] = t
    return FieldDerivatives(
        x=f.x.copy(), potential=f.potential, tensors=tensors, max_order=f.max_order
    )
