"""Homogeneous degree-zero kernels and the sphere integrals built from them.

A kernel is stored through its angular profile, a vectorized function of unit
vectors.  Evaluating at ``x`` means evaluating the profile at ``x / |x|``.
The sphere carries the unnormalized surface measure (total ``2*pi`` on the
circle, ``4*pi`` on ``S^2``) so that the polar-coordinate identity
``int_{|y|<R} |Omega(y)|^s dy = R^n / n * ||Omega||_s^s`` holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

__all__ = [
    "Kernel",
    "SphereQuadrature",
    "DiniIntegral",
    "KERNEL_NAMES",
    "make_kernel",
    "kernel_eval",
    "sphere_quadrature",
    "sphere_norm",
    "ball_ls_integral",
    "dini_modulus",
    "dini_integral",
    "shell_shift_deviation",
]

KERNEL_NAMES = ("const", "cos", "cos2", "sgn-smooth", "bump")


@dataclass(frozen=True, eq=False)
class Kernel:
    """Degree-zero homogeneous function on R^n \\ {0}.

    ``profile`` maps an array of unit vectors with shape ``(..., n)`` to the
    kernel values with shape ``(...)``.  ``constant`` is set for kernels that
    are identically constant, which lets the operators take exact shortcuts.
    """

    n: int
    profile: Callable[[np.ndarray], np.ndarray]
    label: str
    params: dict = field(default_factory=dict)
    constant: float | None = None

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError(f"kernel dimension must be 2 or 3, got {self.n}")

    def __call__(self, x):
        """Vectorized evaluation at nonzero points ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected points in R^{self.n}, got shape {x.shape}")
        r = np.linalg.norm(x, axis=-1)
        if np.any(r == 0):
            raise ValueError("kernel is undefined at the origin")
        if self.constant is not None:
            return np.full(r.shape, float(self.constant))
        return np.asarray(self.profile(x / r[..., None]), dtype=float)

    def on_sphere(self, u):
        """Profile values at unit vectors ``u`` (no normalization)."""
        u = np.asarray(u, dtype=float)
        if self.constant is not None:
            return np.full(u.shape[:-1], float(self.constant))
        return np.asarray(self.profile(u), dtype=float)

    def reflected(self):
        """The kernel ``x -> Omega(-x)``."""
        prof = self.profile
        return Kernel(self.n, lambda u: prof(-u), self.label + "~", dict(self.params),
                      self.constant)

    def absolute(self):
        """The kernel ``x -> |Omega(x)|``."""
        prof = self.profile
        const = None if self.constant is None else abs(self.constant)
        return Kernel(self.n, lambda u: np.abs(prof(u)), "|" + self.label + "|",
                      dict(self.params), const)


def make_kernel(name, n=2, **params):
    """Build a kernel from the named zoo.

    ``const`` (``value``), ``cos`` (first coordinate of ``x'``), ``cos2``
    (``x_1'^2 - x_2'^2``, i.e. ``cos 2theta`` in the plane), ``sgn-smooth``
    (``tanh(x_1' / eps)``) and ``bump`` (``exp(-|x' - e|^2 / width^2)`` around
    the direction ``e``).
    """
    if name == "const":
        value = float(params.get("value", 1.0))
        return Kernel(n, lambda u: np.full(u.shape[:-1], value), "const",
                      {"value": value}, constant=value)
    if name == "cos":
        return Kernel(n, lambda u: u[..., 0], "cos", {})
    if name == "cos2":
        return Kernel(n, lambda u: u[..., 0] ** 2 - u[..., 1] ** 2, "cos2", {})
    if name == "sgn-smooth":
        eps = float(params.get("eps", 0.2))
        if eps <= 0:
            raise ValueError("sgn-smooth needs eps > 0")
        return Kernel(n, lambda u: np.tanh(u[..., 0] / eps), "sgn-smooth", {"eps": eps})
    if name == "bump":
        width = float(params.get("width", 0.5))
        direction = np.asarray(params.get("direction", [1.0] + [0.0] * (n - 1)), float)
        direction = direction / np.linalg.norm(direction)

        def prof(u):
            return np.exp(-np.sum((u - direction) ** 2, axis=-1) / width**2)

        return Kernel(n, prof, "bump", {"width": width, "direction": direction.tolist()})
    raise ValueError(f"unknown kernel {name!r}; choose from {', '.join(KERNEL_NAMES)}")


def kernel_eval(kernel, x):
    """Value of the kernel at a single nonzero point."""
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("kernel_eval: x must be nonzero")
    return float(kernel(x))


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    n: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def total_measure(self):
        return float(self.weights.sum())

    def integrate(self, values):
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=None)
def sphere_quadrature(n, size=None):
    """Positive-weight quadrature on S^{n-1}.

    The circle uses the trapezoid rule on ``size`` equispaced angles (default
    2048).  The 2-sphere uses a Gauss-Legendre rule in ``cos(theta)`` times the
    trapezoid rule in the azimuth, ``size`` Legendre nodes (default 100, giving
    20000 nodes).
    """
    if n == 2:
        m = 2048 if size is None else int(size)
        t = 2 * np.pi * np.arange(m) / m
        nodes = np.stack([np.cos(t), np.sin(t)], axis=-1)
        weights = np.full(m, 2 * np.pi / m)
    elif n == 3:
        m = 100 if size is None else int(size)
        x, w = np.polynomial.legendre.leggauss(m)
        k = 2 * m
        phi = 2 * np.pi * np.arange(k) / k
        st = np.sqrt(1 - x**2)
        nodes = np.stack(
            [np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)),
             np.outer(x, np.ones(k))],
            axis=-1,
        ).reshape(-1, 3)
        weights = np.outer(w, np.full(k, 2 * np.pi / k)).ravel()
    else:
        raise ValueError("sphere quadrature is implemented for n = 2, 3")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereQuadrature(n, nodes, weights)


def _check_exponent(s, allow_inf=True):
    if s == np.inf and allow_inf:
        return
    if not np.isfinite(s) or s < 1:
        raise ValueError(f"exponent s must be >= 1, got {s}")


def sphere_norm(kernel, s, quad=None):
    """``||Omega||_{L^s(S^{n-1})}``; for ``s = inf`` the max over the nodes."""
    _check_exponent(s)
    quad = sphere_quadrature(kernel.n) if quad is None else quad
    vals = np.abs(kernel.on_sphere(quad.nodes))
    if s == np.inf:
        return float(vals.max())
    return quad.integrate(vals**s) ** (1.0 / s)


def ball_ls_integral(kernel, s, R, quad=None, radial_nodes=32):
    """``(int_{|y|<R} |Omega(y)|^s dy)^(1/s)`` by a polar product rule.

    The kernel is evaluated at the actual points ``rho * theta`` rather than on
    the sphere, so the result exercises homogeneity.
    """
    _check_exponent(s, allow_inf=False)
    if not R > 0:
        raise ValueError("R must be positive")
    quad = sphere_quadrature(kernel.n) if quad is None else quad
    n = kernel.n
    t, w = np.polynomial.legendre.leggauss(radial_nodes)
    rho = 0.5 * R * (t + 1)
    wr = 0.5 * R * w * rho ** (n - 1)
    pts = rho[:, None, None] * quad.nodes[None, :, :]
    vals = np.abs(kernel(pts)) ** s
    total = float(np.einsum("i,j,ij->", wr, quad.weights, vals))
    return total ** (1.0 / s)


def _rotations(n, delta, angles, axes):
    """Rotations with operator distance ``2 sin(t/2) <= delta``."""
    delta = min(float(delta), 2.0)
    tmax = 2 * np.arcsin(delta / 2)
    if n == 2:
        t = tmax * np.arange(1, angles + 1) / angles
        c, s = np.cos(t), np.sin(t)
        return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    # Fibonacci axes, Rodrigues formula
    k = np.arange(axes) + 0.5
    z = 1 - 2 * k / axes
    ph = np.pi * (1 + 5**0.5) * k
    rr = np.sqrt(1 - z**2)
    ax = np.stack([rr * np.cos(ph), rr * np.sin(ph), z], -1)
    t = tmax * np.arange(1, angles + 1) / angles
    K = np.zeros((axes, 3, 3))
    K[:, 0, 1], K[:, 0, 2] = -ax[:, 2], ax[:, 1]
    K[:, 1, 0], K[:, 1, 2] = ax[:, 2], -ax[:, 0]
    K[:, 2, 0], K[:, 2, 1] = -ax[:, 1], ax[:, 0]
    K2 = K @ K
    st, ct = np.sin(t), 1 - np.cos(t)
    R = (np.eye(3)[None, None] + st[None, :, None, None] * K[:, None]
         + ct[None, :, None, None] * K2[:, None])
    return R.reshape(-1, 3, 3)


def dini_modulus(kernel, delta, s, quad=None, angles=None, axes=64):
    """Integral modulus of continuity ``omega_s(delta)`` over sampled rotations.

    The sup runs over rotations by angle ``t`` with ``2 sin(t/2) <= delta``:
    512 angles in the plane, ``axes`` x 64 axis-angle pairs in space.  The
    result is a lower bound of the true sup.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    _check_exponent(s)
    if kernel.constant is not None:
        return 0.0
    if quad is None:
        return _default_modulus(kernel, float(delta), float(s), angles, axes)
    return _modulus(kernel, delta, s, quad, angles, axes)


@lru_cache(maxsize=1024)
def _default_modulus(kernel, delta, s, angles, axes):
    # kernels hash by identity, so this only reuses values for the same object
    quad = sphere_quadrature(2) if kernel.n == 2 else sphere_quadrature(3, 24)
    return _modulus(kernel, delta, s, quad, angles, axes)


def _modulus(kernel, delta, s, quad, angles, axes):
    n = kernel.n
    if angles is None:
        angles = 512 if n == 2 else 64
    base = kernel.on_sphere(quad.nodes)
    best = 0.0
    rots = _rotations(n, delta, angles, axes)
    for chunk in np.array_split(rots, max(1, len(rots) // 64)):
        moved = np.einsum("rij,qj->rqi", chunk, quad.nodes)
        diff = np.abs(kernel.on_sphere(moved) - base[None, :])
        if s == np.inf:
            val = diff.max()
        else:
            val = np.max((diff**s @ quad.weights) ** (1.0 / s))
        best = max(best, float(val))
    return best


def _integrate_over_delta(deltas, omegas):
    """``int omega(d)/d dd`` for piecewise-linear omega, integrated exactly."""
    d0, d1 = deltas[:-1], deltas[1:]
    w0, w1 = omegas[:-1], omegas[1:]
    slope = (w1 - w0) / (d1 - d0)
    icept = w0 - slope * d0
    return float(np.sum(icept * np.log(d1 / d0) + slope * (d1 - d0)))


@dataclass(frozen=True)
class DiniIntegral:
    partial: float
    tail: float
    exponent: float
    divergent: bool

    @property
    def value(self):
        return self.partial + self.tail

    @property
    def finite(self):
        return not self.divergent and np.isfinite(self.value)


def dini_integral(kernel, s, delta_min=1e-4, points=41, **modulus_kw):
    """``int_0^1 omega_s(delta)/delta d delta`` with a power-law tail below ``delta_min``.

    The modulus is sampled on a log grid, made monotone by a running max and
    integrated exactly as a piecewise-linear function.  The tail assumes
    ``omega ~ C delta^gamma`` fitted on the five smallest samples; ``gamma <= 0``
    flags divergence.
    """
    deltas = np.geomspace(delta_min, 1.0, points)
    om = np.array([dini_modulus(kernel, d, s, **modulus_kw) for d in deltas])
    om = np.maximum.accumulate(om)
    partial = _integrate_over_delta(deltas, om)
    head = om[:5]
    if np.all(head == 0):
        return DiniIntegral(partial, 0.0, np.inf, False)
    if np.any(head <= 0):
        return DiniIntegral(partial, np.inf, 0.0, True)
    gamma, logc = np.polyfit(np.log(deltas[:5]), np.log(head), 1)
    if gamma <= 0:
        return DiniIntegral(partial, np.inf, float(gamma), True)
    tail = float(np.exp(logc) * delta_min**gamma / gamma)
    return DiniIntegral(partial, tail, float(gamma), False)


def shell_shift_deviation(kernel, alpha, R, x, s, quad=None, radial_nodes=48,
                          modulus_points=9, **modulus_kw):
    """Kernel-shift deviation on the shell ``R <= |z| < 2R`` and its predicted shape.

    Returns ``(lhs, rhs_shape)`` where ``lhs`` is the ``L^s`` norm over the
    shell of ``Omega(z-x)|z-x|^(alpha-n) - Omega(z)|z|^(alpha-n)`` and
    ``rhs_shape = R^(n/s-(n-alpha)) * (|x|/R + int_{|x|/2R}^{|x|/R} omega_s/delta)``.
    """
    n = kernel.n
    x = np.asarray(x, dtype=float)
    if not 0 < alpha < n:
        raise ValueError("alpha must lie in (0, n)")
    if not R > 0:
        raise ValueError("R must be positive")
    ax = float(np.linalg.norm(x))
    if ax >= R / 2:
        raise ValueError("shift must satisfy |x| < R/2")
    if ax == 0:
        raise ValueError("shift must be nonzero")
    _check_exponent(s)
    quad = sphere_quadrature(n) if quad is None else quad
    t, w = np.polynomial.legendre.leggauss(radial_nodes)
    rho = R * (1.5 + 0.5 * t)
    wr = 0.5 * R * w * rho ** (n - 1)
    z = rho[:, None, None] * quad.nodes[None]
    zx = z - x
    k1 = kernel(zx) * np.linalg.norm(zx, axis=-1) ** (alpha - n)
    k0 = kernel.on_sphere(np.broadcast_to(quad.nodes, z.shape)) * rho[:, None] ** (alpha - n)
    diff = np.abs(k1 - k0)
    if s == np.inf:
        lhs = float(diff.max())
        scale = R ** (-(n - alpha))
    else:
        lhs = float(np.einsum("i,j,ij->", wr, quad.weights, diff**s)) ** (1.0 / s)
        scale = R ** (n / s - (n - alpha))
    ds = np.geomspace(ax / (2 * R), ax / R, modulus_points)
    om = np.maximum.accumulate([dini_modulus(kernel, d, s, **modulus_kw) for d in ds])
    rhs = scale * (ax / R + _integrate_over_delta(ds, np.asarray(om)))
    return lhs, rhs
