"""The singular integral of r1 x1 y1 + r2 x2 y2 + r3 x3 y3 = 0 over dyadic boxes.

For one pair (x, y) ranging over X/2 < |x| <= X, Y/2 < |y| <= Y,

    F(r, X, Y; alpha) = int e(alpha r x y) d(x, y)
                      = 2 (Si(a/2) - 2 Si(a) + Si(2a)) / (pi alpha r),   a = pi alpha r X Y,

and the singular integral is int_R F1 F2 F3 d alpha. It is computed on a
finite alpha-range by Gauss-Legendre panels, with an explicit tail bound from
|F| <= 12 / (pi^2 r^2 alpha^2 X Y). A two-dimensional Mellin representation
over Re s = Re t = 1/3 serves as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvariantError, QuadratureError
from .localdata import CoeffTriple
from .specfun import dilog, log_kernel_K, sici

CUBED_SINE_TAIL_CLOSED = math.pi * (math.pi**2 - 3 + 24 * math.log(2)) / 8


@dataclass(frozen=True)
class BoxSpec:
    X: tuple[float, float, float]
    Y: tuple[float, float, float]

    def __post_init__(self) -> None:
        if len(self.X) != 3 or len(self.Y) != 3:
            raise InvariantError("box sides must be triples")
        if min(self.X) < 1 or min(self.Y) < 1:
            raise InvariantError("box sides must be at least 1")

    @classmethod
    def cube(cls, W: float) -> "BoxSpec":
        return cls((W, W, W), (W, W, W))

    def products(self) -> tuple[float, float, float]:
        return tuple(x * y for x, y in zip(self.X, self.Y))  # type: ignore[return-value]

    def permuted(self, perm) -> "BoxSpec":
        return BoxSpec(tuple(self.X[i] for i in perm), tuple(self.Y[i] for i in perm))  # type: ignore[arg-type]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 6
    # upper end of the alpha-range; None picks it from the tail bound
    alpha_cutoff: float | None = None
    nodes_per_panel: int = 12

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise InvariantError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise InvariantError("max_subdivisions must be positive")


# --- box Fourier factor -----------------------------------------------------------


def box_fourier_factor(r: float, X: float, Y: float, alpha):
    """Fourier transform of the dyadic box at alpha*r; even in alpha, equal to XY at 0."""
    al = np.asarray(alpha, dtype=float)
    scalar = al.ndim == 0
    al = np.atleast_1d(al)
    a = math.pi * r * X * Y * np.abs(al)
    out = np.full(al.shape, float(X * Y))
    tiny = a < 1e-4
    # Si(t) = t - t^3/18 + O(t^5) gives F = XY (1 - (49/72) a^2 + O(a^4))
    at = a[tiny]
    out[tiny] = X * Y * (1 - 49 / 72 * at**2)
    big = ~tiny
    if big.any():
        ab = a[big]
        si = sici(np.concatenate([ab / 2, ab, 2 * ab]))[0]
        n = ab.size
        bracket = si[:n] - 2 * si[n : 2 * n] + si[2 * n :]
        out[big] = 2 * bracket / (math.pi * np.abs(al[big]) * r)
    return float(out[0]) if scalar else out


def box_fourier_envelope(r: float, X: float, Y: float, alpha: float) -> float:
    """min(XY, 1/(r|alpha|)): the simple envelope of the box factor."""
    if alpha == 0:
        return float(X * Y)
    return min(X * Y, 1.0 / (r * abs(alpha)))


def box_fourier_decay_constant(r: float, X: float, Y: float) -> float:
    """c with |F(r, X, Y; alpha)| <= c / alpha^2 for all alpha != 0."""
    return 12.0 / (math.pi**2 * r * r * X * Y)


# --- singular integral --------------------------------------------------------------


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    tail_bound: float
    l1_norm: float
    cutoff: float
    nodes: int
    tolerance: float

    @property
    def total_error(self) -> float:
        return self.error_estimate + self.tail_bound

    @property
    def converged(self) -> bool:
        return self.total_error <= self.tolerance


def _gl_panels(a: float, b: float, width: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    m = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, m + 1)
    x, w = np.polynomial.legendre.leggauss(n)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * x[None, :]).ravel(), (half * w[None, :]).ravel()


def _product_integrand(r: CoeffTriple, box: BoxSpec, alpha: np.ndarray) -> np.ndarray:
    out = np.ones_like(alpha)
    for rj, Xj, Yj in zip(r.as_tuple(), box.X, box.Y):
        out *= box_fourier_factor(rj, Xj, Yj, alpha)
    return out


def singular_integral(r, box: BoxSpec, q: QuadratureSpec | None = None) -> IntegralResult:
    """int_R prod_j F(r_j, X_j, Y_j; alpha) d alpha.

    Integrates 2 * int_0^A by Gauss-Legendre panels, each about one period of
    the fastest oscillation wide, doubling the node count until two successive
    values agree. The tail beyond A is bounded by 2 prod c_j A^-5 / 5.
    """
    r = CoeffTriple.of(r)
    q = q or QuadratureSpec()
    rxy = [rj * p for rj, p in zip(r.as_tuple(), box.products())]
    cs = [box_fourier_decay_constant(rj, Xj, Yj) for rj, Xj, Yj in zip(r.as_tuple(), box.X, box.Y)]
    c_prod = cs[0] * cs[1] * cs[2]
    width = 1.0 / sum(rxy)
    alpha0 = 10.0 / min(rxy)

    # coarse pass for the scale of the answer
    x0, w0 = _gl_panels(0.0, alpha0, width, q.nodes_per_panel)
    f0 = _product_integrand(r, box, x0)
    scale = 2 * float(np.sum(np.abs(f0) * w0))
    target = max(q.abs_tol, q.rel_tol * scale)

    if q.alpha_cutoff is not None:
        A = q.alpha_cutoff
    else:
        A = max(alpha0, (2 * c_prod / (5 * 0.1 * target)) ** 0.2)
    tail = 2 * c_prod * A**-5 / 5

    prev = None
    n = q.nodes_per_panel
    for _ in range(q.max_subdivisions):
        xs, ws = _gl_panels(0.0, A, width, n)
        fx = _product_integrand(r, box, xs)
        value = 2 * float(np.sum(fx * ws))
        l1 = 2 * float(np.sum(np.abs(fx) * ws)) + tail
        tol = max(q.abs_tol, q.rel_tol * l1)
        if prev is not None:
            err = abs(value - prev)
            if err + tail <= tol:
                return IntegralResult(value, err, tail, l1, A, xs.size, tol)
        prev = value
        n *= 2
    raise QuadratureError(f"singular integral did not converge for r={r.as_tuple()}, box={box}", partial=prev)


def is_degenerate_box(r, box: BoxSpec) -> bool:
    """Some r_k X_k Y_k is at least ten times the sum of the other two."""
    r = CoeffTriple.of(r)
    v = [rj * p for rj, p in zip(r.as_tuple(), box.products())]
    return any(10 * (sum(v) - v[k]) <= v[k] for k in range(3))


def singular_integral_bound(r, box: BoxSpec) -> float:
    """(X1 X2 X3 Y1 Y2 Y3)^(2/3) / (r1 r2 r3)^(1/3)."""
    r = CoeffTriple.of(r)
    P = box.products()
    return (P[0] * P[1] * P[2]) ** (2 / 3) / (r.r1 * r.r2 * r.r3) ** (1 / 3)


# --- Mellin cross-check ---------------------------------------------------------------


@dataclass
class MellinReport:
    r: tuple[int, int, int]
    box: BoxSpec
    mellin_value: float
    alpha_value: float
    rel_diff: float
    mellin_error_estimate: float
    imaginary_part: float


def mellin_integral(
    r, box: BoxSpec, half_width: float = 10.0, panels: int = 128, nodes: int = 16, chunk: int = 256
) -> tuple[complex, float]:
    """(64/pi) int int ... K(s) K(t) K(1-s-t) ds dt / (2 pi i)^2 on Re s = Re t = 1/3.

    With s = 1/3 + i sinh(w1), t = 1/3 + i sinh(w2) the modulus of the
    integrand decays like exp(-7|w|/6) in each direction, so a square
    [-W, W]^2 of Gauss-Legendre panels suffices. Returns the value and the
    change from halving the panel count as an error estimate.
    """
    r = CoeffTriple.of(r)
    P1, P2, P3 = box.products()
    L1 = math.log(P3 * r.r3 / (P1 * r.r1))
    L2 = math.log(P3 * r.r3 / (P2 * r.r2))
    pre = 64 / math.pi * P1 * P2 / r.r3 / (4 * math.pi**2)

    def run(npan: int) -> complex:
        w, wt = _gl_panels(-half_width, half_width, 2 * half_width / npan, nodes)
        u = np.sinh(w)
        jac = np.cosh(w) * wt
        s = 1 / 3 + 1j * u
        ks = log_kernel_K(s)
        col = ks + s * L2
        total = 0j
        for i in range(0, u.size, chunk):
            U = u[i : i + chunk, None]
            third = log_kernel_K((1 / 3 - 1j * (U + u[None, :])).ravel()).reshape(U.shape[0], u.size)
            logs = (ks[i : i + chunk] + s[i : i + chunk] * L1)[:, None] + col[None, :] + third
            total += complex((np.exp(logs) * jac[i : i + chunk, None] * jac[None, :]).sum())
        return pre * total

    fine = run(panels)
    coarse = run(panels // 2)
    return fine, abs(fine - coarse)


def mellin_crosscheck(r, box: BoxSpec, q: QuadratureSpec | None = None) -> MellinReport:
    if max(box.X) > 16 or max(box.Y) > 16:
        raise InvariantError("Mellin cross-check is limited to sides <= 16")
    r = CoeffTriple.of(r)
    m, err = mellin_integral(r, box)
    a = singular_integral(r, box, q).value
    return MellinReport(r.as_tuple(), box, m.real, a, abs(m.real - a) / abs(a), err, m.imag)


# --- cube of the sine tail ------------------------------------------------------------------


def sine_tail(y):
    """g(y) = int_y^inf sin t / t^2 dt = sin(y)/y - Ci(y), for y > 0."""
    if np.any(np.asarray(y) <= 0):
        raise InvariantError("g(y) needs y > 0")
    si, ci = sici(y)
    return np.sin(y) / y - ci


@dataclass
class CubedSineTailReport:
    value: float
    closed_form: float
    abs_diff: float
    error_estimate: float
    tail_bound: float


def cubed_sine_tail_check(q: QuadratureSpec | None = None, upper: float = 200.0) -> CubedSineTailReport:
    """int_0^inf g(y)^3 dy against pi (pi^2 - 3 + 24 log 2) / 8.

    (0, 1]: y = exp(-u) removes the logarithmic endpoint. [1, upper]: adaptive
    quadrature on pieces of length pi. Tail: |g(y)| <= 2/y^2 gives 8/(5 upper^5).
    """
    q = q or QuadratureSpec()
    eps = min(q.abs_tol, 1e-12)

    def near_zero(u: float) -> float:
        # g(y) = 1 - gamma - log y + O(y^2), and g^3 y decays like u^3 e^-u
        y = math.exp(-u)
        return float(sine_tail(y)) ** 3 * y

    v0, e0 = integrate.quad(near_zero, 0, 60.0, epsabs=eps, epsrel=eps, limit=200)
    # the remaining piece is below int_60^inf (u + 1)^3 e^-u du < 1e-20
    edges = np.arange(1.0, upper + math.pi, math.pi)
    edges[-1] = upper
    v1 = 0.0
    e1 = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(lambda y: float(sine_tail(y)) ** 3, a, b, epsabs=eps, epsrel=eps, limit=100)
        v1 += val
        e1 += err
    tail = 8 / (5 * upper**5)
    value = v0 + v1
    return CubedSineTailReport(value, CUBED_SINE_TAIL_CLOSED, abs(value - CUBED_SINE_TAIL_CLOSED), e0 + e1, tail)


def dilog_identities() -> dict[str, float]:
    """Residuals of the dilogarithm identities behind the cubed sine-tail closed form."""
    l2, l3 = math.log(2), math.log(3)
    return {
        "li2(-1)": dilog(-1.0) + math.pi**2 / 12,
        "li2(1/2)": dilog(0.5) - (math.pi**2 / 12 - l2**2 / 2),
        "2li2(-2)+li2(-3)": 2 * dilog(-2.0) + dilog(-3.0) + math.pi**2 / 3 + 2 * l2 * l3,
    }

