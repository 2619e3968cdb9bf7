"""The metabelian de Rham period map: closed form against the free-algebra oracle.

``iota(h) = log(exp(-hB B) exp(h))`` removes the B-direction from the logarithm
``h`` of the transport.  The closed form builds ``h`` from the adjoint flat
section (iterated integrals of algebraic forms) and evaluates the BCH kernel
by explicit index shifts; the oracle takes the logarithm of the flat section in
the free algebra and projects it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from gmpy2 import mpq

from . import freealg as fa
from .curve import Chart, CurveFn, CurveParams
from .formal import ZLSeries, kernel_bch, value_to_json
from .kzb import KZBData, adjoint_flat_section, build_kzb, integral
from .metabelian import MetabElt, grouplike_log, grouplike_log_closed, metab_bch, sigma_keys

log = logging.getLogger(__name__)

CONVENTIONS = {
    "connection": "d - omega, flat sections solve dG = omega G",
    "iterated_integral": "dI(w1..wn) = w1 I(w2..wn), regularized to 0 at the basepoint",
    "gauge_action": "omega' = dg g^-1 + g omega g^-1",
    "f": "f = 2x^2/y sign fixed by holomorphy of df - beta at infinity (f ~ -1/z)",
    "bernoulli": "bernoulli(m) from T/(1 - exp(-T)); closed forms use (-1)^m bernoulli(m)",
    "kernel_T": "operative (1/U)(1 - E(V)/E(U+V)), E(c) = (e^c - 1)/c",
    "kernel_bch": "operative K(-V, U+V), K(a, b) = (1/b)(1 - E(a)/E(a+b))",
    "index_orientation": "G[r, s]: r = B-shift, s = A-shift; U = hA ad_A shifts s, V = hB ad_B shifts r",
    "tangential_basepoint": "d/dz at infinity (x = wp(z)), L = log z vanishes there",
}


@dataclass
class PeriodResult:
    A_coeff: ZLSeries
    B_coeff: object
    sigma: dict
    depth: int
    order: int
    chart: str
    method: str

    def element(self) -> MetabElt:
        return MetabElt.from_parts(self.depth, self.A_coeff, self.B_coeff, self.sigma)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, ZLSeries):
                return value_to_json(v.truncate(self.order))
            return value_to_json(v)

        return {
            "method": self.method,
            "chart": self.chart,
            "depth": self.depth,
            "order": self.order,
            "A": enc(self.A_coeff),
            "B": enc(self.B_coeff) if self.B_coeff else "0/1",
            "sigma": [
                {"r": r, "s": s, "value": enc(self.sigma[(r, s)])} for (r, s) in sigma_keys(self.depth) if (r, s) in self.sigma
            ],
        }


def _forms(data: KZBData, chart: Chart, M: int) -> tuple[ZLSeries, ZLSeries]:
    one = CurveFn.const(data.params, 1)
    beta = data.beta_prime if chart.is_tangential else CurveFn.x(data.params)
    return integral(one, chart, M), integral(beta, chart, M)


def g_series(data: KZBData, chart: Chart, N: int, M: int, method: str = "triangular") -> dict:
    """Coefficients ``g[r, s]`` of ``sigma[r, s]`` in the logarithm of the transport.

    ``triangular`` solves the exponential relation degree by degree;
    ``closed`` uses the Bernoulli-number closed form.
    """
    tangential = chart.is_tangential
    Gstar, G = adjoint_flat_section(data, chart, tangential, M, N + 1)
    hA, hB = Gstar[(0, 1)], Gstar[(1, 0)]
    if method == "triangular":
        g = grouplike_log(Gstar, G, hA, hB, depth=N)
    elif method == "closed":
        g = grouplike_log_closed(G, hA, hB, N)
    else:
        raise ValueError(f"unknown method {method!r}")
    return {k: v.truncate(M) for k, v in g.items()}


def iota_of(h: MetabElt) -> MetabElt:
    """``log(exp(-hB B) exp(h))``: zero B-coefficient, same A-coefficient."""
    return metab_bch(MetabElt(h.N, {"B": -h.cB}) if h.cB else MetabElt(h.N), h)


def _shift_apply(kernel, hA, hB, Z: dict, N: int) -> dict:
    """``sum k[i, j] (hA ad_A)^i (hB ad_B)^j`` on a sigma-combination ``Z``."""
    out: dict = {}
    for (r, s), z in Z.items():
        for i in range(N):
            for j in range(N - i):
                if r + j + s + i + 2 > N:
                    break
                k = kernel[(i, j)]
                if not k:
                    continue
                term = z * k
                for _ in range(i):
                    term = term * hA
                for _ in range(j):
                    term = term * hB
                key = (r + j, s + i)
                out[key] = out[key] + term if key in out else term
    return out


def period_map_rhs(params: CurveParams, chart: Chart, N: int, M: int) -> PeriodResult:
    """``hA A + sum g sigma - hB S(hA ad_A, hB ad_B)(-hA sigma00 + sum g[r,s] sigma[r+1,s])``."""
    data = build_kzb(params, N + 1)
    g = g_series(data, chart, N, M)
    hA, hB = _forms(data, chart, M)
    Z: dict = {(0, 0): -hA} if N >= 2 else {}
    for (r, s), v in g.items():
        if r + s + 3 <= N:
            Z[(r + 1, s)] = Z[(r + 1, s)] + v if (r + 1, s) in Z else v
    S = kernel_bch(N)
    corr = _shift_apply(S, hA, hB, Z, N)
    sigma = dict(g)
    for key, v in corr.items():
        term = -(hB * v)
        sigma[key] = sigma[key] + term if key in sigma else term
    sigma = {k: v.truncate(M) for k, v in sigma.items() if v.truncate(M)}
    return PeriodResult(hA.truncate(M), 0, sigma, N, M, chart.describe(), "closed")


def transport_log(params: CurveParams, chart: Chart, N: int, M: int) -> MetabElt:
    """Metabelian image of ``log G`` for the flat section ``G`` computed in the free algebra."""
    data = build_kzb(params, N)
    omega = data.omega_prime if chart.is_tangential else data.omega
    loc = fa.localize(omega, chart, M - 1)
    G = fa.flat_section(loc, logarithmic=chart.is_tangential, M=M)
    return fa.project_metab(fa.nc_log(G), N, check=False)


def period_map_oracle(params: CurveParams, chart: Chart, N: int, M: int) -> PeriodResult:
    h = transport_log(params, chart, N, M)
    iota = iota_of(h)
    sigma = {k: v.truncate(M) for k, v in iota.sigma.items() if v.truncate(M)}
    return PeriodResult(iota.cA.truncate(M), iota.cB, sigma, N, M, chart.describe(), "oracle")


@dataclass
class TheoremReport:
    chart: str
    depth: int
    order: int
    mismatches: list = field(default_factory=list)
    g_closed_mismatches: list = field(default_factory=list)
    B_zero: bool = True
    A_is_integral: bool = True

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.B_zero and self.A_is_integral

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "depth": self.depth,
            "order": self.order,
            "ok": self.ok,
            "mismatches": self.mismatches,
            "g_closed_form_mismatches": self.g_closed_mismatches,
            "B_zero": self.B_zero,
            "A_is_integral": self.A_is_integral,
            "conventions": CONVENTIONS,
        }


def diff_results(a: PeriodResult, b: PeriodResult) -> list:
    out = []
    M = min(a.order, b.order)
    pairs = [("A", a.A_coeff, b.A_coeff), ("B", a.B_coeff, b.B_coeff)]
    for key in sorted(set(a.sigma) | set(b.sigma)):
        pairs.append((f"sigma{key}", a.sigma.get(key, 0), b.sigma.get(key, 0)))
    for name, x, y in pairs:
        x = x.truncate(M) if isinstance(x, ZLSeries) else ZLSeries.constant(x, M)
        y = y.truncate(M) if isinstance(y, ZLSeries) else ZLSeries.constant(y, M)
        if x != y:
            first = next(((n, j) for (n, j), _ in sorted((x - y).items())), None)
            out.append({"coefficient": name, "first_difference": first})
    return out


def verify_theorems(params: CurveParams, chart: Chart, N: int, M: int) -> TheoremReport:
    rhs = period_map_rhs(params, chart, N, M)
    orc = period_map_oracle(params, chart, N, M)
    rep = TheoremReport(chart.describe(), N, M)
    rep.mismatches = diff_results(rhs, orc)
    rep.B_zero = not rhs.B_coeff and not orc.B_coeff
    data = build_kzb(params, N + 1)
    hA, _ = _forms(data, chart, M)
    rep.A_is_integral = rhs.A_coeff == hA and orc.A_coeff == hA
    tri = g_series(data, chart, N, M)
    clo = g_series(data, chart, N, M, method="closed")
    for key in sorted(set(tri) | set(clo)):
        x = tri.get(key, ZLSeries.constant(0, M))
        y = clo.get(key, ZLSeries.constant(0, M))
        if x != y:
            rep.g_closed_mismatches.append(key)
    for m in rep.mismatches:
        log.info("period map mismatch at %s", m)
    return rep
