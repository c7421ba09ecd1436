"""Invariant verification suites.

Every numerical law the package promises is re-checked here against an
independent route: closed forms, brute-force index loops, analytic
oracles, or a second formula for the same quantity.  Checks are
deterministic given the seed; each one reports its worst observed
deviation next to the tolerance it was held to.

The suites are grouped by subsystem ('tensor_core', 'symbol', 'flow',
'cli') and surfaced through the `xcflow verify` command, which exits
nonzero if anything fails.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.stats import special_ortho_group

from . import curvature as cv
from . import flow as fl
from . import symbol as sb

DEFAULT_SEED = 1729


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    cases: int
    detail: str
    elapsed: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.suite}/{self.name}: {self.detail} "
                f"({self.cases} cases, {self.elapsed:.2f}s)")


@dataclass
class VerifySummary:
    seed: int
    results: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "all_passed": self.all_passed,
            "n_checks": len(self.results),
            "n_failed": sum(not r.passed for r in self.results),
            "checks": [
                {
                    "suite": r.suite,
                    "name": r.name,
                    "passed": r.passed,
                    "cases": r.cases,
                    "detail": r.detail,
                    "elapsed_s": round(r.elapsed, 4),
                }
                for r in self.results
            ],
        }


_REGISTRY: list[tuple[str, str, object, int]] = []


def _check(suite: str, name: str, default_cases: int = 1):
    def wrap(fn):
        _REGISTRY.append((suite, name, fn, default_cases))
        return fn
    return wrap


def available_suites() -> list[str]:
    seen = []
    for suite, _, _, _ in _REGISTRY:
        if suite not in seen:
            seen.append(suite)
    return seen


def run_checks(suites=None, cases: int | None = None,
               seed: int = DEFAULT_SEED) -> VerifySummary:
    """Run the registered checks (optionally restricted to some suites)."""
    summary = VerifySummary(seed=seed)
    for idx, (suite, name, fn, default_cases) in enumerate(_REGISTRY):
        if suites and suite not in suites:
            continue
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(idx,)))
        n = cases if cases is not None else default_cases
        start = time.perf_counter()
        try:
            passed, detail = fn(rng, n)
        except Exception as exc:  # a crash is a failure, not an abort
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        summary.results.append(
            CheckResult(suite, name, passed, n, detail, time.perf_counter() - start))
    return summary


# ---------------------------------------------------------------------------
# helpers

def _random_rotation(rng) -> np.ndarray:
    return special_ortho_group.rvs(3, random_state=rng)


def _random_spd(rng, scale: float = 1.0) -> cv.SymTensor3:
    m = rng.uniform(-1.0, 1.0, (3, 3))
    return cv.SymTensor3.from_matrix(scale * (m @ m.T + 0.5 * np.eye(3)))


def _random_frame(rng) -> np.ndarray:
    while True:
        abc = rng.uniform(-5.0, 5.0, 3)
        if abs(abc.prod()) > 1e-6:
            return abc


def _frame_data(rng, abc) -> tuple[cv.Riemann3, cv.SymTensor3]:
    q = _random_rotation(rng)
    return cv.Riemann3.from_frame(*abc, rotation=q), cv.SymTensor3.identity()


def _gen_eigs(t: cv.SymTensor3, g: cv.SymTensor3) -> np.ndarray:
    gm = g.matrix
    if t.variance == "lower":
        return scipy.linalg.eigvalsh(t.matrix, gm)
    return scipy.linalg.eigvalsh(gm @ t.matrix @ gm, gm)


def _verdict(max_dev: float, tol: float, label: str = "max dev") -> tuple[bool, str]:
    return max_dev <= tol, f"{label} {max_dev:.3e} (tol {tol:.1e})"


# ---------------------------------------------------------------------------
# tensor_core suite

@_check("tensor_core", "mu_contraction_identity", default_cases=50)
def _mu_contraction(rng, cases):
    worst = 0.0
    for _ in range(cases):
        g = _random_spd(rng, scale=float(rng.uniform(0.2, 3.0)))
        mu_lo, mu_up = cv.volume_form(g)
        contracted = np.einsum("ijk,lmk->ijlm", mu_lo, mu_up)
        eye = np.eye(3)
        expected = np.einsum("il,jm->ijlm", eye, eye) - np.einsum("im,jl->ijlm", eye, eye)
        for i in range(3):
            for j in range(3):
                for l in range(3):
                    for m in range(3):
                        worst = max(worst, abs(contracted[i, j, l, m] - expected[i, j, l, m]))
    return _verdict(worst, 1e-12)


@_check("tensor_core", "volume_form_raising", default_cases=50)
def _volume_raising(rng, cases):
    worst = 0.0
    for _ in range(cases):
        g = _random_spd(rng)
        mu_lo, mu_up = cv.volume_form(g)
        ginv = np.linalg.inv(g.matrix)
        raised = np.einsum("ip,jq,kr,pqr->ijk", ginv, ginv, ginv, mu_lo)
        worst = max(worst, float(np.abs(raised - mu_up).max()))
    return _verdict(worst, 1e-12)


@_check("tensor_core", "cross_curvature_triple_agreement", default_cases=1000)
def _triple_agreement(rng, cases):
    worst = 0.0
    skipped = 0
    for _ in range(cases):
        riem, g = _frame_data(rng, _random_frame(rng))
        forms = cv.cross_curvature_forms(riem, g)
        if forms.determinant_singular:
            skipped += 1
        worst = max(worst, forms.max_pairwise_dev)
    ok, detail = _verdict(worst, 1e-10, "max pairwise rel dev")
    if skipped:
        detail += f", determinant form skipped {skipped}x"
    return ok, detail


@_check("tensor_core", "cross_curvature_eigenvalue_law", default_cases=1000)
def _h_eigenvalue_law(rng, cases):
    worst = 0.0
    for _ in range(cases):
        abc = _random_frame(rng)
        riem, g = _frame_data(rng, abc)
        h = cv.cross_curvature(riem, g)
        expected = np.sort([abc[1] * abc[2], abc[0] * abc[2], abc[0] * abc[1]])
        got = np.sort(_gen_eigs(h, g))
        scale = max(np.abs(expected).max(), 1.0)
        worst = max(worst, float(np.abs(got - expected).max() / scale))
    return _verdict(worst, 1e-10)


@_check("tensor_core", "ricci_eigenvalue_law", default_cases=1000)
def _ricci_eigenvalue_law(rng, cases):
    worst = 0.0
    for _ in range(cases):
        abc = _random_frame(rng)
        riem, g = _frame_data(rng, abc)
        ric, scalar = cv.ricci(riem, g)
        a, b, c = abc
        expected = np.sort([b + c, a + c, a + b])
        got = np.sort(_gen_eigs(ric, g))
        scale = max(np.abs(expected).max(), 1.0)
        worst = max(worst, float(np.abs(got - expected).max() / scale))
        worst = max(worst, abs(scalar - 2.0 * (a + b + c)) / max(abs(scalar), 1.0))
    return _verdict(worst, 1e-10)


@_check("tensor_core", "cross_curvature_homogeneity", default_cases=200)
def _homogeneity(rng, cases):
    worst = 0.0
    for _ in range(cases):
        kappa = float(rng.uniform(0.05, 2.0) * rng.choice([-1.0, 1.0]))
        g = _random_spd(rng)
        s = float(rng.uniform(0.1, 10.0))
        h1 = cv.cross_curvature(cv.Riemann3.space_form(kappa, g), g).matrix
        g2 = cv.SymTensor3(s * g.components)
        h2 = cv.cross_curvature(cv.Riemann3.space_form(kappa / s, g2), g2).matrix
        scale = max(np.abs(h1).max(), 1e-300)
        worst = max(worst, float(np.abs(h2 - h1 / s).max() / scale))
    return _verdict(worst, 1e-9, "max rel dev of h(s g) vs h(g)/s")


@_check("tensor_core", "positive_definite_propagation", default_cases=300)
def _positivity(rng, cases):
    worst = np.inf
    for _ in range(cases):
        abc = rng.uniform(0.01, 5.0, 3)
        riem, g = _frame_data(rng, abc)
        p = cv.einstein_raised(riem, g)
        h = cv.cross_curvature(riem, g)
        worst = min(worst, float(_gen_eigs(p, g).min()), float(_gen_eigs(h, g).min()))
    ok = worst > 0.0
    return ok, f"min generalized eigenvalue {worst:.3e} (must be > 0)"


@_check("tensor_core", "eigen_frame_reconstruction", default_cases=200)
def _eigen_frame_rebuild(rng, cases):
    worst = 0.0
    for _ in range(cases):
        p = cv.SymTensor3(_random_spd(rng).components, "upper")
        g = _random_spd(rng)
        frame, vecs = cv.eigen_frame(p, g)
        rebuilt = (vecs * frame.as_array()) @ vecs.T
        scale = max(np.abs(p.matrix).max(), 1.0)
        worst = max(worst, float(np.abs(rebuilt - p.matrix).max() / scale))
        gram = vecs.T @ g.matrix @ vecs
        worst = max(worst, float(np.abs(gram - np.eye(3)).max()))
    return _verdict(worst, 1e-10)


@_check("tensor_core", "chart_jet_scalar_curvature", default_cases=20)
def _chart_jet_fd(rng, cases):
    errs = {1e-3: [], 5e-4: []}
    points = [(float(rng.choice([1.0, -1.0])), rng.uniform(-0.9, 0.9, 3))
              for _ in range(cases)]
    for step in errs:
        for kappa, x in points:
            jet = cv.jet_from_function(cv.space_form_chart(kappa), x, step=step)
            _, scalar = cv.ricci(cv.riemann(jet), jet.g)
            errs[step].append(abs(scalar - 6.0 * kappa))
    coarse, fine = max(errs[1e-3]), max(errs[5e-4])
    ratio = coarse / fine
    ok = coarse < 1e-5 and 2.0 <= ratio <= 8.0
    return ok, (f"max |R - 6 kappa| {coarse:.3e} at step 1e-3 (tol 1e-5), "
                f"improvement x{ratio:.2f} at 5e-4 (need 2..8)")


# ---------------------------------------------------------------------------
# symbol suite

@_check("symbol", "spectrum_closed_form", default_cases=1000)
def _spectrum_closed_form(rng, cases):
    e1 = np.array([1.0, 0.0, 0.0])
    worst = 0.0
    for _ in range(cases):
        m = rng.uniform(-5.0, 5.0, (3, 3))
        p = cv.SymTensor3.from_matrix(0.5 * (m + m.T), "upper")
        rho = float(rng.uniform(-2.0, 2.0))
        p11 = p.components[0]
        raw = sb.spectrum(sb.symbol_raw(p, rho, e1))
        expect_raw = np.sort([0.0, 0.0, 0.0, p11, p11, p11 - 4.0 * rho])
        mod = sb.spectrum(sb.symbol_modified(p, rho, e1))
        expect_mod = np.sort([1.0, 1.0, 1.0, p11, p11, p11 - 4.0 * rho])
        worst = max(worst,
                    float(np.abs(raw - expect_raw).max()),
                    float(np.abs(mod - expect_mod).max()))
    return _verdict(worst, 1e-9)


@_check("symbol", "matrix_entrywise_form", default_cases=200)
def _matrix_entrywise(rng, cases):
    e1 = np.array([1.0, 0.0, 0.0])
    worst = 0.0
    for _ in range(cases):
        m = rng.uniform(-5.0, 5.0, (3, 3))
        pm = 0.5 * (m + m.T)
        p = cv.SymTensor3.from_matrix(pm, "upper")
        rho = float(rng.uniform(-2.0, 2.0))
        expected = np.zeros((6, 6))
        expected[0, 3:] = [pm[1, 1] - 2 * rho, pm[2, 2] - 2 * rho, 2 * pm[1, 2]]
        expected[1, 3], expected[1, 5] = -pm[0, 1], -pm[0, 2]
        expected[2, 4], expected[2, 5] = -pm[0, 2], -pm[0, 1]
        expected[3, 3], expected[3, 4] = pm[0, 0] - 2 * rho, -2 * rho
        expected[4, 3], expected[4, 4] = -2 * rho, pm[0, 0] - 2 * rho
        expected[5, 5] = pm[0, 0]
        raw = sb.symbol_raw(p, rho, e1).entries
        worst = max(worst, float(np.abs(raw - expected).max()))
        modified = sb.symbol_modified(p, rho, e1).entries
        expected_mod = expected.copy()
        expected_mod[:3, :3] = np.eye(3)
        expected_mod[0, 3] -= 1.0
        expected_mod[0, 4] -= 1.0
        worst = max(worst, float(np.abs(modified - expected_mod).max()))
    return _verdict(worst, 1e-13)


@_check("symbol", "rotation_equivariance", default_cases=100)
def _rotation_equivariance(rng, cases):
    worst = 0.0
    for _ in range(cases):
        m = rng.uniform(-3.0, 3.0, (3, 3))
        pm = 0.5 * (m + m.T)
        xi = rng.normal(size=3)
        xi /= np.linalg.norm(xi)
        rho = float(rng.uniform(-2.0, 2.0))
        q = _random_rotation(rng)
        base = sb.spectrum(sb.symbol_raw(cv.SymTensor3.from_matrix(pm, "upper"), rho, xi))
        moved = sb.spectrum(sb.symbol_raw(
            cv.SymTensor3.from_matrix(q @ pm @ q.T, "upper"), rho, q @ xi))
        worst = max(worst, float(np.abs(base - moved).max()))
    return _verdict(worst, 1e-9)


@_check("symbol", "xi_quadratic_homogeneity", default_cases=100)
def _xi_homogeneity(rng, cases):
    exact_failures = 0
    for _ in range(cases):
        m = rng.uniform(-3.0, 3.0, (3, 3))
        p = cv.SymTensor3.from_matrix(0.5 * (m + m.T), "upper")
        xi = rng.normal(size=3)
        rho = float(rng.uniform(-2.0, 2.0))
        s = float(rng.choice([0.25, 0.5, 2.0, 4.0, 8.0]))  # powers of two scale exactly
        base = sb.symbol_raw(p, rho, xi, normalize=False).entries
        scaled = sb.symbol_raw(p, rho, s * xi, normalize=False).entries
        if not np.array_equal(scaled, s * s * base):
            exact_failures += 1
        corr = sb.symbol_deturck_correction(xi, normalize=False).entries
        corr_s = sb.symbol_deturck_correction(s * xi, normalize=False).entries
        if not np.array_equal(corr_s, s * s * corr):
            exact_failures += 1
    return exact_failures == 0, f"{exact_failures} exact-scaling failures (need 0)"


@_check("symbol", "rho_term_linearity", default_cases=100)
def _rho_reduction(rng, cases):
    e1 = np.array([1.0, 0.0, 0.0])
    zero_p = cv.SymTensor3(np.zeros(6), "upper")
    if np.abs(sb.symbol_raw(zero_p, 0.0, e1).entries).max() != 0.0:
        return False, "symbol of zero data at rho=0 is not identically zero"
    worst = 0.0
    for _ in range(cases):
        m = rng.uniform(-3.0, 3.0, (3, 3))
        p = cv.SymTensor3.from_matrix(0.5 * (m + m.T), "upper")
        xi = rng.normal(size=3)
        rho = float(rng.uniform(-2.0, 2.0))
        full = sb.symbol_raw(p, rho, xi).entries
        p_part = sb.symbol_raw(p, 0.0, xi).entries
        rho_part = sb.symbol_raw(zero_p, rho, xi).entries
        worst = max(worst, float(np.abs(full - p_part - rho_part).max()))
    return _verdict(worst, 1e-13, "max dev from rho-linearity split")


@_check("symbol", "gauge_term_direct_formula", default_cases=200)
def _gauge_direct(rng, cases):
    worst = 0.0
    for _ in range(cases):
        xi = rng.normal(size=3)
        xi /= np.linalg.norm(xi)

        def direct(mm):
            mv = mm @ xi
            return (np.trace(mm) * np.outer(xi, xi)
                    - np.outer(xi, mv) - np.outer(mv, xi))

        expected = np.column_stack(
            [cv.pack(direct(cv.unpack(row))) for row in np.eye(6)])
        got = sb.symbol_deturck_correction(xi).entries
        worst = max(worst, float(np.abs(got - expected).max()))
    return _verdict(worst, 1e-12)


@_check("symbol", "parabolicity_threshold_bisection")
def _threshold_bisection(rng, cases):
    del rng, cases
    g = cv.SymTensor3.identity()
    p = cv.SymTensor3.identity("upper")
    below = sb.parabolicity(p, g, 0.24)
    above = sb.parabolicity(p, g, 0.26)
    if below.verdict != "strictly_parabolic_deturck" or above.verdict == "strictly_parabolic_deturck":
        return False, (f"verdicts off bracket: rho=0.24 {below.verdict}, "
                       f"rho=0.26 {above.verdict}")
    lo, hi = 0.24, 0.26
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        rep = sb.parabolicity(p, g, mid, direction_samples=20)
        if rep.verdict == "strictly_parabolic_deturck":
            lo = mid
        else:
            hi = mid
    crossing = 0.5 * (lo + hi)
    err = abs(crossing - 0.25)
    return err < 1e-6, f"bisected crossing {crossing!r}, |err| {err:.2e} (tol 1e-6)"


@_check("symbol", "sphere_threshold_from_engine")
def _sphere_threshold(rng, cases):
    del rng, cases
    g = cv.SymTensor3.identity()
    riem = cv.Riemann3.space_form(1.0, g)
    p = cv.einstein_raised(riem, g)
    rep = sb.parabolicity(p, g, 0.0)
    ok = (abs(rep.threshold - 0.25) < 1e-12 and abs(rep.margin - 0.25) < 1e-12
          and rep.verdict == "strictly_parabolic_deturck")
    return ok, f"threshold {rep.threshold!r}, margin {rep.margin!r}, {rep.verdict}"


# ---------------------------------------------------------------------------
# flow suite

_RHS_GRID_C = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
_RHS_GRID_LAM = (0.5, 1.0, 2.0, -0.5, -1.0, -2.0)
_RHS_GRID_RHO = (-0.2, 0.0, 0.1, 1.0 / 6.0)


@_check("flow", "rhs_engine_agreement")
def _rhs_agreement(rng, cases):
    del rng, cases
    worst = 0.0
    for c in _RHS_GRID_C:
        for lam in _RHS_GRID_LAM:
            for rho in _RHS_GRID_RHO:
                params = fl.FlowParams(rho=rho, epsilon=1 if lam > 0 else -1,
                                       lam=lam, dt=1e-4, t_end=1.0)
                a = fl.einstein_rhs(c, params)
                b = fl.engine_rhs(c, params)
                worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
    return _verdict(worst, 1e-10, "max rel dev over grid")


def _sphere_params(dt=1e-4, t_end=0.2):
    return fl.FlowParams(rho=0.0, epsilon=+1, lam=2.0, dt=dt, t_end=t_end)


def _hyperbolic_params(dt=1e-3, t_end=2.0):
    return fl.FlowParams(rho=0.0, epsilon=-1, lam=-2.0, dt=dt, t_end=t_end)


@_check("flow", "integration_sphere_accuracy")
def _sphere_accuracy(rng, cases):
    del rng, cases
    trace = fl.integrate(_sphere_params())
    err = abs(trace.records[-1].c - math.sqrt(0.2))
    return err < 1e-8, f"|c(0.2) - sqrt(0.2)| = {err:.3e} (tol 1e-8)"


@_check("flow", "integration_hyperbolic_accuracy")
def _hyperbolic_accuracy(rng, cases):
    del rng, cases
    trace = fl.integrate(_hyperbolic_params())
    err = abs(trace.records[-1].c - 3.0)
    return err < 1e-7, f"|c(2) - 3| = {err:.3e} (tol 1e-7)"


@_check("flow", "rk4_convergence_order")
def _convergence_order(rng, cases):
    del rng, cases
    exact = math.sqrt(0.2)
    errs = [abs(fl.integrate(_sphere_params(dt=dt)).records[-1].c - exact)
            for dt in (2e-3, 1e-3, 5e-4)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    ok = all(abs(o - 4.0) <= 0.2 for o in orders)
    return ok, "observed orders " + ", ".join(f"{o:.3f}" for o in orders) + " (need 4.0 +/- 0.2)"


@_check("flow", "einstein_preservation")
def _einstein_preservation(rng, cases):
    del rng, cases
    worst = 0.0
    for params in (_sphere_params(), _hyperbolic_params()):
        trace = fl.integrate(params)
        for record in trace.records:
            worst = max(worst, fl.einstein_residual(record, params))
    return _verdict(worst, 1e-10, "max ||Ric - (R/3) g||_g")


@_check("flow", "trace_scalar_curvature_identity")
def _trace_identity(rng, cases):
    del rng, cases
    worst = 0.0
    for params in (_sphere_params(), _hyperbolic_params()):
        trace = fl.integrate(params)
        for record in trace.records:
            worst = max(worst, abs(record.scalar_curvature * record.c - 3.0 * params.lam))
    return _verdict(worst, 1e-12, "max |R c - 3 lam|")


@_check("flow", "monotone_sign_behavior")
def _sign_behavior(rng, cases):
    del rng, cases
    shrink = [r.c for r in fl.integrate(_sphere_params()).records]
    grow = [r.c for r in fl.integrate(_hyperbolic_params()).records]
    ok = (all(b < a for a, b in zip(shrink, shrink[1:]))
          and all(b > a for a, b in zip(grow, grow[1:])))
    return ok, "shrinking run strictly decreasing, growing run strictly increasing"


@_check("flow", "parabolic_rescaling_covariance")
def _rescaling(rng, cases):
    del rng, cases
    s = 2.0
    base = fl.integrate(fl.FlowParams(rho=0.0, epsilon=+1, lam=1.0, dt=1e-3, t_end=0.4),
                        record_every=50)
    scaled = fl.integrate(fl.FlowParams(rho=0.0, epsilon=+1, lam=s * 1.0,
                                        dt=1e-3 / s**2, t_end=0.4 / s**2),
                          record_every=50)
    worst = 0.0
    for r1, r2 in zip(base.records, scaled.records):
        worst = max(worst, abs(r1.t - s**2 * r2.t), abs(r1.c - r2.c))
    return _verdict(worst, 1e-7, "max |c(t) - c_scaled(t/s^2)|")


@_check("flow", "extinction_detection")
def _extinction(rng, cases):
    del rng, cases
    trace = fl.integrate(fl.FlowParams(rho=0.0, epsilon=+1, lam=2.0, dt=1e-4, t_end=0.3))
    if trace.status != "extinct" or trace.extinction_time is None:
        return False, f"expected extinct status, got {trace.status}"
    err = abs(trace.extinction_time - 0.25)
    flagged = any("extinct" in r.events for r in trace.records)
    return err < 5e-3 and flagged, (
        f"extinction at t = {trace.extinction_time!r}, |err| {err:.2e} (tol 5e-3)")


@_check("flow", "equilibrium_steady_state")
def _equilibrium(rng, cases):
    del rng, cases
    params = fl.FlowParams(rho=1.0 / 6.0, epsilon=+1, lam=2.0, dt=1e-3, t_end=0.1)
    trace = fl.integrate(params)
    drift = max(abs(r.c - 1.0) for r in trace.records)
    flagged = any("steady_state" in r.events for r in trace.records)
    return drift < 1e-12 and flagged, f"max |c - 1| = {drift:.3e}, steady flag {flagged}"


@_check("flow", "scalar_coupling_slows_shrinking")
def _rho_comparison(rng, cases):
    del rng, cases
    fast = fl.integrate(_sphere_params(dt=1e-4, t_end=0.2), record_every=200)
    slow = fl.integrate(fl.FlowParams(rho=1.0 / 6.0 - 1e-3, epsilon=+1, lam=2.0,
                                      dt=1e-4, t_end=0.2), record_every=200)
    pairs = list(zip(fast.records[1:], slow.records[1:]))
    ok = all(s.c > f.c for f, s in pairs) and all(s.c < 1.0 for _, s in pairs)
    return ok, "coupled run shrinks monotonically but slower at every record"


# ---------------------------------------------------------------------------
# cli suite (round-trip and determinism of the emitters)

@_check("cli", "output_determinism")
def _determinism(rng, cases):
    del rng, cases
    from . import cli
    trace = fl.integrate(_sphere_params(dt=1e-3, t_end=0.1), record_every=20)
    blobs = set()
    for _ in range(2):
        buf = io.StringIO()
        cli.write_trace_csv(buf, trace)
        jbuf = io.StringIO()
        cli.write_trace_json(jbuf, trace)
        blobs.add(buf.getvalue() + "\x00" + jbuf.getvalue())
    return len(blobs) == 1, "two emissions byte-identical" if len(blobs) == 1 else "emissions differ"


@_check("cli", "csv_float_roundtrip")
def _roundtrip(rng, cases):
    del rng, cases
    from . import cli
    trace = fl.integrate(_sphere_params(dt=1e-3, t_end=0.1), record_every=20)
    buf = io.StringIO()
    cli.write_trace_csv(buf, trace)
    lines = [ln for ln in buf.getvalue().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    exact = True
    for line, record in zip(lines[1:], trace.records):
        fields = dict(zip(header, line.split(",")))
        for key, value in (("t", record.t), ("c", record.c),
                           ("R", record.scalar_curvature),
                           ("h_eig", record.h_eigenvalue),
                           ("parab_margin", record.parabolicity_margin)):
            if float(fields[key]) != value:
                exact = False
    return exact, "re-parsed floats bit-identical" if exact else "round-trip mismatch"


@_check("cli", "strict_config_parsing")
def _strict_config(rng, cases):
    del rng, cases
    from . import cli
    try:
        cli.apply_config_keys({"flow.rho": "0.0", "flow.bogus_key": "1"}, "flow")
        return False, "unknown key accepted"
    except cli.UsageError as exc:
        if "flow.bogus_key" not in str(exc):
            return False, "unknown-key error does not name the key"
    try:
        cli.build_flow_params({"rho": 0.0, "epsilon": 1})
        return False, "missing required key accepted"
    except cli.UsageError as exc:
        if "lambda" not in str(exc):
            return False, "missing-key error does not name the key"
    return True, "unknown and missing keys rejected by name"
