"""
The desk-scale acceptance matrix.

Each suite returns a :class:`SuiteResult` with a pass flag, its wall time,
the time limit it must meet, and a dictionary of details.  The pytest
acceptance module and ``zdm verify-all`` both run these functions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import encoder as enc
from .embedding import build_phi, host_window, phi_noninvertible, plan_embedding, verify_density
from .errors import MarkerNotFound
from .glue import GlueState, Schedule, glue_run
from .markers import find_marker, verify_marker
from .selector import check_selector, exact_atomic_bad_set, selector_build, synthetic_measures
from .shifts import UNFILLED, fibonacci, full_shift, thue_morse
from .simplex import (
    AffineMapOnSimplex,
    FiniteSimplex,
    decompose,
    prefix_splitter,
    project_to_hull,
    retract,
    singleton_splitter,
    whole_splitter,
)

DEFAULT_SEED = 20240601


@dataclass
class SuiteResult:
    key: str
    title: str
    passed: bool
    seconds: float
    limit: float
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed and self.seconds < self.limit

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] {self.key} {self.title} ({self.seconds:.2f}s / limit {self.limit:.0f}s)"

    def to_dict(self) -> dict:
        return {"key": self.key, "title": self.title, "passed": self.passed, "ok": self.ok,
                "seconds": self.seconds, "limit": self.limit, "details": self.details}


def _timed(key, title, limit, body):
    t0 = time.perf_counter()
    passed, details = body()
    return SuiteResult(key, title, bool(passed), time.perf_counter() - t0, limit, details)


# ---------------------------------------------------------------------------
# symbolic suites


def marker_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    def body():
        details, passed = {}, True
        for s in (fibonacci(), thue_morse()):
            for n in (2, 3, 4, 5):
                m = find_marker(s, n, max_L=4 * n)
                cert = verify_marker(s, m.W, n)
                good = cert.valid and cert.N == m.N
                details[f"{s.name} n={n}"] = {"W": m.words(), "N": m.N, "L": m.L, "certified": good}
                passed &= good
        fib2 = find_marker(fibonacci(), 2, max_L=8)
        exact = fib2.words() == ["1"] and fib2.N == 3
        details["fibonacci n=2 exact"] = exact
        return passed and exact, details

    return _timed("1", "marker suite", 10, body)


def marker_negative_control(seed: int = DEFAULT_SEED) -> SuiteResult:
    def body():
        try:
            m = find_marker(full_shift(2), 2, max_L=4)
        except MarkerNotFound as exc:
            return True, {"outcome": "NotFound", "message": str(exc)}
        return False, {"outcome": "found", "W": m.words()}

    return _timed("2", "marker negative control", 5, body)


def _splice_pairs(orbit: bytes, W: int, R: int, count: int, rng):
    """Pairs of admissible windows agreeing on ``[j - R, j + R]`` and differing elsewhere."""
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        s = int(rng.integers(0, len(orbit) - W))
        j = int(rng.integers(R, W - R))
        core = orbit[s + j - R: s + j + R + 1]
        q = orbit.find(core, int(rng.integers(0, len(orbit) - W)))
        if q == -1:
            q = orbit.find(core)
        s2 = q - (j - R)
        if s2 < 0 or s2 + W > len(orbit) or s2 == s:
            continue
        x, x2 = orbit[s:s + W], orbit[s2:s2 + W]
        if x == x2:
            continue
        out.append((x, x2, j))
    return out


def embedding_suite(seed: int = DEFAULT_SEED, eps_values=(0.5, 0.25, 0.1), density_windows=20,
                    injectivity_windows=1000, mutations=1000) -> SuiteResult:
    def body():
        host, target = thue_morse(), fibonacci()
        rng = np.random.default_rng(seed)
        orbit = host.reference_orbit(1 << 18)
        details, passed = {}, True
        for eps in eps_values:
            plan = plan_embedding(host, target, eps, [(1, 1), (1, 2)])
            cols = int(round(20 * plan.N0 / eps))
            windows = [host.sample_word(cols, rng) for _ in range(density_windows)]
            outputs = [build_phi(plan, host_window(plan, w)) for w in windows]
            report = verify_density(plan, outputs)

            digests = {}
            seen_inputs = set()
            while len(seen_inputs) < injectivity_windows:
                w = host.sample_word(cols, rng)
                if w in seen_inputs:
                    continue
                seen_inputs.add(w)
                y = build_phi(plan, host_window(plan, w))
                digests.setdefault(y.cells.tobytes(), set()).add(w)
            injective = all(len(v) == 1 for v in digests.values())

            R = plan.radius
            pairs = _splice_pairs(orbit, 4 * R, R, mutations, rng)
            local = len(pairs) == mutations
            bad = None
            for x, x2, j in pairs:
                a = build_phi(plan, host_window(plan, x)).cells[:, j]
                b = build_phi(plan, host_window(plan, x2)).cells[:, j]
                if not np.array_equal(a, b) or np.any(a == UNFILLED):
                    local, bad = False, j
                    break
            ok = report.inside and report.worst_deviation < eps and injective and local
            details[f"eps={eps}"] = {
                "N0": plan.N0, "marker_N": plan.marker.N, "gaps": list(plan.gaps), "radius": R,
                "window": cols, "inside": report.inside, "worst_deviation": report.worst_deviation,
                "injective_on": len(seen_inputs), "mutations": len(pairs), "local": local, "witness": bad,
            }
            passed &= ok
        return passed, details

    return _timed("3", "dense-embedding suite", 60, body)


def noninvertible_suite(seed: int = DEFAULT_SEED, eps_values=(0.5, 0.25, 0.1), windows=100) -> SuiteResult:
    def body():
        host, target = thue_morse(), fibonacci()
        rng = np.random.default_rng(seed + 1)
        details, passed, applicable = {}, True, 0
        for eps in eps_values:
            plan = plan_embedding(host, target, eps, [(1, 1), (1, 2)])
            if plan.marker.N > 2 * plan.N0 - 1:
                details[f"eps={eps}"] = {"N0": plan.N0, "marker_N": plan.marker.N, "applies": False}
                continue
            applicable += 1
            cols = 8 * plan.radius
            clean = 0
            for _ in range(windows):
                y = phi_noninvertible(plan, host_window(plan, host.sample_word(cols, rng)))
                clean += int(y.first_col == 0 and not np.any(y.cells == UNFILLED))
            details[f"eps={eps}"] = {"N0": plan.N0, "marker_N": plan.marker.N, "applies": True,
                                     "clean_windows": clean, "windows": windows}
            passed &= clean == windows
        return passed and applicable > 0, details

    return _timed("4", "noninvertible variant", 10, body)


# ---------------------------------------------------------------------------
# encoder and selector


def encoder_suite(seed: int = DEFAULT_SEED, t_samples=20, orbit_length=60_000) -> SuiteResult:
    def body():
        rng = np.random.default_rng(seed + 2)
        sys = enc.CircleRotation("sqrt2-1")
        fams = enc.cover_schedule(sys, 3)
        measure = enc.OrbitMeasure(sys, float(rng.random()), orbit_length)
        ds = (0.1, 0.05, 0.01)
        monotone, small, worst = True, True, 0.0
        for fam in fams:
            for t in rng.random(t_samples):
                est = [enc.psi_estimate(sys, fam, measure, float(t), enc.BoundaryEstimatorConfig(d)) for d in ds]
                for a, b in zip(est, est[1:]):
                    monotone &= b.value <= a.value + 2 * max(a.tolerance, b.tolerance)
                worst = max(worst, est[-1].value)
                small &= est[-1].value < 0.02
        equivariant = True
        for x in rng.random(100):
            t = float(rng.random())
            a = enc.array_name(sys, fams, t, float(x), 3, 8)
            b = enc.array_name(sys, fams, t, float(sys.step(x)), 3, 8)
            equivariant &= bool(np.array_equal(a.cells[:, 1:], b.cells[:, :-1]))
        separated = 0
        for _ in range(50):
            pts = rng.random(2)
            r = enc.recoverability_check(sys, fams, float(rng.random()), pts, 3, 16)
            separated += int(r.separated)
        details = {"monotone": monotone, "below_0.02": small, "worst_psi_at_d=0.01": worst,
                   "equivariant": equivariant, "separated_pairs": separated}
        return monotone and small and equivariant and separated == 50, details

    return _timed("5", "encoder suite", 60, body)


SYNTHETIC_BAD = (
    ((1, 0.0), (3, 2 / 3)),
    ((2, 2 / 9), (4, 0.0)),
    ((5, 0.25), (6, 0.0)),
    ((6, 2 / 3), (2, 0.0)),
)


def selector_suite(seed: int = DEFAULT_SEED, n_max=6) -> SuiteResult:
    def body():
        sys = enc.CircleRotation("sqrt2-1")
        fams = enc.cover_schedule(sys, n_max)
        measures = synthetic_measures(sys, fams, SYNTHETIC_BAD, seed=seed)
        cfg = enc.BoundaryEstimatorConfig(0.01)
        table = selector_build(measures, fams, n_max, cfg)
        check = check_selector(table, measures, fams, cfg)
        avoids = {}
        for i, mu in enumerate(measures):
            lo, hi = (float(v) for v in table.piece_of(i).interval)
            bad = exact_atomic_bad_set(fams, mu.points)
            avoids[i] = not bool(np.any((bad >= lo) & (bad <= hi)))
        details = {"base": check.base, "nesting": check.nesting, "diameters": check.diameters,
                   "smallness": check.smallness, "limits": [table.limit_address(i) for i in range(len(measures))],
                   "avoids_bad_sets": avoids}
        return check.ok and all(avoids.values()), details

    return _timed("6", "selector suite", 30, body)


# ---------------------------------------------------------------------------
# simplex


def random_simplex(rng, dim=None, count=None, scale=1.0) -> FiniteSimplex:
    dim = dim or int(rng.integers(1, 7))
    count = count or int(rng.integers(2, dim + 2))
    while True:
        V = scale * rng.standard_normal((count, dim))
        try:
            return FiniteSimplex(V)
        except ValueError:
            continue


def clustered_simplex(rng, groups=3, per_group=2, spacing=0.7) -> tuple[FiniteSimplex, list[list[int]]]:
    """Groups of nearby vertices for a geometric schedule with ratio 1/2.

    Group ``g`` lies about ``spacing * 2**-g`` away from the earlier groups and
    spreads over less than ``0.15 * 2**-g``, below ``eps_{g+1} = 2**-(g+1)``.
    """
    dim = groups * per_group
    V = np.zeros((dim, dim))
    out = []
    for g in range(groups):
        base = g * per_group
        if g:
            V[base, base] = spacing * 0.5 ** g * (0.7 + 0.3 * rng.random())
        for p in range(1, per_group):
            V[base + p] = V[base]
            V[base + p, base + p] = 0.1 * 0.5 ** g * (0.5 + 0.5 * rng.random())
        out.append(list(range(base, base + per_group)))
    return FiniteSimplex(V, tuple(f"v{i}" for i in range(dim))), out


def check_retraction(K, F, eps, theta: AffineMapOnSimplex, rng, probes=20) -> dict:
    aff = idem = disp = True
    fixed = all(np.allclose(theta.images[i], K.vertices[i], atol=1e-9) for i in F.indices)
    for _ in range(probes):
        w1, w2 = rng.dirichlet(np.ones(K.size)), rng.dirichlet(np.ones(K.size))
        lam = float(rng.random())
        x, y = K.point(w1), K.point(w2)
        lhs = theta(lam * x + (1 - lam) * y)
        rhs = lam * theta(x) + (1 - lam) * theta(y)
        aff &= bool(np.linalg.norm(lhs - rhs) <= 1e-9)
        idem &= bool(np.linalg.norm(theta(theta(x)) - theta(x)) <= 1e-9)
        disp &= bool(np.linalg.norm(theta(x) - x) <= eps + 1e-9)
    disp &= theta.vertex_displacement() <= eps + 1e-9
    return {"affine": aff, "idempotent": idem, "displacement": disp, "fixes_face": fixed}


def simplex_suite(seed: int = DEFAULT_SEED) -> SuiteResult:
    def body():
        rng = np.random.default_rng(seed + 3)
        retract_ok = 0
        for _ in range(100):
            K = random_simplex(rng)
            size = int(rng.integers(1, K.size + 1))
            F = K.face(rng.choice(K.size, size, replace=False))
            gaps = [0.0]
            for v in range(K.size):
                if v not in F.indices:
                    q, _ = project_to_hull(F.vertices, K.vertices[v])
                    gaps.append(float(np.linalg.norm(K.vertices[v] - q)))
            eps = max(gaps) * (1 + rng.random()) + 1e-6
            res = check_retraction(K, F, eps, retract(K, F, eps), rng)
            retract_ok += int(all(res.values()))
        decompose_ok = 0
        for _ in range(100):
            fam = [list(rng.choice(30, int(rng.integers(1, 10)), replace=False)) for _ in range(int(rng.integers(1, 7)))]
            if rng.random() < 0.3:
                fam = [[format(int(p), "05b") for p in E] for E in fam]
                splitter = prefix_splitter(int(rng.integers(1, 5)))
            else:
                splitter = singleton_splitter if rng.random() < 0.5 else whole_splitter
            out = decompose(fam, splitter)
            flat = [p for piece in out for p in piece]
            good = len(flat) == len(set(flat)) and set(flat) == {p for E in fam for p in E}
            good &= all(any(set(piece) <= set(E) for E in fam) for piece in out)
            decompose_ok += int(good)
        glue_ok, tails = 0, set()
        runs = 10
        for i in range(runs):
            if i % 2 == 0:
                K, groups = clustered_simplex(rng)
            else:
                K = random_simplex(rng, dim=6, count=6, scale=0.2)
                groups = [[0, 1], [2, 3], [4, 5]]
            res = glue_run(GlueState.start(K, groups, Schedule.parse("geometric:1/2")), 5)
            good = res.ok and all(c.displacement < 4 * 2.0 ** -c.k for c in res.stages)
            good &= len(res.state.processed) == K.size
            glue_ok += int(good)
            tails.add(res.tail_bound)
        tail_exact = tails == {Fraction(1, 8)}
        details = {"retract_ok": retract_ok, "decompose_ok": decompose_ok, "glue_ok": glue_ok,
                   "glue_runs": runs, "tail_bound": [str(t) for t in tails]}
        return retract_ok == 100 and decompose_ok == 100 and glue_ok == runs and tail_exact, details

    return _timed("7", "simplex suite", 30, body)


SUITES = {
    "1": marker_suite,
    "2": marker_negative_control,
    "3": embedding_suite,
    "4": noninvertible_suite,
    "5": encoder_suite,
    "6": selector_suite,
    "7": simplex_suite,
}


def run_desk(seed: int = DEFAULT_SEED, only=None) -> list[SuiteResult]:
    keys = only or list(SUITES)
    return [SUITES[k](seed) for k in keys]
