"""Acceptance suite: one check per shipped guarantee, with pinned gates.

Each criterion is a plain function returning a CriterionResult so tests and
the CLI share the exact same checks.  run_suite prints one PASS/FAIL line
per criterion and can write deterministic CSV/JSON reports (no timestamps,
repr'd floats), which is what the determinism criterion byte-compares.
"""

from __future__ import annotations

import io
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .corpus import CORPUS_VERSION, build_default_corpus
from .geometry import estimate_c_d
from .lorentz import SimpleFunction, lorentz_norm, lp_norm
from .refinement import (
    build_tower,
    check_tower_structure,
    enumerate_tower_bruteforce,
)
from .sets import BoxUnionSet
from .sharpness import (
    check_rwt,
    critical_exponents,
    lemma2_grid_dual,
    lemma2_grid_primal,
    lemma2_shrinking_sweep,
    necessity_check,
    scaling_experiment,
)
from .transform import QuadSpec, adjointness_gap, bilinear_form


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"[{status}] criterion {self.index} ({self.name}): {parts}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def random_box_pair(d, rng, max_boxes=2):
    """A disjoint source/target pair with usable first-axis extent.

    First-axis cuts keep every box at least 0.15 wide so fibers are not
    degenerate; the other axes straddle the origin with varied aspect.
    """

    def union(n):
        while True:
            cuts = np.sort(rng.uniform(-1.0, 1.0, n + 1))
            cuts[0] -= 0.02
            cuts[-1] += 0.02
            if np.all(np.diff(cuts) >= 0.15):
                break
        boxes = []
        for i in range(n):
            bounds = [[cuts[i], cuts[i + 1]]]
            for _ in range(d - 1):
                bounds.append([rng.uniform(-0.8, -0.1), rng.uniform(0.1, 0.8)])
            boxes.append(np.asarray(bounds))
        return BoxUnionSet(boxes)

    n_e = int(rng.integers(1, max_boxes + 1))
    n_f = int(rng.integers(1, max_boxes + 1))
    return union(n_e), union(n_f)


def criterion_1_jacobian_constancy(seed=0, profile="full"):
    """Numeric/factored determinant ratio is a dimensional constant.

    Gate: relative dispersion < 1e-6 and nonzero mean for both map
    families; in the plane the constants are -1 (dual-first) and +1
    (forward-first), an oracle derived by hand from the 2x2 determinants.
    """
    dims = (2, 3, 4, 5, 6, 7) if profile == "full" else (2, 3)
    samples = 100 if profile == "full" else 40
    details = {}
    passed = True
    worst = 0.0
    for kind in ("phi", "psi"):
        for d in dims:
            est = estimate_c_d(kind, d, samples=samples, seed=seed + d)
            worst = max(worst, est.rel_dispersion)
            if est.rel_dispersion >= 1e-6 or est.mean == 0.0:
                passed = False
                details[f"bad_{kind}_d{d}"] = est.rel_dispersion
            if d == 2:
                target = -1.0 if kind == "phi" else 1.0
                details[f"mean_{kind}_d2"] = est.mean
                if abs(est.mean - target) > 1e-6:
                    passed = False
    details["dims"] = "-".join(str(d) for d in dims)
    details["max_dispersion"] = worst
    return CriterionResult(1, "jacobian-constancy", passed, details)


def criterion_2_adjointness(seed=0, profile="full"):
    """Forward and dual pairings agree on random box pairs.

    Gate: relative gap <= 1e-3 with the default quadrature, 50 pairs in
    each of d = 2, 3.
    """
    n_pairs = 50 if profile == "full" else 8
    details = {}
    passed = True
    for d in (2, 3):
        rng = np.random.default_rng(seed + 100 * d)
        worst = 0.0
        t_min = float("inf")
        for _ in range(n_pairs):
            E, F = random_box_pair(d, rng)
            span = E.first_axis_span()
            wspan = F.first_axis_span()
            gap = adjointness_gap(
                E, F, (span.lo, span.hi), (wspan.lo, wspan.hi)
            )
            worst = max(worst, gap["rel_gap"])
            t_min = min(t_min, gap["primal"])
        details[f"worst_rel_d{d}"] = worst
        details[f"min_pairing_d{d}"] = t_min
        if worst > 1e-3:
            passed = False
    details["pairs"] = n_pairs
    return CriterionResult(2, "adjointness", passed, details)


def criterion_3_unit_square_pairing(seed=0, profile="full"):
    """Unit-square pairing equals the hand value 3/4 within 1e-6.

    For E = F = [0,1]^2 and I = [0,1] the pairing is
    int_0^1 int_0^1 |{s in [0,1] : x2 + s*x1 in [0,1]}| dx = 3/4 by direct
    integration.  Checked with the default layered quadrature and with the
    tensor midpoint rule at step 1/2048.
    """
    unit = BoxUnionSet([np.array([[0.0, 1.0], [0.0, 1.0]])])
    layered = bilinear_form(unit, unit, (0.0, 1.0))
    midpoint = bilinear_form(
        unit, unit, (0.0, 1.0), QuadSpec(method="midpoint", step=1.0 / 2048.0)
    )
    err_layered = abs(layered - 0.75)
    err_midpoint = abs(midpoint - 0.75)
    passed = err_layered <= 1e-6 and err_midpoint <= 1e-6
    return CriterionResult(
        3,
        "unit-square-pairing",
        passed,
        {
            "layered": layered,
            "midpoint_2048": midpoint,
            "err_layered": err_layered,
            "err_midpoint": err_midpoint,
        },
    )


def criterion_4_family_scaling(seed=0, profile="full"):
    """Norm decay of the shrinking family matches the exact exponents.

    Gates: fitted slopes within 3% of the closed-form predictions for
    d = 2, 3, 4; at the critical secondary exponent the two slopes agree
    within 1e-2 absolute; the divergence verdict flips across it.
    """
    details = {}
    passed = True
    for d in (2, 3, 4):
        p_d, _ = critical_exponents(d)
        res = scaling_experiment(d, r=float(p_d))
        rel_f = abs(res.fit_f.slope - res.predicted_f) / abs(res.predicted_f)
        rel_xf = abs(res.fit_xf.slope - res.predicted_xf) / abs(res.predicted_xf)
        gap = abs(res.fit_f.slope - res.fit_xf.slope)
        details[f"slope_f_d{d}"] = res.fit_f.slope
        details[f"slope_gap_d{d}"] = gap
        if rel_f > 0.03 or rel_xf > 0.03 or gap > 1e-2:
            passed = False
        low = necessity_check(d, r=0.9 * float(p_d))
        high = necessity_check(d, r=1.1 * float(p_d))
        details[f"verdicts_d{d}"] = f"{low.verdict}/{high.verdict}"
        if low.verdict != "diverges" or high.verdict != "bounded":
            passed = False
    return CriterionResult(4, "family-scaling", passed, details)


def _random_simple_function(rng, d):
    n_cell = 4
    width = 2.0 / n_cell
    total = n_cell**d
    k = int(rng.integers(1, 5))
    chosen = rng.choice(total, size=k, replace=False)
    supports = []
    for flat in sorted(chosen):
        idx = np.unravel_index(flat, (n_cell,) * d)
        lo = -1.0 + np.asarray(idx, dtype=float) * width + 0.02 * width
        hi = lo + rng.uniform(0.3, 0.96) * width
        supports.append(BoxUnionSet([np.stack([lo, hi], axis=1)]))
    weights = rng.uniform(0.1, 5.0, size=k)
    return SimpleFunction(weights, supports)


def criterion_5_lorentz_identity(seed=0, profile="full"):
    """Lorentz norm at equal exponents reproduces the Lebesgue norm.

    Gate: relative agreement 1e-10 on random simple functions and 1e-12
    against the indicator closed form (s/r)^(1/r) |A|^(1/s), including the
    sup-type secondary exponent.
    """
    count = 100 if profile == "full" else 20
    rng = np.random.default_rng(seed + 11)
    worst = 0.0
    for i in range(count):
        d = 2 + (i % 3)
        f = _random_simple_function(rng, d)
        p = float(rng.uniform(0.5, 4.0))
        a = lorentz_norm(f, p, p)
        b = lp_norm(f, p)
        worst = max(worst, abs(a - b) / b)
    area = BoxUnionSet([np.array([[0.0, 0.5], [0.0, 0.8]])])
    indicator = SimpleFunction([1.0], [area])
    worst_chi = 0.0
    for s, r in ((1.5, 2.5), (2.0, 1.0), (3.0, 0.7), (1.2, 4.0)):
        got = lorentz_norm(indicator, s, r)
        want = (s / r) ** (1.0 / r) * area.measure ** (1.0 / s)
        worst_chi = max(worst_chi, abs(got - want) / want)
    got_inf = lorentz_norm(indicator, 2.0, float("inf"))
    want_inf = area.measure**0.5
    worst_chi = max(worst_chi, abs(got_inf - want_inf) / want_inf)
    passed = worst <= 1e-10 and worst_chi <= 1e-12
    return CriterionResult(
        5,
        "lorentz-identity",
        passed,
        {"functions": count, "worst_rel": worst, "worst_chi_rel": worst_chi},
    )


def criterion_6_testing_ratio_floor(seed=0, profile="full"):
    """Two-sided testing ratios hold a positive floor over the corpus.

    Gate: max(ratio_E, ratio_F) >= 0.01 for every entry, and the floor
    moves by less than 2x when the quadrature step is halved.
    """
    corpus = build_default_corpus()
    if profile != "full":
        corpus = corpus[:8]
    floor = float("inf")
    floor_halved = float("inf")
    worst_id = ""
    worst_drift = 1.0
    passed = True
    for entry in corpus:
        interval = (entry.interval.lo, entry.interval.hi)
        base = check_rwt(entry.E, entry.F, interval)
        fine = check_rwt(
            entry.E, entry.F, interval, QuadSpec(step=QuadSpec().step / 2.0)
        )
        m_base = max(base.ratio_e, base.ratio_f)
        m_fine = max(fine.ratio_e, fine.ratio_f)
        if m_base < floor:
            floor = m_base
            worst_id = entry.entry_id
        floor_halved = min(floor_halved, m_fine)
        drift = max(m_base, m_fine) / min(m_base, m_fine)
        worst_drift = max(worst_drift, drift)
        if m_base < 0.01 or drift > 2.0:
            passed = False
    return CriterionResult(
        6,
        "testing-ratio-floor",
        passed,
        {
            "entries": len(corpus),
            "floor": floor,
            "floor_halved_step": floor_halved,
            "worst_entry": worst_id,
            "worst_drift": worst_drift,
        },
    )


def criterion_7_rich_set_floors(seed=0, profile="full"):
    """Rich-subset ratios stay above their measured floors on the corpus.

    Gates (pinned from the measured corpus floors, at roughly half to a
    quarter of the observed minima): grid-aligned primal and dual ratios
    >= 1.0; every shrinking-sweep ratio >= 0.5; the corpus floor at the
    last sweep step at least 0.25x the first step's floor.
    """
    corpus = build_default_corpus()
    if profile != "full":
        corpus = corpus[:8]
    floor_primal = float("inf")
    floor_dual = float("inf")
    sweep_step_floors = None
    passed = True
    for entry in corpus:
        interval = (entry.interval.lo, entry.interval.hi)
        window = (entry.window.lo, entry.window.hi)
        rep_p = lemma2_grid_primal(entry.E, entry.F, interval)
        rep_d = lemma2_grid_dual(entry.E, entry.F, window)
        floor_primal = min(floor_primal, rep_p.ratio)
        floor_dual = min(floor_dual, rep_d.ratio)
        sweep = lemma2_shrinking_sweep(entry.E, entry.F, interval)
        if sweep_step_floors is None:
            sweep_step_floors = [float("inf")] * len(sweep)
        for i, rep in enumerate(sweep):
            sweep_step_floors[i] = min(sweep_step_floors[i], rep.ratio)
    sweep_min = min(sweep_step_floors)
    decay = sweep_step_floors[-1] / sweep_step_floors[0]
    if floor_primal < 1.0 or floor_dual < 1.0:
        passed = False
    if sweep_min < 0.5 or decay < 0.25:
        passed = False
    return CriterionResult(
        7,
        "rich-set-floors",
        passed,
        {
            "entries": len(corpus),
            "floor_primal": floor_primal,
            "floor_dual": floor_dual,
            "sweep_min": sweep_min,
            "sweep_last_over_first": decay,
        },
    )


def criterion_8_tower_oracle(seed=0, profile="full"):
    """Plane towers match exhaustive enumeration and their invariants.

    Gate: every level measure within a factor 2 of the 64^2-grid
    enumeration (same base point), and the structural check holds on 100%
    of sampled tuples.
    """
    configs = [
        (
            BoxUnionSet([np.array([[0.0, 1.0], [0.0, 1.0]])]),
            BoxUnionSet([np.array([[0.0, 1.0], [0.0, 1.0]])]),
        ),
        (
            BoxUnionSet(
                [
                    np.array([[-0.6, -0.1], [0.0, 0.8]]),
                    np.array([[0.1, 0.7], [-0.5, 0.3]]),
                ]
            ),
            BoxUnionSet([np.array([[-0.4, 0.5], [-0.2, 0.6]])]),
        ),
    ]
    samples = 200 if profile == "full" else 60
    worst_ratio = 1.0
    min_structure = 1.0
    passed = True
    for E, F in configs:
        span = E.first_axis_span()
        wspan = F.first_axis_span()
        interval = (span.lo, span.hi)
        window = (wspan.lo, wspan.hi)
        for start in ("phi", "psi"):
            tower = build_tower(E, F, interval, window, start=start)
            frac, _ = check_tower_structure(tower, samples=samples, seed=seed)
            min_structure = min(min_structure, frac)
            brute = enumerate_tower_bruteforce(
                E, F, tower.base, interval, window, start=start, grid_n=64
            )
            for level, ref in zip(tower.levels, brute):
                if ref <= 0.0:
                    passed = False
                    continue
                ratio = level.measure / ref
                worst_ratio = max(worst_ratio, max(ratio, 1.0 / ratio))
                if not 0.5 <= ratio <= 2.0:
                    passed = False
    if min_structure < 1.0:
        passed = False
    return CriterionResult(
        8,
        "tower-oracle",
        passed,
        {"worst_factor": worst_ratio, "structure_fraction": min_structure},
    )


def criterion_9_determinism(seed=0, profile="full"):
    """Two quick suite runs with one seed produce byte-identical reports."""
    digests = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            run_suite(
                outdir=tmp,
                seed=seed,
                profile="quick",
                include_determinism=False,
                stream=None,
            )
            blob = {}
            for name in sorted(os.listdir(tmp)):
                with open(os.path.join(tmp, name), "rb") as fh:
                    blob[name] = fh.read()
            digests.append(blob)
    same_names = sorted(digests[0]) == sorted(digests[1])
    same_bytes = same_names and all(
        digests[0][k] == digests[1][k] for k in digests[0]
    )
    return CriterionResult(
        9,
        "determinism",
        same_bytes,
        {"files": len(digests[0]), "identical": same_bytes},
    )


ALL_CRITERIA = (
    criterion_1_jacobian_constancy,
    criterion_2_adjointness,
    criterion_3_unit_square_pairing,
    criterion_4_family_scaling,
    criterion_5_lorentz_identity,
    criterion_6_testing_ratio_floor,
    criterion_7_rich_set_floors,
    criterion_8_tower_oracle,
    criterion_9_determinism,
)


@dataclass
class SuiteResult:
    results: list
    passed: bool
    profile: str
    seed: int


def _write_reports(outdir, suite):
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, "acceptance_results.csv")
    with open(csv_path, "w") as fh:
        fh.write(f"# suite=momentray-acceptance\n")
        fh.write(f"# version={__version__}\n")
        fh.write(f"# corpus_version={CORPUS_VERSION}\n")
        fh.write(f"# seed={suite.seed}\n")
        fh.write(f"# profile={suite.profile}\n")
        fh.write("criterion,name,status,metric,value\n")
        for res in suite.results:
            status = "pass" if res.passed else "fail"
            for key, value in res.details.items():
                text = repr(value) if isinstance(value, float) else str(value)
                fh.write(f"{res.index},{res.name},{status},{key},{text}\n")
    json_path = os.path.join(outdir, "acceptance_summary.json")
    payload = {
        "suite": "momentray-acceptance",
        "version": __version__,
        "corpus_version": CORPUS_VERSION,
        "seed": suite.seed,
        "profile": suite.profile,
        "passed": suite.passed,
        "criteria": [
            {
                "index": res.index,
                "name": res.name,
                "passed": res.passed,
                "details": res.details,
            }
            for res in suite.results
        ],
    }
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


_STDOUT = object()  # late-binding default so output respects redirected stdout


def run_suite(
    outdir=None,
    seed=0,
    profile="full",
    include_determinism=True,
    stream=_STDOUT,
):
    """Run the acceptance criteria, print one line each, write reports."""
    if stream is _STDOUT:
        stream = sys.stdout
    if profile not in ("full", "quick"):
        raise ValueError("profile must be 'full' or 'quick'")
    results = []
    for fn in ALL_CRITERIA:
        if fn is criterion_9_determinism and not include_determinism:
            continue
        start = time.perf_counter()
        res = fn(seed=seed, profile=profile)
        elapsed = time.perf_counter() - start
        results.append(res)
        if stream is not None:
            stream.write(f"{res.line()} [{elapsed:.1f}s]\n")
            stream.flush()
    suite = SuiteResult(
        results=results,
        passed=all(r.passed for r in results),
        profile=profile,
        seed=seed,
    )
    if outdir is not None:
        _write_reports(outdir, suite)
    return suite
