"""End-to-end verification suite: one test per numbered criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``) and
asserts every sub-check at its stated tolerance.

Three rate-window sub-checks are expected to FAIL by construction of the
instances they mandate; the windows assume the proved upper bounds are
sharp, but every mandated instance is (exactly or nearly) symmetric under
the relabeling swapping 0 and 1, so its errors decay strictly faster:

* criterion 5: pointwise errors decay like t^-1.5 (window asks -1.0 +- 0.2)
  for the complete-graph, random-balanced, and two-state instances;
* criterion 6: TV distances decay like 1/t (window asks -0.5 +- 0.15);
* criterion 7: on the 4-vertex complete graph the label process IS the
  matched two-state chain (from every vertex, one of the three neighbors
  carries the same label), so the TV distance is exactly zero and only
  float noise of order 1e-14 remains; a slope fit on that noise cannot
  come out negative.

The upper bounds themselves are asserted (and hold) in all three cases.
"""

import math
import time

import numpy as np
import pytest

import expwalk as ew
from expwalk import clt, decomp, dist, walks
from expwalk.cli import main as cli_main
from oracles import enumerate_weight_law

GRID = [64, 128, 256, 512, 1024, 2048, 4096]


def report(criterion, checks):
    ok = all(passed for _, passed, _ in checks)
    line = "; ".join(
        f"{name}{'' if passed else ' [FAILED]'} ({info})" for name, passed, info in checks
    )
    print(f"\n[acceptance] criterion {criterion}: {'PASS' if ok else 'FAIL'} -- {line}")
    failing = [f"{name}: {info}" for name, passed, info in checks if not passed]
    assert not failing, f"criterion {criterion}: " + " | ".join(failing)


@pytest.fixture(scope="module")
def k4_instance(k4, k4_lab, k4_spectrum):
    sigma2 = clt.asymptotic_sigma2(k4, k4_lab, k4_spectrum)
    laws = walks.exact_weight_laws(walks.walk_chain(k4, k4_lab), GRID)
    return {"g": k4, "lab": k4_lab, "s": k4_spectrum, "sigma2": sigma2, "laws": laws}


@pytest.fixture(scope="module")
def n16_instance(g16, lab16, s16):
    sigma2 = clt.asymptotic_sigma2(g16, lab16, s16)
    laws = walks.exact_weight_laws(walks.walk_chain(g16, lab16), GRID)
    return {"g": g16, "lab": lab16, "s": s16, "sigma2": sigma2, "laws": laws}


@pytest.fixture(scope="module")
def sticky_instance():
    p = 1.0 / 3.0
    sigma2 = walks.sticky_variance_rate(p)
    laws = walks.exact_weight_laws(walks.sticky_chain(p), GRID)
    return {"p": p, "sigma2": sigma2, "laws": laws}


def test_criterion_1_oracle_equivalence(k4, random6):
    start = time.time()
    instances = [
        (k4, ew.Labelling.from_bits([1, 1, 0, 0])),
        (ew.build_complete(5), ew.Labelling.from_bits([1, 1, 0, 0, 0])),
        (ew.build_cycle(5), ew.Labelling.from_bits([1, 0, 1, 0, 1])),
        (random6, ew.random_balanced_labelling(random6, seed=2)),
    ]
    worst = 0.0
    for g, lab in instances:
        chain = walks.walk_chain(g, lab)
        for t in range(1, 7):
            got = ew.exact_weight_law(chain, t)
            want = enumerate_weight_law(chain, t)
            worst = max(worst, float(np.abs(got.padded(0, t) - want.padded(0, t)).max()))
    elapsed = time.time() - start
    report(
        "1 (oracle equivalence)",
        [
            ("max deviation <= 1e-14", worst <= 1e-14, f"worst {worst:.2e}"),
            ("runtime < 10 s", elapsed < 10.0, f"{elapsed:.1f}s"),
        ],
    )


def test_criterion_2_k4_covariance_identity(k4, k4_lab, k4_spectrum):
    start = time.time()
    cov_dev = max(
        abs(clt.spectral_autocovariance(k4, k4_lab, k, k4_spectrum) - 1 / (4 * (-3.0) ** k))
        for k in range(1, 21)
    )
    laws = walks.exact_weight_laws(walks.walk_chain(k4, k4_lab), range(50, 513))
    var_dev = max(abs(dist.moments(laws[t])[1] - t / 8 - 3 / 32) for t in laws)
    elapsed = time.time() - start
    report(
        "2 (K4 covariance identity)",
        [
            ("covariance k=1..20 within 1e-12", cov_dev <= 1e-12, f"worst {cov_dev:.2e}"),
            ("|Var - t/8 - 3/32| <= 1e-6 on t=50..512", var_dev <= 1e-6, f"worst {var_dev:.2e}"),
            ("runtime < 30 s", elapsed < 30.0, f"{elapsed:.1f}s"),
        ],
    )


def test_criterion_3_variance_formula():
    start = time.time()
    rng = np.random.Generator(np.random.Philox(99))
    configs = []
    for i in range(20):
        n = (8, 12, 16, 20)[i % 4]
        ones = {0: n // 2, 1: n // 4, 2: 3 * n // 4}[i % 3]
        configs.append((n, ones, int(rng.integers(2, 257)), i))
    worst = 0.0
    bounds_ok = True
    checked = 0
    for n, ones, t, seed in configs:
        g = ew.build_random_regular(n, 3, seed=seed)
        s = ew.spectrum(g)
        if s.lambda_star >= 1 - 1e-9:
            continue
        lab = ew.random_labelling(g, ones=ones, seed=seed + 1000)
        formula = clt.variance_formula(g, lab, t, s)
        _, dp_var = dist.moments(ew.exact_weight_law(walks.walk_chain(g, lab), t))
        worst = max(worst, abs(formula - dp_var))
        bounds_ok &= clt.variance_bound_check(g, lab, t, s).holds
        checked += 1
    elapsed = time.time() - start
    report(
        "3 (variance formula)",
        [
            ("formula = DP variance within 1e-10", worst <= 1e-10, f"worst {worst:.2e}"),
            ("deviation bound holds on all", bounds_ok, f"{checked} instances"),
            ("20 instances checked", checked == 20, f"{checked}"),
            ("runtime < 60 s", elapsed < 60.0, f"{elapsed:.1f}s"),
        ],
    )


def test_criterion_4_asymptotic_variance(k4_instance):
    sigma2_dev = abs(k4_instance["sigma2"] - 0.125)
    rate_devs = []
    for p in (-0.5, 0.0, 0.5):
        _, var = dist.moments(ew.exact_weight_law(walks.sticky_chain(p), 4096))
        rate_devs.append(abs(var / 4096 - walks.sticky_variance_rate(p)))
    closed_worst = 0.0
    for p in (-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9):
        laws = walks.exact_weight_laws(walks.sticky_chain(p), range(1, 513))
        for t, law in laws.items():
            _, var = dist.moments(law)
            closed_worst = max(closed_worst, abs(var - walks.sticky_variance_closed_form(p, t)))
    report(
        "4 (asymptotic variance)",
        [
            ("sigma2(K4) = 0.125 within 1e-12", sigma2_dev <= 1e-12, f"dev {sigma2_dev:.2e}"),
            (
                "sticky rate within 1e-3 at t=4096",
                max(rate_devs) <= 1e-3,
                f"worst {max(rate_devs):.2e}",
            ),
            (
                "closed form = DP within 1e-12, t <= 512",
                closed_worst <= 1e-12,
                f"worst {closed_worst:.2e}",
            ),
        ],
    )


def test_criterion_5_lclt_rate(k4_instance, n16_instance, sticky_instance):
    start = time.time()
    checks = []
    for name, inst, mean_rate in (
        ("K4", k4_instance, 0.5),
        ("random n=16", n16_instance, 0.5),
        ("sticky p=1/3", sticky_instance, 0.5),
    ):
        errs = [
            clt.lclt_error_from_law(inst["laws"][t], t * mean_rate, t * inst["sigma2"])
            for t in GRID
        ]
        slope, _ = clt.loglog_fit(GRID, errs)
        checks.append(
            (f"{name} slope in -1.0 +- 0.2", -1.2 <= slope <= -0.8, f"slope {slope:.3f}")
        )
        if name != "sticky p=1/3":
            ratio = errs[-1] * GRID[-1] / (errs[0] * GRID[0])
            checks.append(
                (f"{name} error*t at 4096 <= 1.2x value at 64", ratio <= 1.2, f"ratio {ratio:.3f}")
            )
    elapsed = time.time() - start
    checks.append(("runtime < 5 min", elapsed < 300.0, f"{elapsed:.1f}s"))
    report("5 (pointwise rate)", checks)


def test_criterion_6_tv_rate(k4_instance, n16_instance):
    checks = []
    for name, inst in (("K4", k4_instance), ("random n=16", n16_instance)):
        tvs = [
            clt.tv_to_discretized_normal_from_law(inst["laws"][t], t * 0.5, t * inst["sigma2"])
            for t in GRID
        ]
        slope, _ = clt.loglog_fit(GRID, tvs)
        checks.append(
            (f"{name} slope in -0.5 +- 0.15", -0.65 <= slope <= -0.35, f"slope {slope:.3f}")
        )
    report("6 (TV rate)", checks)


def test_criterion_7_sticky_matching(k4_instance):
    g, lab, s = k4_instance["g"], k4_instance["lab"], k4_instance["s"]
    p = clt.matching_sticky_p(k4_instance["sigma2"])
    p_dev = abs(p - (-1.0 / 3.0))
    sticky_laws = walks.exact_weight_laws(walks.sticky_chain(p), GRID)
    tvs = [dist.tv_distance(k4_instance["laws"][t], sticky_laws[t]) for t in GRID]
    decreasing = all(b < a for a, b in zip(tvs, tvs[1:]))
    slope, _ = clt.loglog_fit(GRID, tvs) if min(tvs) > 0 else (math.inf, 0.0)
    c3 = clt.explicit_constants(s.lambda_star, g.d).c3
    bounded = all(v <= c3 * math.sqrt(math.log(t)) / math.sqrt(t) for t, v in zip(GRID, tvs))
    report(
        "7 (sticky matching)",
        [
            ("p = -1/3 within 1e-12", p_dev <= 1e-12, f"dev {p_dev:.2e}"),
            (
                "TV decreasing with slope <= -0.4",
                decreasing and slope <= -0.4,
                f"slope {slope:.3f}, max TV {max(tvs):.2e} (identical processes)",
            ),
            ("every value under the explicit bound", bounded, f"C3 {c3:.3g}"),
        ],
    )


def test_criterion_8_iid_comparison(k4_instance):
    t = 4096
    tv_iid = dist.tv_distance(k4_instance["laws"][t], dist.binomial_law(t, 0.5))
    reference = dist.tv_distance(
        dist.discretized_normal(t / 2, t / 4).law,
        dist.discretized_normal(t / 2, t * k4_instance["sigma2"]).law,
    )
    dev = abs(tv_iid - reference)
    report(
        "8 (iid comparison)",
        [("|tv_to_iid - normal-pair TV| <= 0.05", dev <= 0.05, f"dev {dev:.4f}")],
    )


def test_criterion_9_inequality_suites(k4, k4_spectrum):
    start = time.time()
    violations = []

    graphs = [ew.build_complete(8), ew.build_random_regular(8, 3, seed=1)]
    for g in graphs:
        s = ew.spectrum(g)
        subsets = [[v for v in range(8) if mask >> v & 1] for mask in range(256)]
        for f1 in subsets:
            if not ew.mixing_corollary_check(g, f1, s).holds:
                violations.append(f"corollary {f1}")
            for f2 in subsets:
                if not ew.mixing_lemma_check(g, f1, f2, s).holds:
                    violations.append(f"mixing {f1} {f2}")

    import itertools

    for ones in itertools.combinations(range(4), 2):
        bits = [1 if v in ones else 0 for v in range(4)]
        ew.find_kstar(k4, ew.Labelling.from_bits(bits), s=k4_spectrum)
    rng = np.random.Generator(np.random.Philox(123))
    for i in range(100):
        n = (8, 12, 16)[i % 3]
        g = ew.build_random_regular(n, 3, seed=2000 + i)
        s = ew.spectrum(g)
        if s.lambda_star >= 1 - 1e-9:
            continue
        ew.find_kstar(g, ew.random_balanced_labelling(g, seed=i), s=s)  # balanced dichotomy
        ones = n // 4 if i % 2 == 0 else 3 * n // 4
        ew.find_kstar(
            g, ew.random_labelling(g, ones=ones, seed=i), balanced=False, s=s
        )  # extended dichotomy

    g8 = graphs[1]
    s8 = ew.spectrum(g8)
    for i in range(50):
        size = int(rng.integers(1, 8))
        subset = rng.permutation(8)[:size]
        gamma = float(rng.integers(1, 129))
        if not ew.walk_chernoff_check(g8, subset, 128, gamma, s8).holds:
            violations.append(f"chernoff {i}")
    for i in range(50):
        n = int(rng.integers(10, 200))
        p = float(rng.uniform(0.05, 0.95))
        x = float(rng.uniform(0.05, 1.0)) * n * p
        if not ew.binomial_tail_check(n, p, x).holds:
            violations.append(f"binomial {i}")
    for mu in np.linspace(0.0, 4.5, 10):
        for sigma2 in np.linspace(1.0, 100.0, 10):
            if not dist.normalizer_bound_check(float(mu), float(sigma2)).holds:
                violations.append(f"normalizer {mu} {sigma2}")

    elapsed = time.time() - start
    report(
        "9 (inequality suites)",
        [
            ("zero violations", not violations, f"{len(violations)} violations"),
            ("runtime < 5 min", elapsed < 300.0, f"{elapsed:.1f}s"),
        ],
    )


def test_criterion_10_parseval(k4_instance, n16_instance, sticky_instance):
    worst = 0.0
    all_hold = True
    for inst in (k4_instance, n16_instance, sticky_instance):
        for t in GRID:
            rep = dist.parseval_check(inst["laws"][t], t * 0.5, t * inst["sigma2"])
            worst = max(worst, rep.lhs)
            all_hold &= rep.holds
    tail_ok = True
    thetas = np.linspace(-math.pi, math.pi, 100)
    for t, sigma2 in ((64, 0.125), (100, 0.25), (144, 0.25)):
        var = t * sigma2
        mu = t / 2
        bound = 2.0 * math.exp(-var) / (1.0 - math.exp(-var))
        for theta in thetas:
            wrapped = dist.wrapped_normal_char(mu, var, float(theta))
            plain = math.exp(-0.5 * var * theta * theta) * complex(
                math.cos(mu * theta), math.sin(mu * theta)
            )
            tail_ok &= abs(wrapped - plain) <= bound + 1e-18
    report(
        "10 (Parseval consistency)",
        [
            ("sum form = quadrature form within 1e-6", all_hold, f"worst {worst:.2e}"),
            ("wrapped-char tail bound pointwise", tail_ok, "3 pairs x 100 thetas"),
        ],
    )


def test_criterion_11_decomposition_suite(k4, k4_lab, k4_spectrum):
    start = time.time()
    t, samples, seed = 200, 100_000, 42
    ks = ew.find_kstar(k4, k4_lab, s=k4_spectrum)
    batch = ew.decomposition_batch(k4, k4_lab, ks, t, samples, seed)
    b_t = int(batch["b_t"])
    pathwise = (
        np.all(batch["z"] == batch["s_prime"] + batch["y"])
        and np.all((0 <= batch["n_tilde"]) & (batch["n_tilde"] <= batch["n_t"]))
        and np.all(batch["n_t"] <= t // 2)
        and np.all(np.abs(batch["s_prime"] - batch["s_full"]) <= b_t)
        and np.all(
            (batch["z"] == batch["s_full"] + batch["y"])[batch["n_tilde"] >= b_t]
        )
    )
    conc = ew.concentration_check(k4, k4_lab, ks, t, samples, seed, s=k4_spectrum)
    defect = ew.defect_estimate(k4, k4_lab, ks, t, samples, seed, s=k4_spectrum)
    chi, corr = ew.sfull_distribution_check(k4, k4_lab, ks, t, samples, seed)
    elapsed = time.time() - start
    report(
        "11 (decomposition suite)",
        [
            ("pathwise invariants on every sample", bool(pathwise), f"{samples} samples"),
            ("concentration holds", conc.holds, f"lhs {conc.lhs:.2e}"),
            ("defect bound holds", defect.holds, f"lhs {defect.lhs:.2e}"),
            ("chi-square holds", chi.holds, f"stat {chi.lhs:.2f} <= {chi.rhs:.2f}"),
            ("|corr(S,Y)| <= 0.02", corr.holds, f"|corr| {corr.lhs:.4f}"),
            ("runtime < 2 min", elapsed < 120.0, f"{elapsed:.1f}s"),
        ],
    )


def test_criterion_12_averaged_variance_lower_bound():
    t = 512
    g = ew.build_random_regular(32, 3, seed=5)
    total = 0.0
    for i in range(200):
        lab = ew.random_balanced_labelling(g, seed=3000 + i)
        _, var = dist.moments(ew.exact_weight_law(walks.walk_chain(g, lab), t))
        total += var
    average = total / 200
    threshold = t / 4 + 0.5 * (1 / 3 - 3 / 31) * t - 5
    report(
        "12 (averaged variance lower bound)",
        [
            (
                "avg DP variance >= t/4 + (1/d - 3/(n-1)) t/2 - 5",
                average >= threshold,
                f"avg {average:.1f} vs {threshold:.1f}",
            )
        ],
    )


def test_criterion_13_cli_determinism(tmp_path, capsys):
    commands = {
        "lclt_curve.csv": [
            "lclt-curve",
            "--graph",
            "random:16:3:seed=1",
            "--labels",
            "balanced:seed=3",
            "--tgrid",
            "64:512:x2",
        ],
        "traces.csv": [
            "decomp-check",
            "--graph",
            "complete:4",
            "--labels",
            "bits:1100",
            "--t",
            "200",
            "--samples",
            "20000",
            "--seed",
            "42",
            "--trace-csv",
        ],
    }
    identical = True
    for fname, argv in commands.items():
        blobs = []
        for run in ("first", "second"):
            out = tmp_path / f"{fname}.{run}"
            assert cli_main(argv + ["--out", str(out)]) == 0
            capsys.readouterr()
            blobs.append((out / fname).read_bytes())
        identical &= blobs[0] == blobs[1]
    report(
        "13 (CLI determinism)",
        [("byte-identical CSV on rerun", identical, f"{len(commands)} commands")],
    )
