"""Acceptance criteria, each at its stated tolerance.

Every criterion is split into sub-checks (one pytest test each); the run ends
with one PASS/FAIL line per criterion.  Run directly with
``python tests/test_acceptance.py`` to get just those lines.
"""

import json
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import jet_vs_fd_sample, random_type1_source, record  # noqa: E402
from ptsusy.cli import main as cli_main  # noqa: E402
from ptsusy.families import (  # noqa: E402
    HyperbolicFamily,
    OscillatorFamily,
    default_half_width,
    family_pair,
    oracle_potential,
    oracle_psi,
    oscillator_z,
    regime_continuity,
)
from ptsusy.sl2 import (  # noqa: E402
    commutator,
    operator_equal,
    quadratic_combination_matrix,
    sl2_generators,
    t_operator_matrix,
)
from ptsusy.spectral import richardson_order  # noqa: E402
from ptsusy.susy import (  # noqa: E402
    GeneratingFunction,
    build_pair,
    partner_potentials,
    pt_defect,
    round_trip_error,
    scaled_constraint_residual,
)
from ptsusy.wavefun import Grid, WavefunctionGrid, psi0, psi1, ratio_check, schrodinger_residual  # noqa: E402

TITLES = {
    1: "harmonic reduction W+ = x",
    2: "PT-oscillator reduction (m = 0)",
    3: "oscillator family m = 1, 2, 3 (a = 2, b = 1)",
    4: "hyperbolic family, four regimes",
    5: "sl(2) identity and commutators",
    6: "property suites",
    7: "Hermitian degeneration",
}


def check(criterion, label, ok, detail):
    record(criterion, TITLES[criterion], label, ok, detail)
    assert ok, f"criterion {criterion} / {label}: {detail}"


def spectrum(tmp_path, *args):
    out = tmp_path / "spectrum.json"
    code = cli_main(["spectrum", *args, "--out", str(out)])
    return code, json.loads(out.read_text())


def eig_detail(doc):
    return ", ".join(
        f"{t['target']:g}: err {t['error']:.1e} |Im| {t['abs_imag']:.1e} it {t['iterations']}"
        for t in doc["results"]["targets"]
    )


def eig_ok(doc, tol):
    return all(t["converged"] and t["error"] <= tol and t["abs_imag"] <= tol for t in doc["results"]["targets"])


# -- 1 -----------------------------------------------------------------------------

def test_criterion_1_potential():
    pair = build_pair(GeneratingFunction.from_expression("x"))
    x = np.linspace(-12, 12, 4801)
    err = float(np.max(np.abs(partner_potentials(pair).vplus(x) - (x**2 / 4 - 0.5))))
    check(1, "V+ = x^2/4 - 1/2", err <= 1e-12, f"max error {err:.1e}")


def test_criterion_1_spectrum(tmp_path):
    t0 = time.perf_counter()
    code, doc = spectrum(tmp_path, "--wplus", "x", "--xmin", "-12", "--xmax", "12", "--n", "4801",
                         "--targets", "0", "1")
    dt = time.perf_counter() - t0
    check(1, "eigenvalues {0, 1} within 5e-4", code == 0 and eig_ok(doc, 5e-4), eig_detail(doc))
    check(1, "runtime < 5 s", dt < 5.0, f"{dt:.2f} s")


# -- 2 -----------------------------------------------------------------------------

def test_criterion_2_reduction(tmp_path):
    fam = OscillatorFamily.pt_oscillator(0.5, 0.0)
    x = np.linspace(-8, 8, 1001)
    err = float(np.max(np.abs(partner_potentials(family_pair(fam)).vplus(x) - (x**2 - 1))))
    check(2, "V = x^2 - 1", err <= 1e-12, f"max error {err:.1e}")
    code, doc = spectrum(tmp_path, "--family", "oscillator", "--m", "0", "--alpha", "0.5", "--c", "0")
    check(2, "alpha=1/2 c=0: {0, 2} within 5e-4", code == 0 and eig_ok(doc, 5e-4), eig_detail(doc))


def test_criterion_2_general(tmp_path):
    code, doc = spectrum(tmp_path, "--family", "oscillator", "--m", "0", "--alpha", "0.75", "--c", "0.5",
                         "--tol-eig", "1e-3")
    ok = code == 0 and eig_ok(doc, 1e-3) and [t["target"] for t in doc["results"]["targets"]] == [0.0, 3.0]
    check(2, "alpha=3/4 c=1/2: {0, 3} within 1e-3", ok, eig_detail(doc))


# -- 3 -----------------------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3])
def test_criterion_3_oracle(m):
    fam = OscillatorFamily(m, 2.0, 1.0)
    V = partner_potentials(family_pair(fam)).vplus
    x = np.linspace(-6, 6, 201)
    vo = oracle_potential(fam, x)
    rel = float(np.max(np.abs(V(x) - vo) / np.maximum(1.0, np.abs(vo))))
    check(3, f"m={m} oracle V+ 1e-10", rel <= 1e-10, f"{rel:.1e}")
    d = pt_defect(V, 0.0, x)
    check(3, f"m={m} PT defect 1e-12", d <= 1e-12, f"{d:.1e}")


@pytest.mark.parametrize("m", [1, 2, 3])
def test_criterion_3_residuals(m):
    """Schrodinger residuals of psi0 and psi1 at n = 4001.

    For m >= 2 the states oscillate like exp(-i b x^(2m+1)/(4m+2)); at
    n = 4001 the five-point stencil cannot resolve that, so these checks are
    expected to fail for m = 2 and m = 3 (see the project notes).
    """
    fam = OscillatorFamily(m, 2.0, 1.0)
    pair = family_pair(fam)
    V = partner_potentials(pair).vplus
    grid = Grid.symmetric(0.0, default_half_width(fam), 4001)
    r0 = schrodinger_residual(V, psi0(pair, grid))
    r1 = schrodinger_residual(V, psi1(pair, grid))
    check(3, f"m={m} residuals 1e-6 at n=4001", max(r0, r1) <= 1e-6, f"psi0 {r0:.1e}, psi1 {r1:.1e}")


@pytest.mark.parametrize("m", [1, 2, 3])
def test_criterion_3_ratio(m):
    fam = OscillatorFamily(m, 2.0, 1.0)
    pair = family_pair(fam)
    grid = Grid.symmetric(0.0, default_half_width(fam), 4001)
    r = ratio_check(psi1(pair, grid), psi0(pair, grid), lambda x: oscillator_z(fam, x))
    check(3, f"m={m} psi1/psi0 ~ z to 1e-8", r <= 1e-8, f"{r:.1e}")


@pytest.mark.parametrize("m", [1, 2, 3])
def test_criterion_3_spectrum(tmp_path, m):
    code, doc = spectrum(tmp_path, "--family", "oscillator", "--m", str(m), "--a", "2", "--b", "1")
    n = doc["results"]["grid"]["n"]
    check(3, f"m={m} spectrum {{0, 2}} within 5e-4", code == 0 and eig_ok(doc, 5e-4), f"n={n}; " + eig_detail(doc))


# -- 4 -----------------------------------------------------------------------------

REGIMES = [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0), (2.0, 1.0)]


def _hyperbolic(B, eps):
    return HyperbolicFamily(1.0, 1.0, B) if B == 0 else HyperbolicFamily(1.0, 1.0, B, eps)


@pytest.mark.parametrize("B, eps", REGIMES)
def test_criterion_4_oracle_and_states(B, eps):
    fam = _hyperbolic(B, eps)
    pair = family_pair(fam)
    V = partner_potentials(pair).vplus
    x = np.linspace(-6, 6, 201)
    vo = oracle_potential(fam, x)
    rel = float(np.max(np.abs(V(x) - vo) / np.maximum(1.0, np.abs(vo))))
    check(4, f"B={B:g} oracle V+ 1e-10", rel <= 1e-10, f"{rel:.1e}")
    grid = Grid.symmetric(0.0, default_half_width(fam), 4001)
    res = [schrodinger_residual(V, WavefunctionGrid(grid, oracle_psi(fam, grid.x, lv), E))
           for lv, E in ((0, 0.0), (1, fam.eps))]
    check(4, f"B={B:g} closed-form residuals 1e-6", max(res) <= 1e-6, f"psi0 {res[0]:.1e}, psi1 {res[1]:.1e}")


@pytest.mark.parametrize("B, eps", REGIMES)
def test_criterion_4_spectrum(tmp_path, B, eps):
    args = ["--family", "hyperbolic", "--A", "1", "--alpha", "1", "--B", str(B), "--tol-eig", "1e-3"]
    if B != 0:
        args += ["--eps", str(eps)]
    code, doc = spectrum(tmp_path, *args)
    check(4, f"B={B:g} spectrum {{0, {eps:g}}} within 1e-3", code == 0 and eig_ok(doc, 1e-3), eig_detail(doc))


def test_criterion_4_continuity():
    gap = regime_continuity(1.0, 1.0, 1e-4)
    check(4, "B -> 0 continuity 1e-3", gap <= 1e-3, f"{gap:.1e}")


# -- 5 -----------------------------------------------------------------------------

def test_criterion_5_identity():
    # (a, b) around the worked case a = 2, b = 1; entries grow like b^4 / a^2,
    # and the absolute 1e-12 bound is about 1e4 ulps of the largest entry here
    rng = np.random.default_rng(5)
    worst = worst_rel = 0.0
    for _ in range(20):
        a, b = rng.uniform(0.5, 3.0), rng.uniform(-2.0, 2.0)
        T = t_operator_matrix(a, b, 8)
        d = operator_equal(T, quadratic_combination_matrix(a, b, 8), 6, 1e-12)[1]
        worst = max(worst, d)
        worst_rel = max(worst_rel, d / float(np.max(np.abs(T.matrix))))
    check(5, "T = quadratic combination, 20 random (a, b)", worst <= 1e-12,
          f"max discrepancy {worst:.1e} (relative {worst_rel:.1e})")


def test_criterion_5_commutators():
    Jp, J0, Jm = sl2_generators(1, 8)
    d = max(
        operator_equal(commutator(J0, Jp), Jp, 6, 1e-13)[1],
        operator_equal(commutator(J0, Jm), -1 * Jm, 6, 1e-13)[1],
        # the printed generators satisfy [J+, J-] = -2 J0 (see the project notes)
        operator_equal(commutator(Jp, Jm), -2 * J0, 6, 1e-13)[1],
    )
    check(5, "commutation relations 1e-13", d <= 1e-13, f"{d:.1e}")


def test_criterion_5_span():
    rng = np.random.default_rng(6)
    ok = True
    for _ in range(20):
        a, b = rng.uniform(0.5, 3.0), rng.uniform(-2.0, 2.0)
        block = t_operator_matrix(a, b, 8).matrix[:, :2]
        eig = sorted(np.linalg.eigvals(block[:2]).real)
        ok &= bool(np.all(block[2:] == 0)) and eig == [0.0, a]
    check(5, "T on span{1, z} has eigenvalues exactly {0, a}", ok, "exact comparison")


# -- 6 -----------------------------------------------------------------------------

def _all_pairs():
    rng = np.random.default_rng(6)
    pairs = [family_pair(f) for f in (
        OscillatorFamily(1, 2.0, 1.0), OscillatorFamily(2, 2.0, 1.0), OscillatorFamily(3, 2.0, 1.0),
        OscillatorFamily.pt_oscillator(0.5, 0.0), OscillatorFamily.pt_oscillator(0.75, 0.5),
        *[_hyperbolic(B, e) for B, e in REGIMES],
    )]
    pairs.append(build_pair(GeneratingFunction.from_expression("x")))
    for _ in range(50):
        pairs.append(build_pair(GeneratingFunction.from_expression(random_type1_source(rng)), float(rng.uniform(0.2, 3))))
    return pairs


def test_criterion_6_constraint_and_round_trip():
    probe = np.linspace(-8, 8, 1001)
    pairs = _all_pairs()
    c = max(scaled_constraint_residual(p, probe) for p in pairs)
    r = max(round_trip_error(p, probe) for p in pairs)
    check(6, f"constraint residual 1e-9 ({len(pairs)} pairs)", c <= 1e-9, f"{c:.1e}")
    check(6, "W+ round trip 1e-10", r <= 1e-10, f"{r:.1e}")


def test_criterion_6_jets():
    w1, w2, redrawn = jet_vs_fd_sample(np.random.default_rng(66))
    check(
        6,
        "jets vs finite differences (1000 expressions)",
        w1 <= 1e-6 and w2 <= 1e-4,
        f"d1 {w1:.1e}, d2 {w2:.1e}, {redrawn} redrawn",
    )


def test_criterion_6_richardson():
    refs = {
        "harmonic": (lambda x: x**2 / 4 - 0.5, 0.0),
        "pt-oscillator": (lambda x: x**2 - 1, 2.0),
        "hyperbolic B=0": (partner_potentials(family_pair(_hyperbolic(0.0, 1.0))).vplus, 1.0),
    }
    g = Grid.symmetric(0.0, 8.0, 401)
    orders = {k: richardson_order(V, t, [g, g.refined(), g.refined().refined()]) for k, (V, t) in refs.items()}
    ok = all(isinstance(o, float) and 1.8 <= o <= 2.2 for o in orders.values())
    check(6, "Richardson order in [1.8, 2.2]", ok, ", ".join(f"{k} {v:.3f}" for k, v in orders.items()))


# -- 7 -----------------------------------------------------------------------------

def test_criterion_7_hermitian():
    x = np.linspace(-8, 8, 1001)
    worst_im = worst_formula = 0.0
    for src in ("x", "x + x^3", "sinh(x)", "2*x + 0.1*sinh(x)", "3*tanh(x) + x"):
        p = build_pair(GeneratingFunction.from_expression(src))
        W, W1 = p.jets(x, 1)
        pots = partner_potentials(p)
        for arr in (W.v, W1.v, pots.vplus(x), pots.vminus(x)):
            worst_im = max(worst_im, float(np.max(np.abs(np.imag(arr)))))
        xs = x[np.abs(x) > 0.1]
        wp = p.gen.jet(xs, 1)
        f, df = wp.v.real, wp.d1.real
        worst_formula = max(
            worst_formula,
            float(np.max(np.abs(p.W(xs).v.real - 0.5 * (f - (df - p.eps) / f)) / np.maximum(1, np.abs(f)))),
            float(np.max(np.abs(p.W1(xs).v.real - 0.5 * (f + (df - p.eps) / f)) / np.maximum(1, np.abs(f)))),
        )
    check(7, "Im W, W1, V+- <= 1e-14", worst_im <= 1e-14, f"{worst_im:.1e}")
    check(7, "real superpotentials match the Hermitian formulas", worst_formula <= 1e-13, f"{worst_formula:.1e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
