import numpy as np
import pytest

from ptsusy.expr import BinOp, Call, ImagUnit, Neg, Num, Pow, Var

SAFE_FUNCTIONS = ("exp", "sin", "cos", "sinh", "cosh", "tanh")


def random_expression(rng: np.random.Generator, depth: int = 3, real: bool = False):
    """A random smooth expression tree with no singular points on the real line.

    Function arguments and denominators are built from real-valued subtrees
    (no ``i``), so the complex poles of tanh and of 1/(2 + u^2) stay off the
    real axis.  Division is only ever by (2 + u^2), and transcendental
    functions other than tanh see arguments squashed into (-1.5, 1.5).
    """
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.5:
            return Var()
        if r < 0.85 or real:
            return Num(float(np.round(rng.uniform(-2, 2), 3)))
        return ImagUnit()
    kind = rng.integers(0, 7)
    sub = lambda: random_expression(rng, depth - 1, real)  # noqa: E731
    real_sub = lambda: random_expression(rng, depth - 1, True)  # noqa: E731
    if kind == 0:
        return BinOp("+", sub(), sub())
    if kind == 1:
        return BinOp("-", sub(), sub())
    if kind == 2:
        return BinOp("*", sub(), sub())
    if kind == 3:
        return BinOp("/", sub(), BinOp("+", Num(2.0), Pow(real_sub(), Num(2.0))))
    if kind == 4:
        return Pow(sub(), Num(float(rng.integers(0, 4))))
    if kind == 5:
        return Neg(sub())
    name = str(rng.choice(SAFE_FUNCTIONS))
    if name == "tanh":
        return Call(name, real_sub())
    # squash the argument so exp/cosh cannot overflow and sin/cos cannot
    # oscillate faster than a finite-difference step can follow
    return Call(name, BinOp("*", Num(1.5), Call("tanh", real_sub())))


def random_type1_source(rng: np.random.Generator) -> str:
    """W+ = f + i g with f odd-ish and increasing, g(0) != 0."""
    p1 = round(float(rng.uniform(0.5, 3.0)), 3)
    p3 = round(float(rng.uniform(0.0, 0.5)), 3)
    q = round(float(rng.uniform(0.2, 1.0)), 3)
    c0 = round(float(rng.uniform(0.2, 2.0)) * (1 if rng.random() < 0.5 else -1), 3)
    c1 = round(float(rng.uniform(-0.5, 0.5)), 3)
    g_terms = [f"{c0}", f"{c1}*tanh({q}*x)", f"{round(float(rng.uniform(0, 0.3)), 3)}*cos({q}*x)"]
    f_terms = [f"{p1}*x", f"{p3}*x^3"]
    if rng.random() < 0.5:
        f_terms.append(f"{q}*sinh({q}*x)")
    return " + ".join(f_terms) + " + i*(" + " + ".join(g_terms) + ")"


def fd_derivatives(f, x: float, h: float, rel: float = 1e-6):
    """Central differences (d1, d2) of f at x with step h, or None when
    the difference quotients themselves cannot be trusted at that accuracy.

    Trust requires the rounding bound 1e-16 max|f| / h (resp. / h^2) and the
    h-versus-2h disagreement to stay well below the tolerance being tested.
    Only values of f are used, never its jets.
    """
    f2 = [f(x + k * h) for k in (-2, -1, 0, 1, 2)]
    big = max(abs(v) for v in f2)
    d1 = (f2[3] - f2[1]) / (2 * h)
    d1_wide = (f2[4] - f2[0]) / (4 * h)
    d2 = (f2[3] - 2 * f2[2] + f2[1]) / h**2
    d2_wide = (f2[4] - 2 * f2[2] + f2[0]) / (4 * h * h)
    if 1e-16 * big / h > 0.1 * rel * (1 + abs(d1)) or abs(d1 - d1_wide) > 0.1 * rel * (1 + abs(d1)):
        return None
    if 1e-16 * big / h**2 > 0.1 * 1e-4 * (1 + abs(d2)) or abs(d2 - d2_wide) > 0.1 * 1e-4 * (1 + abs(d2)):
        return None
    return d1, d2


def jet_vs_fd_sample(rng: np.random.Generator, count: int = 1000, depth: int = 6, span: float = 3.0):
    """Worst errors of eval_jet against central differences over ``count`` usable samples.

    Each sample is a random tree of depth <= ``depth`` at x uniform in
    [-span, span] with step h = 1e-5 (1 + |x|).  Errors are |fd - jet| / (1 + |jet|).
    Samples the difference oracle cannot resolve (see fd_derivatives), or where
    the function overflows, are redrawn and counted.
    Returns (worst d1 error, worst d2 error, number redrawn).
    """
    from ptsusy.errors import EvaluationError
    from ptsusy.expr import eval_jet

    worst1 = worst2 = 0.0
    redrawn = used = 0
    while used < count:
        node = random_expression(rng, depth)
        x = float(rng.uniform(-span, span))
        h = 1e-5 * (1 + abs(x))
        try:
            fd = fd_derivatives(lambda t: complex(eval_jet(node, t, 0).v), x, h)
        except EvaluationError:
            fd = None
        if fd is None:
            redrawn += 1
            continue
        used += 1
        j = eval_jet(node, x, 2)
        d1, d2 = complex(j.d1), complex(j.d2)
        worst1 = max(worst1, abs(fd[0] - d1) / (1 + abs(d1)))
        worst2 = max(worst2, abs(fd[1] - d2) / (1 + abs(d2)))
    return worst1, worst2, redrawn


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary --------------------------------------------------------
# test_acceptance records (criterion, label, ok, detail) here; one PASS/FAIL
# line per criterion is printed at the end of the run.

ACCEPTANCE = {}


def record(criterion: int, title: str, label: str, ok: bool, detail: str) -> None:
    entry = ACCEPTANCE.setdefault(criterion, {"title": title, "parts": []})
    entry["parts"].append((label, bool(ok), detail))


def acceptance_lines():
    lines = []
    for k in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[k]
        ok = all(p[1] for p in entry["parts"])
        failed = [f"{label} ({detail})" for label, good, detail in entry["parts"] if not good]
        tail = "" if ok else " -- failing: " + "; ".join(failed)
        lines.append(f"{'PASS' if ok else 'FAIL'} criterion {k}: {entry['title']}{tail}")
    return lines


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines():
        terminalreporter.write_line(line)
