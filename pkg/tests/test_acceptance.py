"""Acceptance criteria at default scale (seed 42, dims 2,3,4,6, 200 samples).

Each test prints one ``PASS``/``FAIL`` line.  The registry is run once per
module and shared; the determinism check runs it a second time.  Expect several
minutes on one core.
"""

import pytest

from tsallis_ops import corpus as corp
from tsallis_ops.cli import to_json
from tsallis_ops.properties import PROPERTIES, SuiteConfig, run_all
from tsallis_ops.suites import convergence_suite, kron_power_suite, scalar_lemma_suite

pytestmark = pytest.mark.slow

CONFIG = SuiteConfig()


def _line(capsys, n: int, title: str, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\n[acceptance {n:2}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
    assert ok, detail


def _summary(reports) -> str:
    return ", ".join(f"{r.property} worst={r.worst_margin:.2e}" for r in reports)


@pytest.fixture(scope="module")
def registry():
    return {r.property: r for r in run_all(CONFIG)}


def _full_json(reports) -> str:
    docs = [r.to_dict() for r in reports]
    for d in docs:
        d.pop("wall_ms")
    return to_json(docs)


def test_01_scalar_lemmas(capsys):
    rep = scalar_lemma_suite(CONFIG)
    _line(capsys, 1, "scalar lemmas on a 200-point log grid, atol 1e-12", rep.passed,
          f"{rep.cases} checks, worst margin {rep.worst_margin:.2e}, {len(rep.failures)} violations")


def test_02_kron_power(capsys):
    rep = kron_power_suite(CONFIG)
    _line(capsys, 2, "Kronecker power identity, relative residual <= 1e-9", rep.passed,
          f"{rep.cases} cells, worst margin {rep.worst_margin:.2e}")


def test_03_registry(capsys, registry):
    ok = len(registry) == 19 and all(r.passed for r in registry.values())
    worst = min(registry.values(), key=lambda r: r.worst_margin)
    recorded = all("worst_margin" in r.to_dict() for r in registry.values())
    _line(capsys, 3, "19 registered Loewner properties, margin >= -tol", ok and recorded,
          f"{sum(r.passed for r in registry.values())}/{len(registry)} pass; "
          f"lowest margin {worst.worst_margin:.2e} ({worst.property})")


def test_04_tensor_identities(capsys, registry):
    names = ("tensor_equality", "lnlambda_tensor_identity", "rel_entropy_tensor")
    reps = [registry[n] for n in names]
    _line(capsys, 4, "tensor equality, ln_lambda tensor identity, lambda=1e-6 limit within 1e-4",
          all(r.passed for r in reps), _summary(reps))


def test_05_pseudoadditivity(capsys, registry):
    reps = [registry["pseudoadditivity_entropy"], registry["pseudoadditivity_rel_entropy"]]
    _line(capsys, 5, "pseudoadditivity within 1e-10, maximally mixed closed form within 1e-12",
          all(r.passed for r in reps), _summary(reps))


def test_06_trace_inequality(capsys, registry):
    rep = registry["trace_inequality_gHP"]
    _line(capsys, 6, "trace inequality on random density pairs, commuting equality within 1e-10",
          rep.passed, f"{rep.cases} cases, worst margin {rep.worst_margin:.2e}")


def test_07_convergence(capsys):
    rep = convergence_suite(CONFIG)
    _line(capsys, 7, "||T_lam - S|| decreasing and <= C lam within a factor 3", rep.passed,
          f"{rep.cases} instances, worst log-ratio slack {rep.worst_margin:.3f}")


def test_08_tightness_and_separation(capsys, registry):
    reps = [registry["two_sided_bounds"], registry["alpha_bounds"], registry["mu_lower_bound"]]
    _line(capsys, 8, "equality inputs tight to 1e-10 scale, separated inputs above 1e-6 scale",
          all(r.passed for r in reps), _summary(reps))


def test_09_determinism(capsys, registry):
    first = _full_json(list(registry.values()))
    second = _full_json(run_all(CONFIG))
    _line(capsys, 9, "two seed-42 runs give identical JSON apart from wall_ms", first == second,
          f"{len(first)} bytes compared")


def test_10_corpus_matches_registry(capsys, registry):
    verdicts = corp.run_corpus(corp.load_corpus(), CONFIG)
    table = corp.compare(list(registry.values()), verdicts)
    bad = [c.property for c in table if not c.matches]
    lines = sum(len(v.lines) for v in verdicts)
    _line(capsys, 10, "statement corpus verdicts match the registry claim for claim", not bad,
          f"{lines} statements over {len(verdicts)} claims; mismatches: {bad or 'none'}")
    assert {c.property for c in table} == set(PROPERTIES)
