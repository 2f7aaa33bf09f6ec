import pytest

ACCEPTANCE = {
    1: "full-separability thresholds (noisy GHZ / W, legacy A3 <= 1)",
    2: "biseparability thresholds and GHZ-W windows",
    3: "exact sector lengths of reference states",
    4: "purity relation on random states",
    5: "sphere-moment formulas agree; product and Bell values",
    6: "moment-matching observables, Monte Carlo vs analytic (d=3,4)",
    7: "qutrit observable closed form vs main-text values",
    8: "qutrit (S2, S4) region properties",
    9: "bound-entangled states: PPT yet outside the separable region",
    10: "soundness on random separable states (d=2,3,4)",
    11: "biseparability conjecture scan (8 terms, 50 restarts)",
    12: "byte-identical mc / conjecture outputs across runs and threads",
}
RESULTS = {}


@pytest.fixture
def criterion():
    def record(num, ok, detail=""):
        RESULTS[num] = (bool(ok), detail)
        print(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {ACCEPTANCE[num]} | {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title in ACCEPTANCE.items():
        if num in RESULTS:
            ok, detail = RESULTS[num]
            terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {title} | {detail}")
        else:
            terminalreporter.write_line(f"criterion {num:2d} FAIL: {title} | not run or errored")
