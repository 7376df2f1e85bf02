import pytest

CRITERIA = {
    1: "periodic chains match the closed form",
    2: "special boundaries match the region conditions",
    3: "short chains match the short-chain statements",
    4: "cut-and-paste dimension shift",
    5: "structural identities",
    6: "independence of the couplings",
    7: "tic-tac-toe reproduces the cohomology",
    8: "numeric zero modes (advisory)",
}

_results = pytest.StashKey[dict]()
_report = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_results] = {}
    config.stash[_report] = []


@pytest.fixture
def record_criterion(request):
    """record(number, ok, summary, details="") stores a verdict and its report section."""
    config = request.config

    def record(number: int, ok: bool, summary: str, details: str = "") -> None:
        config.stash[_results][number] = (ok, summary)
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {CRITERIA[number]}: {summary}"
        print(line)
        config.stash[_report].append(f"## {line}\n\n{details}".rstrip() + "\n")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_results, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in CRITERIA.items():
        if number in results:
            ok, summary = results[number]
            terminalreporter.write_line(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {summary}")
        else:
            terminalreporter.write_line(f"criterion {number} [FAIL] {title}: not run or errored before a verdict")
    sections = config.stash[_report]
    path = config.rootpath / "acceptance_report.md"
    path.write_text("# Acceptance report\n\n" + "\n".join(sections))
    terminalreporter.write_line(f"details written to {path.name}")
