ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
