def pytest_terminal_summary(terminalreporter):
    """One verdict line per acceptance criterion."""
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", []))
            if "criterion" in props and rep.when == "call":
                k = props["criterion"]
                prev = lines.get(k, ("passed", ""))[0]
                worst = outcome if prev == "passed" else prev
                lines[k] = (worst, props.get("detail", ""))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        outcome, detail = lines[k]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {k:>2}: {verdict}  {detail}")
