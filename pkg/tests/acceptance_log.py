"""Pass/fail lines collected by the acceptance tests, printed at session end."""

RESULTS = []


def record(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok
