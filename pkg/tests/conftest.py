"""Shared test plumbing: collects acceptance pass/fail lines and prints them
after the capture plugin releases stdout."""

ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_sessionfinish(session):
    if ACCEPTANCE_LINES:
        print("\n=== acceptance summary ===")
        for line in ACCEPTANCE_LINES:
            print(line)
