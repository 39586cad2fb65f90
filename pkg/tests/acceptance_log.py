"""Collects one pass/fail line per acceptance criterion."""

LINES: list[str] = []


def report(number: int, title: str, passed: bool, detail: str) -> bool:
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    LINES.append(line)
    print(line)
    return passed
