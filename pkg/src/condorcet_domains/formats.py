"""Text formats for domains and rule assignments.

Domain file::

    n=4
    1 2 3 4
    2 1 3 4

Rule file (unlisted triples stay unassigned)::

    n=4
    1 2 4 2N3
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .orders import Domain, InvalidArgument
from .rules import NeverRule, RuleAssignment


class ParseError(ValueError):
    """Malformed domain or rule file."""


def _header(lines: list[str], what: str) -> tuple[int, list[str]]:
    body = [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
    if not body or not body[0].startswith("n="):
        raise ParseError(f"{what}: missing 'n=<k>' header")
    try:
        n = int(body[0][2:])
    except ValueError:
        raise ParseError(f"{what}: bad header {body[0]!r}") from None
    return n, body[1:]


def format_domain(d: Domain) -> str:
    lines = [f"n={d.n}"]
    lines += [" ".join(str(int(x)) for x in row) for row in d.orders]
    return "\n".join(lines) + "\n"


def parse_domain(text: str) -> Domain:
    n, body = _header(text.splitlines(), "domain")
    rows = []
    for ln in body:
        try:
            rows.append([int(x) for x in ln.split()])
        except ValueError:
            raise ParseError(f"domain: bad order line {ln!r}") from None
        if len(rows[-1]) != n:
            raise ParseError(f"domain: order {ln!r} does not have {n} alternatives")
    try:
        return Domain(n, np.array(rows, dtype=np.int64).reshape(len(rows), n))
    except InvalidArgument as exc:
        raise ParseError(f"domain: {exc}") from None


def format_rules(asn: RuleAssignment) -> str:
    lines = [f"n={asn.n}"]
    lines += [f"{a} {b} {c} {r}" for (a, b, c), r in asn.rules.items()]
    return "\n".join(lines) + "\n"


def parse_rules(text: str) -> RuleAssignment:
    n, body = _header(text.splitlines(), "rules")
    rules = {}
    for ln in body:
        parts = ln.split()
        if len(parts) != 4:
            raise ParseError(f"rules: expected 'a b c iNj', got {ln!r}")
        try:
            t = tuple(sorted(int(x) for x in parts[:3]))
            rule = NeverRule.parse(parts[3])
        except (ValueError, InvalidArgument):
            raise ParseError(f"rules: bad line {ln!r}") from None
        if t in rules:
            raise ParseError(f"rules: triple {t} assigned twice")
        rules[t] = rule
    try:
        return RuleAssignment(n, rules)
    except InvalidArgument as exc:
        raise ParseError(f"rules: {exc}") from None


def read_domain(path) -> Domain:
    return parse_domain(Path(path).read_text())


def write_domain(path, d: Domain) -> None:
    Path(path).write_text(format_domain(d))


def read_rules(path) -> RuleAssignment:
    return parse_rules(Path(path).read_text())


def write_rules(path, asn: RuleAssignment) -> None:
    Path(path).write_text(format_rules(asn))
