"""Persistent best-known domains and the table of size functions.

A store is a directory::

    records.jsonl      one JSON record per line, later lines supersede earlier ones
    sizes.txt          size-function table, "n function value exact|lower_bound"
    domains/           domain files referenced by the records
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .analysis import PropertyReport
from .canonical import canonical_form
from .formats import ParseError, read_domain, write_domain
from .orders import Domain, InvalidArgument

FUNCTIONS = ("f", "g", "h", "g_w")
PROVENANCES = ("exhaustive", "extend", "compose_s1", "compose_s2", "fishburn", "imported")
# (smaller, larger) pairs that hold by definition
ORDERINGS = (("g", "h"), ("h", "f"), ("g", "g_w"), ("g_w", "f"))

FISHBURN_SIZES = {
    3: 4, 4: 9, 5: 20, 6: 45, 7: 100, 8: 222, 9: 488, 10: 1069, 11: 2324, 12: 5034,
    13: 10840, 14: 23266, 15: 49704, 16: 105884, 17: 224720, 18: 475773, 19: 1004212,
    20: 2115186, 21: 4443896, 22: 9319702, 23: 19503224, 24: 40750884, 25: 84990640,
}
BEST_KNOWN_SIZES = {
    3: 4, 4: 9, 5: 20, 6: 45, 7: 100, 8: 224, 9: 492, 10: 1104, 11: 2452, 12: 5520,
    13: 12182, 14: 27026, 15: 59430, 16: 131536, 17: 292015, 18: 649079, 19: 1432836,
    20: 3155366, 21: 6674931, 22: 15037178, 23: 33162136, 24: 73279872, 25: 160316046,
}
MAX_WIDTH_PEAK_PIT_SIZES = {3: 4, 4: 9, 5: 20, 6: 45, 7: 100, 8: 222, 9: 488}


class RecordConflict(RuntimeError):
    """An update would lower a best size, or stored data disagree with each other."""


@dataclass(frozen=True)
class SizeValue:
    value: int
    exact: bool


@dataclass
class SizeFunctionTable:
    values: dict[tuple[int, str], SizeValue] = field(default_factory=dict)

    def set(self, n: int, fn: str, value: int, exact: bool) -> None:
        if fn not in FUNCTIONS:
            raise InvalidArgument(f"unknown size function {fn!r}")
        self.values[(int(n), fn)] = SizeValue(int(value), bool(exact))

    def get(self, n: int, fn: str) -> SizeValue | None:
        return self.values.get((n, fn))

    def violations(self) -> list[str]:
        """Ordering constraints contradicted by the table.

        ``left <= right`` is contradicted only when the right-hand value is
        exact and smaller; a lower bound on the right proves nothing.
        """
        out = []
        for n in sorted({k[0] for k in self.values}):
            for lo, hi in ORDERINGS:
                a, b = self.get(n, lo), self.get(n, hi)
                if a is not None and b is not None and b.exact and a.value > b.value:
                    out.append(f"n={n}: {lo}={a.value} exceeds exact {hi}={b.value}")
        return out

    def verify(self) -> None:
        bad = self.violations()
        if bad:
            raise RecordConflict("; ".join(bad))

    def to_text(self) -> str:
        lines = []
        for (n, fn), v in sorted(self.values.items(), key=lambda kv: (kv[0][0], FUNCTIONS.index(kv[0][1]))):
            lines.append(f"{n} {fn} {v.value} {'exact' if v.exact else 'lower_bound'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SizeFunctionTable":
        table = cls()
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            parts = ln.split()
            if len(parts) != 4 or parts[3] not in ("exact", "lower_bound"):
                raise ParseError(f"size table: bad line {ln!r}")
            try:
                table.set(int(parts[0]), parts[1], int(parts[2]), parts[3] == "exact")
            except (ValueError, InvalidArgument):
                raise ParseError(f"size table: bad line {ln!r}") from None
        return table

    @classmethod
    def known(cls) -> "SizeFunctionTable":
        """Known values: exact maxima up to n = 8 (g also at 9), lower bounds beyond."""
        table = cls()
        for n, size in BEST_KNOWN_SIZES.items():
            exact = n <= 8
            table.set(n, "f", size, exact)
            table.set(n, "h", size, exact)
        for n, size in MAX_WIDTH_PEAK_PIT_SIZES.items():
            table.set(n, "g", size, True)
            if n <= 8:
                table.set(n, "g_w", size, True)
        return table


@dataclass
class RecordEntry:
    n: int
    size: int
    domain_path: str
    canonical_hash: str
    properties: dict = field(default_factory=dict)
    provenance: str = "imported"
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise InvalidArgument(f"unknown provenance {self.provenance!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RecordEntry":
        try:
            data = json.loads(line)
            return cls(**data)
        except (json.JSONDecodeError, TypeError) as exc:
            raise ParseError(f"record: {exc}") from None


class RecordStore:
    """Best domain per n, plus a size-function table, kept under one directory."""

    def __init__(self, root):
        self.root = Path(root)
        self.entries: dict[int, RecordEntry] = {}
        self.table = SizeFunctionTable.known()
        self.load()

    @property
    def log_path(self) -> Path:
        return self.root / "records.jsonl"

    @property
    def table_path(self) -> Path:
        return self.root / "sizes.txt"

    def load(self) -> None:
        self.entries = {}
        if self.table_path.exists():
            self.table = SizeFunctionTable.from_text(self.table_path.read_text())
        self.table.verify()
        if not self.log_path.exists():
            return
        for ln in self.log_path.read_text().splitlines():
            if not ln.strip():
                continue
            entry = RecordEntry.from_json(ln)
            d = read_domain(self.root / entry.domain_path)
            if len(d) != entry.size or d.n != entry.n:
                raise RecordConflict(f"{entry.domain_path}: stored size {entry.size}, file has {len(d)}")
            if canonical_form(d).digest != entry.canonical_hash:
                raise RecordConflict(f"{entry.domain_path}: canonical hash mismatch")
            self.entries[entry.n] = entry
        for n, entry in self.entries.items():
            known = self.table.get(n, "f")
            if known is None or entry.size > known.value:
                self.table.set(n, "f", entry.size, False)

    def best_size(self, n: int) -> int | None:
        """Largest size known for ``n``, from the stored domains or the table."""
        sizes = [self.entries[n].size] if n in self.entries else []
        v = self.table.get(n, "f")
        if v is not None:
            sizes.append(v.value)
        return max(sizes) if sizes else None

    def domain(self, n: int) -> Domain:
        return read_domain(self.root / self.entries[n].domain_path)

    def add(self, d: Domain, provenance: str, parameters: dict | None = None,
            properties: PropertyReport | dict | None = None) -> RecordEntry:
        best = self.best_size(d.n)
        if best is not None and best > len(d):
            raise RecordConflict(f"n={d.n}: size {len(d)} would lower the record {best}")
        known = self.table.get(d.n, "f")
        if known is not None and known.exact and len(d) > known.value:
            raise RecordConflict(f"n={d.n}: size {len(d)} exceeds the exact maximum {known.value}")
        form = canonical_form(d)
        rel = f"domains/n{d.n}_{form.digest[:16]}.txt"
        (self.root / "domains").mkdir(parents=True, exist_ok=True)
        write_domain(self.root / rel, d)
        if isinstance(properties, PropertyReport):
            properties = properties.to_dict()
        entry = RecordEntry(d.n, len(d), rel, form.digest, properties or {}, provenance, parameters or {})
        with self.log_path.open("a") as fh:
            fh.write(entry.to_json() + "\n")
        self.entries[d.n] = entry
        if known is None or len(d) > known.value:
            self.table.set(d.n, "f", len(d), False)
        return entry

    def save_table(self) -> None:
        self.table.verify()
        self.root.mkdir(parents=True, exist_ok=True)
        self.table_path.write_text(self.table.to_text())

    def import_table(self, text: str) -> None:
        table = SizeFunctionTable.from_text(text)
        table.verify()
        self.table = table
        self.save_table()
