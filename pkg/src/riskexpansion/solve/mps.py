"""MPS interchange text (free-format field layout, names up to 255 characters).

Rows with both bounds finite and distinct are written as ``G`` rows with a
``RANGES`` entry. Constraint rows with no finite bound are written as extra
``N`` rows after the objective; the reader turns every ``N`` row except the
first back into a free row.
"""

from __future__ import annotations

import re

import numpy as np
import scipy.sparse as sp

from ..lp import LinearProgram

MAX_NAME = 255
OBJ_ROW = "COST"
_SECTIONS = ("NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA")


class MPSParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


def _num(v: float) -> str:
    return format(float(v), ".12g")


def _sanitize(names, reserved=()) -> list:
    """Whitespace-free names of at most MAX_NAME characters, unique after truncation."""
    out = []
    seen = set(reserved)
    for raw in names:
        base = re.sub(r"\s+", "_", str(raw)) or "_"
        name = base[:MAX_NAME]
        k = 1
        while name in seen:
            suffix = f"~{k}"
            name = base[: MAX_NAME - len(suffix)] + suffix
            k += 1
        seen.add(name)
        out.append(name)
    return out


def write_interchange(lp: LinearProgram) -> str:
    m, n = lp.shape
    rows = _sanitize(lp.row_names, reserved=(OBJ_ROW,))
    cols = _sanitize(lp.col_names)
    lo, hi = lp.row_lo, lp.row_hi
    lines = [f"NAME          {_sanitize([lp.name])[0]}", "ROWS", f" N  {OBJ_ROW}"]
    kinds = []
    for i in range(m):
        if lo[i] == hi[i]:
            kind = "E"
        elif np.isfinite(lo[i]):
            kind = "G"
        elif np.isfinite(hi[i]):
            kind = "L"
        else:
            kind = "N"
        kinds.append(kind)
        lines.append(f" {kind}  {rows[i]}")

    lines.append("COLUMNS")
    A = lp.A.tocsc()
    for j in range(n):
        if lp.c[j] != 0.0:
            lines.append(f"    {cols[j]}  {OBJ_ROW}  {_num(lp.c[j])}")
        for k in range(A.indptr[j], A.indptr[j + 1]):
            lines.append(f"    {cols[j]}  {rows[A.indices[k]]}  {_num(A.data[k])}")
        if lp.c[j] == 0.0 and A.indptr[j] == A.indptr[j + 1]:
            # keep empty columns so the column set survives the round trip
            lines.append(f"    {cols[j]}  {OBJ_ROW}  0")

    lines.append("RHS")
    if lp.offset != 0.0:
        lines.append(f"    RHS  {OBJ_ROW}  {_num(-lp.offset)}")
    for i, kind in enumerate(kinds):
        rhs = {"E": lo[i], "G": lo[i], "L": hi[i]}.get(kind, 0.0)
        if rhs != 0.0:
            lines.append(f"    RHS  {rows[i]}  {_num(rhs)}")

    lines.append("RANGES")
    for i, kind in enumerate(kinds):
        if kind == "G" and np.isfinite(hi[i]):
            lines.append(f"    RNG  {rows[i]}  {_num(hi[i] - lo[i])}")

    lines.append("BOUNDS")
    for j in range(n):
        l, u = lp.col_lo[j], lp.col_hi[j]
        name = cols[j]
        if l == u:
            lines.append(f" FX BND  {name}  {_num(l)}")
            continue
        if not np.isfinite(l) and not np.isfinite(u):
            lines.append(f" FR BND  {name}")
            continue
        if not np.isfinite(l):
            lines.append(f" MI BND  {name}")
        elif l != 0.0 or (np.isfinite(u) and u < 0):
            lines.append(f" LO BND  {name}  {_num(l)}")
        if np.isfinite(u):
            lines.append(f" UP BND  {name}  {_num(u)}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def read_interchange(text: str) -> LinearProgram:
    section = None
    name = "LP"
    sense = 1.0
    obj = None
    row_names, row_kind, row_index = [], [], {}
    col_names, col_index = [], {}
    cost = {}
    entries = {}
    rhs = {}
    ranges = {}
    lower, upper = {}, {}
    offset = 0.0

    def col_of(lineno, cname):
        if cname not in col_index:
            raise MPSParseError(lineno, f"unknown column {cname!r}")
        return col_index[cname]

    def row_of(lineno, rname):
        if rname not in row_index and rname != obj:
            raise MPSParseError(lineno, f"unknown row {rname!r}")
        return rname

    def number(lineno, tok):
        try:
            return float(tok)
        except ValueError:
            raise MPSParseError(lineno, f"bad number {tok!r}") from None

    ended = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        tokens = raw.split()
        if not raw[0].isspace():
            head = tokens[0]
            if head not in _SECTIONS:
                raise MPSParseError(lineno, f"unknown section {head!r}")
            section = head
            if head == "NAME":
                name = tokens[1] if len(tokens) > 1 else "LP"
            elif head == "OBJSENSE" and len(tokens) > 1:
                sense = -1.0 if tokens[1].upper().startswith("MAX") else 1.0
            elif head == "ENDATA":
                ended = True
                break
            continue

        if section == "OBJSENSE":
            sense = -1.0 if tokens[0].upper().startswith("MAX") else 1.0
        elif section == "ROWS":
            if len(tokens) != 2 or tokens[0] not in ("N", "E", "G", "L"):
                raise MPSParseError(lineno, "ROWS entries need a type (N/E/G/L) and a name")
            kind, rname = tokens
            if kind == "N" and obj is None:
                obj = rname
                continue
            if rname in row_index or rname == obj:
                raise MPSParseError(lineno, f"duplicate row {rname!r}")
            row_index[rname] = len(row_names)
            row_names.append(rname)
            row_kind.append(kind)
        elif section == "COLUMNS":
            if len(tokens) not in (3, 5):
                raise MPSParseError(lineno, "COLUMNS entries need 3 or 5 fields")
            if "'MARKER'" in tokens:
                raise MPSParseError(lineno, "integer markers are not supported")
            cname = tokens[0]
            if cname not in col_index:
                col_index[cname] = len(col_names)
                col_names.append(cname)
            j = col_index[cname]
            for rname, val in zip(tokens[1::2], tokens[2::2]):
                row_of(lineno, rname)
                v = number(lineno, val)
                if rname == obj:
                    cost[j] = cost.get(j, 0.0) + v
                else:
                    key = (row_index[rname], j)
                    entries[key] = entries.get(key, 0.0) + v
        elif section in ("RHS", "RANGES"):
            if len(tokens) not in (3, 5):
                raise MPSParseError(lineno, f"{section} entries need 3 or 5 fields")
            for rname, val in zip(tokens[1::2], tokens[2::2]):
                row_of(lineno, rname)
                v = number(lineno, val)
                if section == "RHS":
                    if rname == obj:
                        offset = -v
                    else:
                        rhs[rname] = v
                else:
                    if rname == obj:
                        raise MPSParseError(lineno, "objective row cannot have a range")
                    ranges[rname] = v
        elif section == "BOUNDS":
            if len(tokens) < 3:
                raise MPSParseError(lineno, "BOUNDS entries need a type, set name and column")
            kind, _, cname = tokens[:3]
            j = col_of(lineno, cname)
            needs_value = kind in ("UP", "LO", "FX")
            if needs_value and len(tokens) != 4:
                raise MPSParseError(lineno, f"bound {kind} needs a value")
            v = number(lineno, tokens[3]) if needs_value else None
            if kind == "UP":
                upper[j] = v
                if v < 0 and j not in lower:
                    lower[j] = -np.inf
            elif kind == "LO":
                lower[j] = v
            elif kind == "FX":
                lower[j] = upper[j] = v
            elif kind == "FR":
                lower[j], upper[j] = -np.inf, np.inf
            elif kind == "MI":
                lower[j] = -np.inf
            elif kind == "PL":
                upper[j] = np.inf
            else:
                raise MPSParseError(lineno, f"unsupported bound type {kind!r}")
        else:
            raise MPSParseError(lineno, "data line outside any section")

    if not ended:
        raise MPSParseError(len(text.splitlines()), "missing ENDATA")

    m, n = len(row_names), len(col_names)
    row_lo = np.full(m, -np.inf)
    row_hi = np.full(m, np.inf)
    for i, (rname, kind) in enumerate(zip(row_names, row_kind)):
        b = rhs.get(rname, 0.0)
        r = ranges.get(rname)
        if kind == "E":
            row_lo[i] = row_hi[i] = b
            if r is not None:
                if r > 0:
                    row_hi[i] = b + r
                else:
                    row_lo[i] = b + r
        elif kind == "G":
            row_lo[i] = b
            if r is not None:
                row_hi[i] = b + abs(r)
        elif kind == "L":
            row_hi[i] = b
            if r is not None:
                row_lo[i] = b - abs(r)
    c = np.zeros(n)
    for j, v in cost.items():
        c[j] = sense * v
    col_lo = np.array([lower.get(j, 0.0) for j in range(n)], dtype=float)
    col_hi = np.array([upper.get(j, np.inf) for j in range(n)], dtype=float)
    if entries:
        keys = sorted(entries)
        ri = [k[0] for k in keys]
        ci = [k[1] for k in keys]
        A = sp.coo_matrix(([entries[k] for k in keys], (ri, ci)), shape=(m, n)).tocsr()
    else:
        A = sp.csr_matrix((m, n))
    return LinearProgram(c=c, A=A, row_lo=row_lo, row_hi=row_hi, col_lo=col_lo, col_hi=col_hi,
                         col_names=col_names, row_names=row_names,
                         offset=sense * offset, name=name)
