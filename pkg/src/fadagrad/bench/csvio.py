"""CSV emission with deterministic formatting.

Floats are printed with 17 significant digits so a round-trip through text
recovers the exact float64 value; RFC-4180 quoting comes from the stdlib
csv writer.  Column order is fixed by the header row.
"""

import csv


def format_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def emit_csv(header, rows, path):
    """Write header + rows; each row may be a dict (keyed by header) or a
    sequence in header order."""
    with open(path, "w", newline="", encoding="ascii") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row.get(col) for col in header]
            writer.writerow([format_value(v) for v in row])
    return path


def read_csv(path):
    """Inverse helper for tests: header plus rows of float-or-string."""
    with open(path, newline="", encoding="ascii") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = []
        for raw in reader:
            row = []
            for cell in raw:
                if cell == "":
                    row.append(None)
                else:
                    try:
                        row.append(float(cell))
                    except ValueError:
                        row.append(cell)
            rows.append(row)
    return header, rows
