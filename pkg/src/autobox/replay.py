"""Keystroke-replay evaluation: run test tuples, classify, report.

A test is (base file, offset, span, fragment, composition): load the
base, jump to the offset, delete span characters in one edit, then type
the fragment one character at a time with the full pipeline on every
keypress.  The end state maps to exactly one of six categories, four of
which count as acceptable.
"""

import json
import os
import time
from decimal import Decimal, ROUND_HALF_UP

from .errors import AutoboxError
from .heuristics import AutoboxConfig, Decision
from .session import Session

CATEGORIES = [
    "complete_insertion",
    "partial_insertion_no_errors",
    "partial_insertion_errors",
    "no_insertion_valid",
    "no_insertion_errors",
    "no_insertion_multi",
]

ACCEPTABLE = {
    "complete_insertion",
    "partial_insertion_no_errors",
    "no_insertion_valid",
    "no_insertion_multi",
}


class TestCase:
    def __init__(self, base_file, offset, span, fragment, composition):
        if not fragment:
            raise AutoboxError("test fragment must be non-empty")
        self.base_file = base_file
        self.offset = offset
        self.span = span
        self.fragment = fragment
        self.composition = composition

    @classmethod
    def from_dict(cls, d, root="."):
        return cls(os.path.join(root, d["base_file"]), int(d["offset"]),
                   int(d["span"]), d["fragment"], d["composition"])

    def __repr__(self):
        return "TestCase(%s @%d-%d %r)" % (os.path.basename(self.base_file),
                                           self.offset, self.offset + self.span,
                                           self.fragment[:20])


class Outcome:
    def __init__(self, category, box_span, per_keypress_times, error_positions):
        self.category = category
        self.box_span = box_span
        self.per_keypress_times = per_keypress_times
        self.error_positions = error_positions

    @property
    def acceptable(self):
        return self.category in ACCEPTABLE

    def __repr__(self):
        return "Outcome(%s, span=%d)" % (self.category, self.box_span)


def load_manifest(path):
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    root = os.path.dirname(os.path.abspath(path))
    return [TestCase.from_dict(e, root) for e in entries]


def run_test(tc, compositions, config=None, timing=False):
    """Replay one test tuple and classify the end state."""
    if tc.composition not in compositions:
        raise AutoboxError("unknown composition %r" % tc.composition)
    with open(tc.base_file, encoding="utf-8") as fh:
        base = fh.read()
    if tc.offset + tc.span > len(base):
        raise AutoboxError("test span outside base file %r" % tc.base_file)
    session = Session(compositions[tc.composition],
                      config or AutoboxConfig())
    session.load(base)
    session.move(tc.offset)
    if tc.span:
        session.edit(tc.offset, tc.span, "")
    times = []
    for ch in tc.fragment:
        t0 = time.perf_counter()
        session.key(ch)
        if timing:
            times.append(time.perf_counter() - t0)
    category, box_span = classify(session, tc.offset, len(tc.fragment))
    errors = [e["pos"] for e in session.error_list()]
    return Outcome(category, box_span, times, errors)


def classify(session, frag_start, frag_len):
    """Map a finished replay to one of the six categories.

    Complete insertion needs a single box exactly spanning the fragment
    and an error-free document; other overlapping boxes are partial.
    With no box at all, a final present-style decision means multiple
    candidates were offered, otherwise the document's error state decides.
    """
    frag_end = frag_start + frag_len
    errors = session.error_list()
    boxes = [b for b in session.box_list()
             if b["start"] < frag_end and b["end"] > frag_start]
    covered = sum(min(b["end"], frag_end) - max(b["start"], frag_start)
                  for b in boxes)
    if boxes:
        exact = (len(boxes) == 1 and boxes[0]["start"] == frag_start
                 and boxes[0]["end"] == frag_end)
        if exact and not errors:
            return "complete_insertion", covered
        if errors:
            return "partial_insertion_errors", covered
        return "partial_insertion_no_errors", covered
    if session.last_decision.kind in (Decision.PRESENT, Decision.PRESENT_RESIZE):
        return "no_insertion_multi", 0
    if errors:
        return "no_insertion_errors", 0
    return "no_insertion_valid", 0


# -- reports -------------------------------------------------------------------

def pct(n, total):
    """Percentage rounded half-up to one decimal, as a string."""
    if total == 0:
        return "0.0"
    val = Decimal(n) * 100 / Decimal(total)
    return str(val.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def emit_report(results, report_dir, timing=False):
    """Write acceptable-by-composition and category-breakdown tables.

    results maps heuristic name -> list of (TestCase, Outcome).  Both
    tables are written as CSV and aligned text; a timing CSV is added
    when requested.  Returns the list of files written.
    """
    os.makedirs(report_dir, exist_ok=True)
    written = []
    heuristics = [h for h in ("all", "parse_tree", "stack", "line")
                  if h in results]

    comps = sorted({tc.composition for h in heuristics for tc, _ in results[h]})
    header = ["heuristic"] + comps + ["Overall"]
    rows = [header]
    counts = ["# Tests"]
    first = heuristics[0]
    for comp in comps:
        counts.append(str(sum(1 for tc, _ in results[first] if tc.composition == comp)))
    counts.append(str(len(results[first])))
    rows.append(counts)
    for h in heuristics:
        row = [h]
        for comp in comps:
            sub = [o for tc, o in results[h] if tc.composition == comp]
            row.append(pct(sum(1 for o in sub if o.acceptable), len(sub)))
        row.append(pct(sum(1 for _, o in results[h] if o.acceptable),
                       len(results[h])))
        rows.append(row)
    written += _write_table(rows, report_dir, "acceptable_by_composition")

    rows = [["heuristic"] + CATEGORIES]
    for h in heuristics:
        total = len(results[h])
        row = [h]
        for cat in CATEGORIES:
            row.append(pct(sum(1 for _, o in results[h] if o.category == cat),
                           total))
        rows.append(row)
    written += _write_table(rows, report_dir, "category_breakdown")

    if timing:
        path = os.path.join(report_dir, "timing.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("heuristic,test,composition,keypresses,mean_s,max_s\n")
            for h in heuristics:
                for i, (tc, o) in enumerate(results[h]):
                    ts = o.per_keypress_times
                    mean = sum(ts) / len(ts) if ts else 0.0
                    mx = max(ts) if ts else 0.0
                    fh.write("%s,%d,%s,%d,%.6f,%.6f\n"
                             % (h, i, tc.composition, len(ts), mean, mx))
        written.append(path)
    return written


def _write_table(rows, report_dir, name):
    csv_path = os.path.join(report_dir, name + ".csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(",".join(row) + "\n")
    txt_path = os.path.join(report_dir, name + ".txt")
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    with open(txt_path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write("  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    return [csv_path, txt_path]
