#!/usr/bin/env python3
"""Regenerates core/src/uppercase_ranges.inc from the unicodedata Lu category."""

import sys
import unicodedata


def lu_ranges():
    ranges = []
    lo = None
    prev = None
    for cp in range(0x110000):
        if unicodedata.category(chr(cp)) == "Lu":
            if lo is None:
                lo = cp
            prev = cp
        elif lo is not None:
            ranges.append((lo, prev))
            lo = None
    if lo is not None:
        ranges.append((lo, prev))
    return ranges


def main():
    out = sys.stdout
    ranges = lu_ranges()
    out.write("// Generated by tools/gen_uppercase_ranges.py (Unicode %s, category Lu).\n" % unicodedata.unidata_version)
    out.write("// clang-format off\n")
    out.write("static constexpr CodepointRange kUppercaseRanges[] = {\n")
    for i in range(0, len(ranges), 4):
        chunk = ranges[i : i + 4]
        out.write("    " + " ".join("{0x%05X, 0x%05X}," % r for r in chunk) + "\n")
    out.write("};\n")
    out.write("// clang-format on\n")


if __name__ == "__main__":
    main()
