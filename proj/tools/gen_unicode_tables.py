#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc from Python's unicodedata.

Usage: python3 tools/gen_unicode_tables.py > src/unicode_tables.inc
"""
import sys
import unicodedata

# Must match convabuse::CharClass in include/convabuse/unicode.hpp.
OTHER, UPPER, LETTER, DIGIT, PUNCT, SPACE, SYMBOL = range(7)
EXTRA_SPACE = {0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x85}


def classify(cp):
    if cp in EXTRA_SPACE:
        return SPACE
    cat = unicodedata.category(chr(cp))
    if cat == "Lu":
        return UPPER
    if cat[0] == "L":
        return LETTER
    if cat == "Nd":
        return DIGIT
    if cat[0] == "P":
        return PUNCT
    if cat[0] == "Z":
        return SPACE
    if cat[0] == "S":
        return SYMBOL
    return OTHER


def main():
    out = sys.stdout
    out.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
              % unicodedata.unidata_version)
    ranges = []
    start, cur = 0, classify(0)
    for cp in range(1, 0x110000):
        c = classify(cp)
        if c != cur:
            ranges.append((start, cp - 1, cur))
            start, cur = cp, c
    ranges.append((start, 0x10FFFF, cur))
    ranges = [r for r in ranges if r[2] != OTHER]
    out.write("constexpr ClassRange kClassRanges[] = {\n")
    for lo, hi, c in ranges:
        out.write("    {0x%X, 0x%X, %d},\n" % (lo, hi, c))
    out.write("};\n\n")
    out.write("constexpr CaseMapping kLowerMappings[] = {\n")
    for cp in range(0x110000):
        low = chr(cp).lower()
        if len(low) == 1 and ord(low) != cp:
            out.write("    {0x%X, 0x%X},\n" % (cp, ord(low)))
    out.write("};\n")


if __name__ == "__main__":
    main()
