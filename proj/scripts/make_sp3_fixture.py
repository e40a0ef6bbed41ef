#!/usr/bin/env python3
"""Writes the one-day SP3-c test fixture and a perturbed lattice file.

The fixture is written directly from the SP3-c column layout, without the
library, so parser tests check against an independent writer.
"""
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"

SATS = ["G01", "G08", "R05"]
BAD = ("R05", 10)  # satellite and epoch index carrying the bad-value sentinel


def position(sat, t):
    k = SATS.index(sat)
    u = 2 * math.pi * t / (11.967 * 3600) + 0.7 * k
    r = 26560.0 - 1000.0 * k
    return (r * math.cos(u), r * math.sin(u) * 0.57, r * math.sin(u) * 0.82)


def fixture():
    lines = [
        "#cP2024  1  7  0  0  0.00000000      96 ORBIT IGS14 FIT  TST",
        "## 2296      0.00000000   900.00000000 60316 0.0000000000000",
    ]
    sat_row = "".join(SATS) + "  0" * (17 - len(SATS))
    lines.append("+    %d   %s" % (len(SATS), sat_row))
    for _ in range(4):
        lines.append("+        " + "  0" * 17)
    lines.append("++       " + "  2" * len(SATS) + "  0" * (17 - len(SATS)))
    for _ in range(4):
        lines.append("++       " + "  0" * 17)
    lines += [
        "%c M  cc GPS ccc cccc cccc cccc cccc ccccc ccccc ccccc ccccc",
        "%c cc cc ccc ccc cccc cccc cccc cccc ccccc ccccc ccccc ccccc",
        "%f  1.2500000  1.025000000  0.00000000000  0.000000000000000",
        "%f  0.0000000  0.000000000  0.00000000000  0.000000000000000",
        "%i    0    0    0    0      0      0      0      0         0",
        "%i    0    0    0    0      0      0      0      0         0",
        "/* one-day fixture for parser tests",
        "/*",
        "/*",
        "/*",
    ]
    for i in range(96):
        t = 900 * i
        lines.append("*  2024  1  7 %2d %2d  0.00000000" % (t // 3600, (t % 3600) // 60))
        for s in SATS:
            if (s, i) == BAD:
                lines.append("P%s%14.6f%14.6f%14.6f%14.6f" % (s, 0.0, 0.0, 0.0, 999999.999999))
            else:
                x, y, z = position(s, t)
                lines.append("P%s%14.6f%14.6f%14.6f%14.6f" % (s, x, y, z, 12.345678 + i * 1e-6))
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def lattice():
    pts = [float(j) for j in range(41)]
    pts[17] += 0.25
    return "# 41 points, x_17 moved by a quarter step\n" + "".join("%.17g\n" % p for p in pts)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "fixture_day.sp3").write_text(fixture())
    (OUT / "lattice_perturbed.txt").write_text(lattice())
