#!/usr/bin/env python3
"""Writes fixtures/records.csv: 40 synthetic students.

Every student with Calculus I at 3.7 or above has Applied Mathematics at 3.3
or above (12 students, two of them at exactly 3.3). Other grades are random.
"""
import random
import sys

GRADES = [2.0, 2.3, 2.7, 3.0, 3.3, 3.7, 4.0]
OTHER = ["ITC1010", "ITC2088", "ENG1010", "ITC2197"]


def main(path):
    rng = random.Random(7)
    rows = []
    for n in range(40):
        sid = f"S{n + 1:03d}"
        strong = n < 12
        calc = rng.choice([3.7, 4.0]) if strong else rng.choice(GRADES[:5])
        if strong:
            applied = 3.3 if n < 2 else rng.choice([3.7, 4.0])
        else:
            applied = rng.choice(GRADES)
        grades = {"MA2010": calc, "MA2025": applied}
        for code in OTHER:
            if rng.random() < 0.8:
                grades[code] = rng.choice(GRADES)
        for code in sorted(grades):
            rows.append(f"{sid},{code},{grades[code]}")
    with open(path, "w") as f:
        f.write("student_id,code,grade\n")
        f.write("\n".join(rows) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/records.csv")
