#!/usr/bin/env python3
"""Generate the 161-row observed-configuration fixture.

Only aggregate reference tables are available, so this script
constructs a row-level dataset consistent with all of them at once:

  * top-5 parameter clusters: (3,4096)x33, (3,65536)x28, (2,19456)x11,
    (1,65536)x10, (2,65536)x9
  * 75 weaker / 86 stronger under the default two-rung anchor fit
  * age bands x strength   = [[38,23,14],[25,33,28]]
  * type x strength        = [[4,6,65],[11,16,59]]   (sensitive/app/component)
  * star bands x strength  = [[13,12,28,22],[25,22,17,22]]

Only two-way tables against strength are pinned, so joint
assignments across the other attributes are free; they are dealt out
deterministically.

Writes tests/fixtures/params/argon2_params_161.csv.
"""

import csv
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from hashecon.paramclass import (  # noqa: E402
    STRONGER,
    WEAKER,
    Argon2Config,
    classify,
    fit_loglog,
    load_anchor_csv,
)

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "params"

# (t, memory_kib) x multiplicity; weaker/stronger checked against the fit
TOP5 = [((3, 4096), 33), ((3, 65536), 28), ((2, 19456), 11),
        ((1, 65536), 10), ((2, 65536), 9)]
# filler clusters, multiplicity <= 8 so the top-5 ordering is untouched
WEAK_FILLERS = [((1, 16384), 8), ((1, 8192), 8), ((2, 4096), 7),
                ((2, 8192), 6), ((4, 4096), 5), ((2, 16384), 4),
                ((3, 8192), 2), ((1, 32768), 2)]
STRONG_FILLERS = [((1, 131072), 6), ((4, 65536), 5), ((2, 32768), 4),
                  ((1, 47104), 4), ((3, 16384), 3), ((5, 8192), 3),
                  ((4, 262144), 2), ((10, 65536), 1)]

AGE_SPLIT = {WEAKER: [(2016, 38), (2020, 23), (2023, 14)],
             STRONGER: [(2016, 25), (2020, 33), (2023, 28)]}
TYPE_SPLIT = {WEAKER: [("sensitive_application", 4), ("application", 6),
                       ("component", 65)],
              STRONGER: [("sensitive_application", 11), ("application", 16),
                         ("component", 59)]}
STAR_SPLIT = {WEAKER: [(3, 13), (7, 12), (20, 28), (55, 22)],
              STRONGER: [(3, 25), (7, 22), (20, 17), (55, 22)]}


def deal(split):
    for value, count in split:
        for _ in range(count):
            yield value


def main():
    fit = fit_loglog(load_anchor_csv())
    by_label = {WEAKER: [], STRONGER: []}
    for clusters in (TOP5, WEAK_FILLERS, STRONG_FILLERS):
        for (t, m), count in clusters:
            label = classify(Argon2Config(t=t, memory_kib=m), fit)
            by_label[label].extend([(t, m)] * count)

    assert len(by_label[WEAKER]) == 75, len(by_label[WEAKER])
    assert len(by_label[STRONGER]) == 86, len(by_label[STRONGER])

    rows = []
    idx = 1
    for label in (WEAKER, STRONGER):
        years = deal(AGE_SPLIT[label])
        categories = deal(TYPE_SPLIT[label])
        stars = deal(STAR_SPLIT[label])
        for (t, m), year, category, star in zip(by_label[label], years,
                                                categories, stars):
            rows.append({
                "source_label": f"owner{idx:03d}/repo{idx:03d}",
                "t": t, "memory_kib": m, "p": 1,
                "category": category, "stars": star, "created_year": year,
            })
            idx += 1

    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / "argon2_params_161.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
