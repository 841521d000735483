"""Constructive generator for the 585-rating fixture.

Published data gives only per-pair means (13 pairs per source) and each
source's percentage of ratings >= 3. Individual ratings are not published,
so the fixture is a synthetic set of 15 ratings per pair constructed to
hit every per-pair mean exactly (sum = round(mean * 15)) while the number
of 3s and 4s per source lands on the published percentage.

Construction: a pair with sum S and j high ratings needs its 15 - j low
ratings in {1, 2} and j high in {3, 4}, which is feasible exactly when
ceil((S - 30) / 2) <= j <= floor((S - 15) / 2). High counts start at
each pair's minimum and are topped up greedily to the source target.
"""
from __future__ import annotations

import json
from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"

# jokes (ratings >= 3) per source, from the published percentages of 195:
# 23.6% -> 46, 33.8% -> 66, 44.1% -> 86
SOURCE_JOKE_COUNTS = {"human": 46, "gpt_lol": 66, "witscript3": 86}
RATERS = tuple(f"r{i:02d}" for i in range(1, 16))


def pair_id(source: str, index: int) -> str:
    return f"{source}-{index + 1:02d}"


def _joke_count_bounds(total: int) -> tuple[int, int]:
    low = max(0, -(-(total - 30) // 2))
    high = min(15, (total - 15) // 2)
    if low > high:
        raise ValueError(f"no valid joke count for pair sum {total}")
    return low, high


def _scores_for_pair(total: int, jokes: int) -> list[int]:
    low_n = 15 - jokes
    high_sum = max(3 * jokes, total - 2 * low_n)
    low_sum = total - high_sum
    fours = high_sum - 3 * jokes
    twos = low_sum - low_n
    scores = [4] * fours + [3] * (jokes - fours) + [2] * twos + [1] * (low_n - twos)
    assert len(scores) == 15 and sum(scores) == total
    return scores


def build_ratings(table: dict) -> tuple[list[tuple[str, str, int]], dict[str, str]]:
    """(pair_id, rater_id, score) rows plus the pair -> source map."""
    rows: list[tuple[str, str, int]] = []
    pair_sources: dict[str, str] = {}
    for source, payload in table["sources"].items():
        sums = [round(mean * 15) for mean in payload["per_pair_means"]]
        bounds = [_joke_count_bounds(s) for s in sums]
        joke_counts = [lo for lo, _ in bounds]
        deficit = SOURCE_JOKE_COUNTS[source] - sum(joke_counts)
        assert deficit >= 0, f"{source}: target below the feasible floor"
        for i, (lo, hi) in enumerate(bounds):
            if deficit == 0:
                break
            bump = min(hi - lo, deficit)
            joke_counts[i] += bump
            deficit -= bump
        assert deficit == 0, f"{source}: target above the feasible ceiling"
        for i, (total, jokes) in enumerate(zip(sums, joke_counts)):
            pid = pair_id(source, i)
            pair_sources[pid] = source
            for rater, score in zip(RATERS, _scores_for_pair(total, jokes)):
                rows.append((pid, rater, score))
    return rows, pair_sources


def write_fixture_files() -> None:
    table = json.loads((DATA_DIR / "table1.json").read_text(encoding="utf-8"))
    rows, pair_sources = build_ratings(table)
    with open(DATA_DIR / "table1_ratings.csv", "w", encoding="utf-8") as fh:
        fh.write("pair_id,rater_id,score\n")
        for pid, rater, score in rows:
            fh.write(f"{pid},{rater},{score}\n")
    with open(DATA_DIR / "table1_pairs.csv", "w", encoding="utf-8") as fh:
        fh.write("pair_id,source\n")
        for pid, source in pair_sources.items():
            fh.write(f"{pid},{source}\n")


if __name__ == "__main__":
    write_fixture_files()
