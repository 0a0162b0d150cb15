"""Fixation preprocessing and area-of-interest aggregation.

Pipeline per participant: drop short fixations, keep the stable eye, clip to
the window between entering a stimulus and the first interaction, then
count fixations and sum dwell time per AOI.
"""

from __future__ import annotations

import bisect
import csv
import json
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .errors import NoSamples, OverlapWarning, ParseError

LEFT = "left"
RIGHT = "right"
MIN_FIXATION_MS = 104
STABLE_EYE_METRIC = "mean step between consecutive temporally paired fixations, per stimulus"


@dataclass(frozen=True)
class Fixation:
    participant_id: str
    eye: str
    stimulus_id: str
    x: float
    y: float
    start_ms: int
    duration_ms: int

    def __post_init__(self):
        if self.eye not in (LEFT, RIGHT):
            raise ValueError(f"eye must be 'left' or 'right', got {self.eye!r}")
        if self.duration_ms <= 0:
            raise ValueError(f"duration_ms must be positive, got {self.duration_ms}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("fixation coordinates must be finite")

    @property
    def end_ms(self) -> int:
        return self.start_ms + self.duration_ms


@dataclass(frozen=True)
class Aoi:
    name: str
    stimulus_id: str
    rect: tuple[float, float, float, float]

    def __post_init__(self):
        if self.rect[2] <= 0 or self.rect[3] <= 0:
            raise ValueError(f"AOI {self.name!r} needs positive width and height")

    def contains(self, x: float, y: float) -> bool:
        rx, ry, w, h = self.rect
        return rx <= x < rx + w and ry <= y < ry + h


@dataclass(frozen=True)
class StimulusWindow:
    participant_id: str
    stimulus_id: str
    enter_ms: int
    first_interaction_ms: Optional[int] = None

    def __post_init__(self):
        if self.first_interaction_ms is not None and self.first_interaction_ms < self.enter_ms:
            raise ValueError("first interaction precedes entering the stimulus")


@dataclass(frozen=True)
class AoiStats:
    aoi: str
    n_participants: int
    total_fixations: int
    total_dwell_ms: int
    mean_fixations: Fraction
    mean_dwell_s: Fraction

    @property
    def total_dwell_s(self) -> Fraction:
        return Fraction(self.total_dwell_ms, 1000)


def filter_fixations(fixations: Iterable[Fixation], min_duration_ms: int = MIN_FIXATION_MS) -> list[Fixation]:
    """Keep fixations lasting at least ``min_duration_ms`` (inclusive)."""
    return [f for f in fixations if f.duration_ms >= min_duration_ms]


def pair_binocular(left: list[Fixation], right: list[Fixation]) -> list[tuple[Fixation, Fixation]]:
    """Pair each left fixation with the unused right fixation it overlaps most in time."""
    left = sorted(left, key=lambda f: f.start_ms)
    right = sorted(right, key=lambda f: f.start_ms)
    starts = [f.start_ms for f in right]
    longest = max((f.duration_ms for f in right), default=0)
    used = set()
    pairs = []
    for lf in left:
        lo = bisect.bisect_left(starts, lf.start_ms - longest)
        hi = bisect.bisect_left(starts, lf.end_ms)
        best, best_overlap = None, 0
        for k in range(lo, hi):
            if k in used:
                continue
            rf = right[k]
            overlap = min(lf.end_ms, rf.end_ms) - max(lf.start_ms, rf.start_ms)
            if overlap > best_overlap:
                best, best_overlap = k, overlap
        if best is not None:
            used.add(best)
            pairs.append((lf, right[best]))
    return pairs


def _steps(points) -> list[float]:
    return [math.dist(p, q) for p, q in zip(points, points[1:])]


def eye_divergence(fixations: Iterable[Fixation]) -> dict[str, Optional[float]]:
    """Scanpath jitter per eye, computed over temporally paired fixations.

    The distance of either eye from the binocular midpoint is always the same
    for both eyes, so it cannot single out one of them.  Instead each eye is
    scored by the mean distance between its consecutive paired fixations on
    the same stimulus; the eye that moves less while both look at the same
    content is the steadier.  A stimulus with fewer than two pairs contributes
    each eye's own fixation sequence instead.  ``None`` means no step exists.
    """
    by_stim = defaultdict(lambda: {LEFT: [], RIGHT: []})
    for f in fixations:
        by_stim[f.stimulus_id][f.eye].append(f)
    steps = {LEFT: [], RIGHT: []}
    for stim in sorted(by_stim):
        eyes = by_stim[stim]
        pairs = pair_binocular(eyes[LEFT], eyes[RIGHT])
        if len(pairs) >= 2:
            seq = {LEFT: [p[0] for p in pairs], RIGHT: [p[1] for p in pairs]}
        else:
            seq = {e: sorted(fs, key=lambda f: f.start_ms) for e, fs in eyes.items()}
        for e, fs in seq.items():
            steps[e].extend(_steps([(f.x, f.y) for f in fs]))
    return {e: (sum(v) / len(v) if v else None) for e, v in steps.items()}


def select_stable_eye(fixations: Iterable[Fixation]) -> str:
    """Pick ``'left'`` or ``'right'`` for one participant; exact ties go to left."""
    fixations = list(fixations)
    eyes = {f.eye for f in fixations}
    if not eyes:
        raise NoSamples("no fixations for either eye")
    if len(eyes) == 1:
        return eyes.pop()
    div = eye_divergence(fixations)
    left, right = div[LEFT], div[RIGHT]
    if left is None or right is None:
        # a single fixation carries no jitter information
        return LEFT if right is None else RIGHT
    return RIGHT if right < left else LEFT


def clip_to_window(fixations: Iterable[Fixation], window: StimulusWindow) -> list[Fixation]:
    """Keep fixations starting in ``[enter_ms, first_interaction_ms)``."""
    end = window.first_interaction_ms
    return [
        f for f in fixations
        if f.start_ms >= window.enter_ms and (end is None or f.start_ms < end)
    ]


def aoi_stats(fixations: Iterable[Fixation], aois: list[Aoi]) -> list[AoiStats]:
    """Fixation counts and dwell time per AOI, one row per AOI in input order.

    Means are taken over the participants with at least one hit on that AOI.
    A fixation inside several AOIs counts for each of them and triggers an
    :class:`OverlapWarning`.
    """
    counts = defaultdict(lambda: defaultdict(int))
    dwell = defaultdict(lambda: defaultdict(int))
    overlaps = 0
    for f in fixations:
        hits = [a for a in aois if a.stimulus_id == f.stimulus_id and a.contains(f.x, f.y)]
        if len(hits) > 1:
            overlaps += 1
        for a in hits:
            counts[a.name][f.participant_id] += 1
            dwell[a.name][f.participant_id] += f.duration_ms
    if overlaps:
        warnings.warn(f"{overlaps} fixation(s) fell inside more than one AOI", OverlapWarning, stacklevel=2)

    out = []
    for aoi in aois:
        n = len(counts[aoi.name])
        total_fix = sum(counts[aoi.name].values())
        total_ms = sum(dwell[aoi.name].values())
        out.append(AoiStats(
            aoi=aoi.name,
            n_participants=n,
            total_fixations=total_fix,
            total_dwell_ms=total_ms,
            mean_fixations=Fraction(total_fix, n) if n else Fraction(0),
            mean_dwell_s=Fraction(total_ms, 1000 * n) if n else Fraction(0),
        ))
    return out


def run_pipeline(
    fixations: Iterable[Fixation],
    aois: list[Aoi],
    windows: Optional[Iterable[StimulusWindow]] = None,
    min_duration_ms: int = MIN_FIXATION_MS,
) -> tuple[list[AoiStats], dict[str, str]]:
    """Filter, choose each participant's stable eye, clip to windows, aggregate.

    When ``windows`` is given, fixations on stimuli without a window for that
    participant are dropped.  Returns the AOI rows and the chosen eye per
    participant.
    """
    kept = filter_fixations(fixations, min_duration_ms)
    by_participant = defaultdict(list)
    for f in kept:
        by_participant[f.participant_id].append(f)

    window_map = None
    if windows is not None:
        window_map = {(w.participant_id, w.stimulus_id): w for w in windows}

    selected = []
    eyes = {}
    for pid in sorted(by_participant):
        fs = by_participant[pid]
        eye = select_stable_eye(fs)
        eyes[pid] = eye
        fs = [f for f in fs if f.eye == eye]
        if window_map is not None:
            by_stim = defaultdict(list)
            for f in fs:
                by_stim[f.stimulus_id].append(f)
            fs = []
            for stim, group in by_stim.items():
                win = window_map.get((pid, stim))
                if win is not None:
                    fs.extend(clip_to_window(group, win))
        selected.extend(fs)
    return aoi_stats(selected, aois), eyes


def read_fixations_csv(path) -> list[Fixation]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            try:
                out.append(Fixation(
                    participant_id=row["participant"],
                    eye=row["eye"].strip().lower(),
                    stimulus_id=row["stimulus"],
                    x=float(row["x"]),
                    y=float(row["y"]),
                    start_ms=int(row["start_ms"]),
                    duration_ms=int(row["duration_ms"]),
                ))
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"{path}:{lineno}: bad fixation row: {exc}") from None
    return out


def read_windows_csv(path) -> list[StimulusWindow]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            try:
                first = (row.get("first_interaction_ms") or "").strip()
                out.append(StimulusWindow(
                    participant_id=row["participant"],
                    stimulus_id=row["stimulus"],
                    enter_ms=int(row["enter_ms"]),
                    first_interaction_ms=int(first) if first else None,
                ))
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"{path}:{lineno}: bad window row: {exc}") from None
    return out


def read_aois_json(path) -> list[Aoi]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return [Aoi(d["name"], d["stimulus"], tuple(float(v) for v in d["rect"])) for d in data]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad AOI file: {exc}") from None


def aoi_stats_csv(rows: list[AoiStats]) -> str:
    lines = ["aoi,N,total_fixations,mean_fixations,total_dwell_s,mean_dwell_s"]
    for r in rows:
        lines.append(
            f"{r.aoi},{r.n_participants},{r.total_fixations},{float(r.mean_fixations):.2f},"
            f"{float(r.total_dwell_s):.3f},{float(r.mean_dwell_s):.3f}"
        )
    return "\n".join(lines) + "\n"
