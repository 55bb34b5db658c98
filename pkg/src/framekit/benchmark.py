"""20-case accuracy benchmark.

Nine cases carry fixed story signatures; the remaining eleven are five-bay
signatures sampled (seeded, deduplicated) from story counts 1..5.  Every
case uses the shared defaults: 6 m spans, 3 m stories, fixed supports, the
standard material set, a 50 kN lateral point load at every story level of
the first bay's windward line and a 10 kN/m downward girder load.  ``run_benchmark`` executes the
pipeline N times per case, grades each trial against the independently
built grid reference, and aggregates accuracy, runtime, and a failure
histogram into an AccuracyReport exportable as aligned text, CSV, and bar
charts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .errors import ErrorCategory, RemoteError, SemanticError, StageFailure
from .geometry import grid_oracle
from .loads import derive_loads
from .pipeline import GenerationBackend, TrialOutcome, classify_trial, run_pipeline
from .problem import (DEFAULT_SPAN, DEFAULT_STORY_HEIGHT, BaySpec, FrameProblem,
                      LoadSpecification, MaterialSpec, SupportKind, problem_to_text,
                      validate_problem)

NAMED_SIGNATURES = ("3-2-3", "3-2-4", "3-4-3", "5-3-2-4-1", "2-4-3-2-5",
                    "2-3-3-2-5", "2-3-1-4-5", "2-4-3-5-1", "3-4-5-4-3")
DEFAULT_SEED = 7
CASE_COUNT = 20


def problem_from_signature(signature: str, span: float = DEFAULT_SPAN,
                           level_heights: tuple[float, ...] = (),
                           support: SupportKind = SupportKind.FIXED,
                           material: MaterialSpec | None = None,
                           loads: LoadSpecification | None = None) -> FrameProblem:
    """Benchmark problem for a story signature like ``"3-2-3"``.

    ``level_heights`` gives one height per story level counted from the
    ground; every bay takes its prefix, which keeps shared story levels
    aligned across bays by construction.  Default: 3 m everywhere.
    """
    stories = tuple(int(tok) for tok in signature.split("-"))
    if not stories or any(s < 1 for s in stories):
        raise SemanticError(f"bad story signature {signature!r}")
    profile = level_heights or (DEFAULT_STORY_HEIGHT,) * max(stories)
    if len(profile) < max(stories):
        raise SemanticError("level_heights shorter than the tallest bay")
    bays = tuple(BaySpec(index=i + 1, span=span, stories=s, heights=profile[:s])
                 for i, s in enumerate(stories))
    problem = FrameProblem(
        total_bays=len(bays), bays=bays, support_kind=support,
        material=material or MaterialSpec(),
        load_spec=loads if loads is not None else LoadSpecification(),
    )
    return validate_problem(problem)


def table_pattern_problem() -> FrameProblem:
    """The 3-2-3 frame with the 5/4/5 m story-height pattern."""
    return problem_from_signature("3-2-3", level_heights=(5.0, 4.0, 5.0))


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    problem: FrameProblem

    def __post_init__(self):
        if self.name != self.problem.signature:
            raise SemanticError(
                f"case name {self.name!r} does not match signature "
                f"{self.problem.signature!r}")


def builtin_cases(seed: int = DEFAULT_SEED) -> list[BenchmarkCase]:
    """The nine named cases plus eleven seed-reproducible five-bay samples."""
    signatures = list(NAMED_SIGNATURES)
    seen = set(signatures)
    rng = random.Random(seed)
    while len(signatures) < CASE_COUNT:
        candidate = "-".join(str(rng.randint(1, 5)) for _ in range(5))
        if candidate not in seen:
            seen.add(candidate)
            signatures.append(candidate)
    return [BenchmarkCase(sig, problem_from_signature(sig)) for sig in signatures]


@dataclass(frozen=True)
class CaseResult:
    name: str
    trials: int
    successes: int
    mean_seconds: float
    failures: tuple[tuple[str, int], ...]  # (category, count), sorted by name

    @property
    def accuracy(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class AccuracyReport:
    backend: str
    trials_per_case: int
    cases: tuple[CaseResult, ...]

    @property
    def total_trials(self) -> int:
        return sum(c.trials for c in self.cases)

    @property
    def total_successes(self) -> int:
        return sum(c.successes for c in self.cases)

    @property
    def histogram(self) -> tuple[tuple[str, int], ...]:
        merged: dict[str, int] = {}
        for c in self.cases:
            for category, count in c.failures:
                merged[category] = merged.get(category, 0) + count
        return tuple(sorted(merged.items()))

    @property
    def total_seconds(self) -> float:
        return sum(c.mean_seconds * c.trials for c in self.cases)


def run_benchmark(backend: GenerationBackend, trials: int = 10,
                  cases: list[BenchmarkCase] | None = None,
                  seed: int = DEFAULT_SEED) -> AccuracyReport:
    """Run ``trials`` pipeline executions per case and grade each one."""
    import time

    if trials < 1:
        raise SemanticError("need at least one trial per case")
    cases = builtin_cases(seed) if cases is None else cases
    results = []
    for case in cases:
        text = problem_to_text(case.problem)
        oracle = grid_oracle(case.problem)
        expected_loads = derive_loads(case.problem, oracle)
        successes = 0
        elapsed = 0.0
        failures: dict[str, int] = {}
        for _ in range(trials):
            started = time.perf_counter()
            try:
                outcome = classify_trial(
                    run_pipeline(text, backend, render_panels=False),
                    oracle, expected_loads)
            except StageFailure as exc:
                outcome = exc.outcome
            except RemoteError as exc:
                outcome = TrialOutcome(False, stage=None,
                                       category=ErrorCategory.OTHER, detail=str(exc))
            elapsed += time.perf_counter() - started
            if outcome.success:
                successes += 1
            else:
                category = outcome.category.value if outcome.category else "Other"
                failures[category] = failures.get(category, 0) + 1
        results.append(CaseResult(
            name=case.name, trials=trials, successes=successes,
            mean_seconds=elapsed / trials,
            failures=tuple(sorted(failures.items()))))
    return AccuracyReport(backend=backend.name, trials_per_case=trials,
                          cases=tuple(results))


# --- report output ----------------------------------------------------------


def report_csv(report: AccuracyReport) -> str:
    lines = ["case,trials,successes,accuracy,mean_seconds,failures"]
    for c in report.cases:
        failures = ";".join(f"{name}:{count}" for name, count in c.failures)
        lines.append(f"{c.name},{c.trials},{c.successes},{c.accuracy:.4f},"
                     f"{c.mean_seconds:.4f},{failures}")
    return "\n".join(lines) + "\n"


def report_text(report: AccuracyReport) -> str:
    name_width = max(4, max((len(c.name) for c in report.cases), default=4))
    header = (f"{'case':<{name_width}}  {'trials':>6}  {'ok':>4}  "
              f"{'accuracy':>8}  {'mean s':>8}  failures")
    lines = [f"backend: {report.backend}  trials/case: {report.trials_per_case}",
             header, "-" * len(header)]
    for c in report.cases:
        failures = ", ".join(f"{name}={count}" for name, count in c.failures) or "-"
        lines.append(f"{c.name:<{name_width}}  {c.trials:>6}  {c.successes:>4}  "
                     f"{c.accuracy:>8.2f}  {c.mean_seconds:>8.4f}  {failures}")
    lines.append("-" * len(header))
    overall = report.total_successes / max(1, report.total_trials)
    lines.append(f"overall accuracy {overall:.4f} over {report.total_trials} trials; "
                 f"total {report.total_seconds:.2f}s")
    histogram = ", ".join(f"{name}={count}" for name, count in report.histogram) or "none"
    lines.append(f"failure histogram: {histogram}")
    return "\n".join(lines) + "\n"


def write_report_figures(report: AccuracyReport, out_dir) -> list[Path]:
    """Accuracy and runtime bar charts next to the delimited reports."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = [c.name for c in report.cases]
    written = []

    for filename, values, ylabel, ylim in (
            ("accuracy.png", [c.accuracy for c in report.cases],
             "accuracy", (0.0, 1.05)),
            ("runtime.png", [c.mean_seconds for c in report.cases],
             "mean seconds per trial", None)):
        fig, ax = plt.subplots(figsize=(10, 4))
        ax.bar(range(len(names)), values, color="#4878a8")
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(names, rotation=60, ha="right", fontsize=8)
        ax.set_ylabel(ylabel)
        ax.set_title(f"{ylabel} by case ({report.backend} backend, "
                     f"{report.trials_per_case} trials)")
        if ylim:
            ax.set_ylim(*ylim)
        fig.tight_layout()
        path = out / filename
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def export_cases(cases: list[BenchmarkCase], out_dir) -> list[Path]:
    """One canonical problem file per case."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for case in cases:
        path = out / f"{case.name}.txt"
        path.write_text(problem_to_text(case.problem), encoding="utf-8")
        written.append(path)
    return written
