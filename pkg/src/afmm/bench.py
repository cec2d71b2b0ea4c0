"""Experiment plans, timed kernel runs and report emitters.

Only the kernel call is timed; matrix generation, warmups and formatting all
happen outside the measured region. Runs are strictly sequential.
"""
from __future__ import annotations

import csv
import hashlib
import io
import re
import time
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .analysis import percent_reduction, summarize
from .kernels import DEFAULT_STRASSEN_CUTOFF, KernelId, OpCounts, multiply
from .matrix import SEED_MASK, DenseMatrix, DomainError, GeneratorSpec, Role, generate

CSV_HEADER = [
    "kernel", "n", "d1", "d2", "mu_prime", "seed", "rep",
    "elapsed_seconds", "additions", "multiplications", "zero_skips",
]
MIN_TIMER_MULTIPLE = 100


class TimingWarning(UserWarning):
    pass


class IncompleteGridError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentPlan:
    kernel: KernelId
    sizes: tuple[int, ...]
    d1: float
    d2: float
    mu_prime: float
    replications: int = 20
    warmups: int = 2
    base_seed: int = 0
    strassen_cutoff: int = DEFAULT_STRASSEN_CUTOFF

    def __post_init__(self):
        object.__setattr__(self, "kernel", KernelId(self.kernel))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes:
            raise DomainError("plan needs at least one size")
        if any(s < 1 for s in self.sizes):
            raise DomainError(f"sizes must be positive: {self.sizes}")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise DomainError(f"sizes must be strictly increasing: {self.sizes}")
        for name in ("d1", "d2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if not self.mu_prime > 0:
            raise DomainError(f"mu must be positive, got {self.mu_prime}")
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if self.warmups < 0:
            raise DomainError("warmups must be >= 0")
        if self.strassen_cutoff < 1:
            raise DomainError("cutoff must be >= 1")
        if not 0 <= self.base_seed <= SEED_MASK:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class BenchmarkRecord:
    kernel: KernelId
    n: int
    d1: float | None
    d2: float | None
    mu_prime: float | None
    seed: int | None
    rep: int
    elapsed_seconds: float
    counts: OpCounts | None
    valid: bool = field(default=True, compare=False)


def _hash64(*parts) -> int:
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def cell_seed(base_seed: int, n: int, rep: int) -> int:
    """Seed for one (size, replication) cell: ``base_seed XOR hash(n, rep)``."""
    return (base_seed ^ _hash64("cell", n, rep)) & SEED_MASK


def operand_specs(kernel: KernelId, n: int, d1: float, d2: float, mu_prime: float) -> tuple[GeneratorSpec, GeneratorSpec]:
    """Generator specs for the pre- and post-factor.

    Case B takes integer rep-factors on the left; every other kernel gets the
    Case A layout (real X, integer Y with nonzero mean ``mu_prime``).
    """
    if kernel is KernelId.AFMM_B:
        return (GeneratorSpec(n, d1, mu_prime, Role.INTEGER),
                GeneratorSpec(n, d2, 1.0, Role.REAL))
    return (GeneratorSpec(n, d1, 1.0, Role.REAL),
            GeneratorSpec(n, d2, mu_prime, Role.INTEGER))


def generate_operands(kernel: KernelId, n: int, d1: float, d2: float, mu_prime: float,
                      seed: int) -> tuple[DenseMatrix, DenseMatrix]:
    sx, sy = operand_specs(KernelId(kernel), n, d1, d2, mu_prime)
    return generate(sx, seed), generate(sy, _hash64("Y", seed))


_timer_resolution: float | None = None


def timer_resolution() -> float:
    """Larger of the advertised and the observed perf_counter tick."""
    global _timer_resolution
    if _timer_resolution is None:
        observed = float("inf")
        for _ in range(2000):
            t0 = time.perf_counter()
            t1 = time.perf_counter()
            while t1 == t0:
                t1 = time.perf_counter()
            observed = min(observed, t1 - t0)
        _timer_resolution = max(time.get_clock_info("perf_counter").resolution, observed)
    return _timer_resolution


def run_plan(plan: ExperimentPlan) -> list[BenchmarkRecord]:
    threshold = MIN_TIMER_MULTIPLE * timer_resolution()
    records = []
    for n in plan.sizes:
        for rep in range(plan.replications):
            seed = cell_seed(plan.base_seed, n, rep)
            x, y = generate_operands(plan.kernel, n, plan.d1, plan.d2, plan.mu_prime, seed)
            for _ in range(plan.warmups):
                multiply(plan.kernel, x, y, plan.strassen_cutoff)
            t0 = time.perf_counter()
            result = multiply(plan.kernel, x, y, plan.strassen_cutoff)
            elapsed = time.perf_counter() - t0
            valid = elapsed >= threshold
            if not valid:
                warnings.warn(
                    f"{plan.kernel.value} n={n} rep={rep}: {elapsed:.3g}s is below "
                    f"{MIN_TIMER_MULTIPLE}x timer resolution; excluded from statistics",
                    TimingWarning, stacklevel=2)
            records.append(BenchmarkRecord(plan.kernel, n, plan.d1, plan.d2, plan.mu_prime,
                                           seed, rep, elapsed, result.counts, valid))
    return records


# --- CSV ------------------------------------------------------------------

def _num(v) -> str:
    return "" if v is None else repr(float(v))


def _int(v) -> str:
    return "" if v is None else str(int(v))


def _record_row(r: BenchmarkRecord) -> list[str]:
    c = r.counts
    return [
        r.kernel.value, str(r.n), _num(r.d1), _num(r.d2), _num(r.mu_prime),
        _int(r.seed), str(r.rep), f"{r.elapsed_seconds:.9f}",
        _int(c and c.additions), _int(c and c.multiplications), _int(c and c.zero_skips),
    ]


def emit_csv(records: Iterable[BenchmarkRecord], destination: str | Path | TextIO) -> None:
    if isinstance(destination, (str, Path)):
        path = Path(destination)
        try:
            with path.open("w", newline="") as fh:
                emit_csv(records, fh)
        except OSError as exc:
            raise OSError(f"cannot write CSV to {path}: {exc}") from exc
        return
    w = csv.writer(destination, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(_record_row(r))


def _opt(cast, s: str):
    return None if s == "" else cast(s)


def parse_csv(source: str | Path | TextIO) -> list[BenchmarkRecord]:
    if isinstance(source, (str, Path)):
        with Path(source).open(newline="") as fh:
            return parse_csv(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        counts = None
        if row["additions"] != "":
            counts = OpCounts(int(row["additions"]), int(row["multiplications"]), int(row["zero_skips"]))
        out.append(BenchmarkRecord(
            KernelId(row["kernel"]), int(row["n"]),
            _opt(float, row["d1"]), _opt(float, row["d2"]), _opt(float, row["mu_prime"]),
            _opt(int, row["seed"]), int(row["rep"]), float(row["elapsed_seconds"]), counts,
        ))
    return out


def reference_table1() -> list[BenchmarkRecord]:
    """Published mean times (seconds) for ijk, ikj and AFMM Case A on a 1.6 GHz Pentium.

    Formatting reference only; these timings are not reproducible on other hardware.
    """
    text = resources.files("afmm").joinpath("reference/table1.csv").read_text()
    return parse_csv(io.StringIO(text))


# --- grouping into configurations ------------------------------------------

@dataclass(frozen=True)
class Configuration:
    kernel: KernelId
    d1: float | None = None
    d2: float | None = None
    mu_prime: float | None = None


def configuration(r: BenchmarkRecord) -> Configuration:
    # classical and Strassen timings do not depend on the matrix parameters
    if r.kernel.is_afmm:
        return Configuration(r.kernel, r.d1, r.d2, r.mu_prime)
    return Configuration(r.kernel)


def _labels(configs: Sequence[Configuration]) -> dict[Configuration, str]:
    by_mu: dict[tuple, int] = {}
    for c in configs:
        by_mu[(c.kernel, c.mu_prime)] = by_mu.get((c.kernel, c.mu_prime), 0) + 1
    labels = {}
    for c in configs:
        if not c.kernel.is_afmm:
            labels[c] = c.kernel.value
            continue
        label = f"{c.kernel.value} mu'={c.mu_prime:g}"
        if by_mu[(c.kernel, c.mu_prime)] > 1:
            label += f" d1={c.d1:.4g} d2={c.d2:.4g}"
        labels[c] = label
    return labels


@dataclass
class Grid:
    sizes: list[int]
    configs: list[Configuration]
    labels: dict[Configuration, str]
    cells: dict[tuple[Configuration, int], list[float]]

    def stats(self, config: Configuration, n: int):
        return summarize(self.cells[(config, n)])


def build_grid(records: Iterable[BenchmarkRecord]) -> Grid:
    configs: list[Configuration] = []
    sizes: set[int] = set()
    cells: dict[tuple[Configuration, int], list[float]] = {}
    for r in records:
        if not r.valid:
            continue
        c = configuration(r)
        if c not in configs:
            configs.append(c)
        sizes.add(r.n)
        cells.setdefault((c, r.n), []).append(r.elapsed_seconds)
    labels = _labels(configs)
    ordered = sorted(sizes)
    missing = [f"{labels[c]} @ n={n}" for n in ordered for c in configs if (c, n) not in cells]
    if missing:
        raise IncompleteGridError("missing cells: " + ", ".join(missing))
    return Grid(ordered, configs, labels, cells)


def reductions_vs_ikj(grid: Grid) -> dict[tuple[str, int], float]:
    """Percent reduction of each AFMM column's mean time relative to ikj, per size."""
    ikj = Configuration(KernelId.IKJ)
    if ikj not in grid.configs:
        return {}
    out = {}
    for n in grid.sizes:
        base = grid.stats(ikj, n).mean
        for c in grid.configs:
            if c.kernel.is_afmm:
                out[(grid.labels[c], n)] = percent_reduction(base, grid.stats(c, n).mean)
    return out


def emit_table(records: Iterable[BenchmarkRecord]) -> str:
    grid = build_grid(records)
    header = ["n"] + [grid.labels[c] for c in grid.configs]
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---:" for _ in header) + "|",
    ]
    for n in grid.sizes:
        cells = [f"{grid.stats(c, n).mean:.6g}" for c in grid.configs]
        lines.append("| " + " | ".join([str(n)] + cells) + " |")
    red = reductions_vs_ikj(grid)
    if red:
        for n in grid.sizes:
            cells = []
            for c in grid.configs:
                v = red.get((grid.labels[c], n))
                cells.append("" if v is None else f"{v:.1f}%")
            lines.append("| " + " | ".join([f"reduction vs ikj, n={n}"] + cells) + " |")
    return "\n".join(lines) + "\n"


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9.]+", "_", label.replace("'", "")).strip("_")


def emit_plot_data(records: Iterable[BenchmarkRecord], destination: str | Path) -> list[Path]:
    """Write one ``n mean stddev`` series file per configuration plus ``manifest.txt``."""
    grid = build_grid(records)
    out_dir = Path(destination)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = []
        for c in grid.configs:
            label = grid.labels[c]
            path = out_dir / f"series_{_slug(label)}.dat"
            rows = []
            for n in grid.sizes:
                s = grid.stats(c, n)
                rows.append(f"{n} {s.mean!r} {s.std_dev!r}")
            path.write_text("\n".join(rows) + "\n")
            manifest.append(f"{path.name}\t{label}")
            written.append(path)
        (out_dir / "manifest.txt").write_text("\n".join(manifest) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write plot data under {out_dir}: {exc}") from exc
    return written
