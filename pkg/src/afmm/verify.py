"""Self-contained, seeded acceptance checks.

Each :class:`Verifier` method runs one numbered criterion and returns a
:class:`CriterionResult`. A verifier instance remembers every AFMM op count it sees so the
multiplication-freedom check covers all suites run through it.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis import CostParams, fit_power_law, predict_additions, summarize
from .bench import ExperimentPlan, build_grid, reductions_vs_ikj, reference_table1, run_plan
from .kernels import KERNELS, KernelId, OpCounts, multiply, multiply_ijk, multiply_strassen
from .matrix import DenseMatrix, GeneratorSpec, Role, approx_equal, generate


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key} {self.title}: {self.detail}"


@dataclass
class Verifier:
    afmm_counts: list[OpCounts] = field(default_factory=list)

    def _note(self, kernel: KernelId, counts: OpCounts) -> None:
        if kernel.is_afmm:
            self.afmm_counts.append(counts)

    def _mul(self, kernel: KernelId, x, y, cutoff: int = 2):
        res = multiply(kernel, x, y, cutoff)
        self._note(kernel, res.counts)
        return res

    def _run(self, plan: ExperimentPlan):
        records = run_plan(plan)
        for r in records:
            self._note(r.kernel, r.counts)
        return records

    def _mean_additions(self, plan: ExperimentPlan) -> dict[int, float]:
        records = self._run(plan)
        return {n: summarize([r.counts.additions for r in records if r.n == n]).mean
                for n in plan.sizes}

    # 1
    def oracle_equivalence(self) -> CriterionResult:
        t0 = time.perf_counter()
        mismatches = []
        total = 0
        for n in (1, 2, 3, 8, 16, 33, 64):
            for s in range(50):
                rng = np.random.default_rng([n, s, 1])
                x = DenseMatrix(rng.integers(-9, 10, (n, n)))
                y = DenseMatrix(rng.integers(-9, 10, (n, n)))
                want = multiply_ijk(x, y).product
                for k in KERNELS:
                    total += 1
                    if self._mul(k, x, y).product != want:
                        mismatches.append(f"{k.value} n={n} seed={s}")
        elapsed = time.perf_counter() - t0
        ok = not mismatches and elapsed < 10.0
        detail = f"{total} products compared, {len(mismatches)} mismatches, {elapsed:.2f}s (limit 10s)"
        if mismatches:
            detail += "; first: " + mismatches[0]
        return CriterionResult("C1", "oracle equivalence (exact, all kernels)", ok, detail)

    # 2
    def tolerant_equivalence(self) -> CriterionResult:
        bad = []
        worst = 0.0
        sizes = (1, 2, 5, 16, 33, 64)
        mus = (1, 3, 5, 7, 14, 21)
        for s in range(50):
            n = sizes[s % len(sizes)]
            mu = mus[(s // len(sizes)) % len(mus)]
            x = generate(GeneratorSpec(n, 1 / 3, role=Role.REAL), 1000 + s)
            y = generate(GeneratorSpec(n, 1 / 2, mu, Role.INTEGER), 2000 + s)
            got = self._mul(KernelId.AFMM_A, x, y).product
            want = multiply_ijk(x, y).product
            diff = np.abs(got.array - want.array) / np.maximum(1.0, np.maximum(np.abs(got.array), np.abs(want.array)))
            worst = max(worst, float(diff.max()))
            if not approx_equal(got, want, 1e-9):
                bad.append(f"n={n} mu'={mu} seed={s}")
        return CriterionResult("C2", "tolerant equivalence (real X, integer Y)", not bad,
                               f"50 seeds, worst scaled error {worst:.2e} (tol 1e-9)"
                               + (f"; failing: {bad[0]}" if bad else ""))

    # 3
    def expected_additions(self) -> CriterionResult:
        parts = []
        ok = True
        for seed, (d1, d2, mu) in ((3, (1 / 3, 1 / 2, 3)), (14, (1 / 5, 2 / 5, 14))):
            plan = ExperimentPlan(KernelId.AFMM_A, (64,), d1, d2, mu, replications=200, warmups=0, base_seed=seed)
            mean = self._mean_additions(plan)[64]
            predicted = predict_additions(CostParams(64, d1, d2, mu))
            rel = abs(mean - predicted) / predicted
            ok &= rel <= 0.03
            parts.append(f"mu'={mu}: mean {mean:.1f} vs E(A) {predicted:.2f} ({100 * rel:.2f}%)")
        return CriterionResult("C3", "expected additions match mu'd1d2n^3 within 3%", ok, "; ".join(parts))

    # 4
    def multiplication_free(self) -> CriterionResult:
        for kernel in (KernelId.AFMM_A, KernelId.AFMM_B):
            plan = ExperimentPlan(kernel, (8, 32), 0.5, 0.5, 5, replications=5, warmups=0, base_seed=4)
            self._run(plan)
        rng = np.random.default_rng(44)
        for n in (1, 7, 16):
            x = DenseMatrix(rng.integers(-9, 10, (n, n)))
            y = DenseMatrix(rng.integers(-9, 10, (n, n)))
            self._mul(KernelId.AFMM_A, x, y)
            self._mul(KernelId.AFMM_B, x, y)
        offenders = sum(1 for c in self.afmm_counts if c.multiplications != 0)
        return CriterionResult("C4", "AFMM performs zero multiplications", offenders == 0,
                               f"{len(self.afmm_counts)} AFMM runs checked, {offenders} with multiplications > 0")

    # 5
    def parameter_independence(self) -> CriterionResult:
        n = 32
        rng = np.random.default_rng(5)
        seen: dict[KernelId, set] = {KernelId.IJK: set(), KernelId.IKJ: set()}
        for p in range(20):
            d1, d2 = (float(v) for v in rng.uniform(0, 1, 2))
            mu = int(rng.integers(1, 22))
            for k in seen:
                plan = ExperimentPlan(k, (n,), d1, d2, mu, replications=1, warmups=0, base_seed=100 + p)
                seen[k].update(r.counts for r in self._run(plan))
        classical_ok = all(len(v) == 1 for v in seen.values())
        means = {}
        for mu in (1, 7):
            plan = ExperimentPlan(KernelId.AFMM_A, (64,), 1 / 3, 1 / 2, mu, replications=20, warmups=0, base_seed=55)
            means[mu] = self._mean_additions(plan)[64]
        afmm_ok = means[7] > means[1]
        detail = (f"distinct ijk/ikj counts at n={n} over 20 parameterizations: "
                  f"{len(seen[KernelId.IJK])}/{len(seen[KernelId.IKJ])}; "
                  f"AFMM mean additions mu'=1: {means[1]:.0f}, mu'=7: {means[7]:.0f}")
        return CriterionResult("C5", "parameter independence of ijk/ikj, dependence of AFMM",
                               classical_ok and afmm_ok, detail)

    # 6
    def cubic_growth(self) -> CriterionResult:
        plan = ExperimentPlan(KernelId.AFMM_A, (32, 64, 128, 256), 1 / 3, 1 / 2, 3,
                              replications=10, warmups=0, base_seed=6)
        means = self._mean_additions(plan)
        fit = fit_power_law(sorted(means.items()))
        ok = 2.9 <= fit.exponent <= 3.1 and fit.r_squared >= 0.999
        return CriterionResult("C6", "cubic growth of AFMM additions", ok,
                               f"exponent {fit.exponent:.4f} (want [2.9, 3.1]), r^2 {fit.r_squared:.6f} (want >= 0.999)")

    # 7
    def quadratic_regime(self) -> CriterionResult:
        means = {}
        for n in (64, 256, 1024):
            d = 1 / math.sqrt(n)
            plan = ExperimentPlan(KernelId.AFMM_A, (n,), d, d, 2, replications=5, warmups=0, base_seed=7)
            means[n] = self._mean_additions(plan)[n]
        fit = fit_power_law(sorted(means.items()))
        ok = 1.85 <= fit.exponent <= 2.15
        return CriterionResult("C7", "quadratic regime when d1*d2 = 1/n", ok,
                               f"exponent {fit.exponent:.4f} (want [1.85, 2.15]), r^2 {fit.r_squared:.6f}")

    # 8
    def strassen_compare(self) -> CriterionResult:
        n = 256
        plan = ExperimentPlan(KernelId.AFMM_A, (n,), 0.05, 0.05, 1, replications=20, warmups=0, base_seed=8)
        afmm = self._mean_additions(plan)[n]
        x = generate(GeneratorSpec(n, 0.05, role=Role.REAL), 81)
        y = generate(GeneratorSpec(n, 0.05, 1, Role.INTEGER), 82)
        strassen = multiply_strassen(x, y, cutoff=1).counts.multiplications
        ratio = afmm / strassen
        ok = afmm < 1e5 and strassen == 7**8 and ratio < 0.02
        return CriterionResult("C8", "AFMM additions vs Strassen multiplications", ok,
                               f"AFMM mean additions {afmm:.0f} (E(A) {predict_additions(CostParams(n, .05, .05, 1)):.0f}), "
                               f"Strassen multiplications {strassen} (7^8 = {7**8}), ratio {100 * ratio:.3f}% (< 2%)")

    # 9
    def strassen_structure(self) -> CriterionResult:
        got = {}
        for n in (2, 4, 8):
            x = generate(GeneratorSpec(n, 1.0, 3), 90 + n)
            got[n] = multiply_strassen(x, x, cutoff=1).counts.multiplications
        ok = got == {2: 7, 4: 49, 8: 343}
        return CriterionResult("C9", "Strassen multiplication counts at cutoff 1", ok,
                               ", ".join(f"n={n}: {m}" for n, m in got.items()) + " (want 7, 49, 343)")

    # 10
    def timing_monotonicity(self, replications: int = 20) -> CriterionResult:
        records = []
        for mu in (1, 7):
            plan = ExperimentPlan(KernelId.AFMM_A, (512,), 1 / 3, 1 / 2, mu, replications=replications, base_seed=10)
            records += self._run(plan)
        ikj = self._run(ExperimentPlan(KernelId.IKJ, (512,), 1 / 3, 1 / 2, 1, replications=5, warmups=1, base_seed=10))
        grid = build_grid(records + ikj)
        by_mu = {c.mu_prime: grid.stats(c, 512).mean for c in grid.configs if c.kernel.is_afmm}
        red = reductions_vs_ikj(grid)
        info = ", ".join(f"{label}: {v:.1f}%" for (label, _), v in red.items())
        ok = by_mu[1] < by_mu[7]
        return CriterionResult("C10", "AFMM time grows with mu' at n=512", ok,
                               f"mean elapsed mu'=1 {by_mu[1]:.4f}s, mu'=7 {by_mu[7]:.4f}s; "
                               f"informational reduction vs ikj: {info}")

    # 11
    def report_fidelity(self) -> list[CriterionResult]:
        grid = build_grid(reference_table1())
        red = reductions_vs_ikj(grid)
        out = []
        for n, want in ((500, "66.2"), (2000, "63.7")):
            got = f"{red[(grid.labels[_afmm_mu1(grid)], n)]:.1f}"
            out.append(CriterionResult(f"C11.{n}", f"report reduction ikj vs AFMM mu'=1 at n={n}",
                                       got == want, f"got {got}%, want {want}%"))
        return out

    # 12
    def fitting_correctness(self) -> CriterionResult:
        sizes = (16, 32, 64, 128, 256)
        worst = []
        ok = True
        for b in (1, 2, 2.807, 3):
            c = 0.37
            fit = fit_power_law([(s, c * s**b) for s in sizes])
            good = (math.isclose(fit.exponent, b, rel_tol=1e-9) and math.isclose(fit.coefficient, c, rel_tol=1e-9)
                    and fit.r_squared >= 1 - 1e-9)
            ok &= good
            worst.append(f"b={b}: got ({fit.coefficient:.12g}, {fit.exponent:.12g}, r^2={fit.r_squared:.12g})")
        return CriterionResult("C12", "power-law fit recovers synthetic (c, b)", ok, "; ".join(worst))


def _afmm_mu1(grid):
    return next(c for c in grid.configs if c.kernel.is_afmm and c.mu_prime == 1)


SUITES: dict[str, list[Callable[[Verifier], CriterionResult | list[CriterionResult]]]] = {
    "counts": [Verifier.expected_additions, Verifier.parameter_independence, Verifier.multiplication_free],
    "oracle": [Verifier.oracle_equivalence, Verifier.tolerant_equivalence, Verifier.multiplication_free],
    "scaling": [Verifier.cubic_growth, Verifier.quadratic_regime, Verifier.fitting_correctness,
                Verifier.multiplication_free],
    "strassen-compare": [Verifier.strassen_compare, Verifier.strassen_structure, Verifier.multiplication_free],
    "timing": [Verifier.timing_monotonicity],
    "report": [Verifier.report_fidelity],
}


def run_suite(name: str, verifier: Verifier | None = None) -> list[CriterionResult]:
    verifier = verifier or Verifier()
    results = []
    for check in SUITES[name]:
        r = check(verifier)
        results.extend(r if isinstance(r, list) else [r])
    return results
