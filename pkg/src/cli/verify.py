"""
Seeded acceptance suite run by the ``verify`` command.

Every criterion produces a measured value and a tolerance, and passes when the
measured value does not exceed the tolerance times the run's tolerance scale.
"""
from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List

import mpmath
import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, ConfigDict

from src.asymptotics.lemmas import lemma_balloon_integral_oracle, lemma_smoothing_integral_oracle
from src.asymptotics.mise import mise_lognormal_reference
from src.asymptotics.series import balloon_coefficient_A, smoothing_coefficient_B
from src.asymptotics.table import table2_bias, table2_variance
from src.bandwidth.cross_validation import cv_profile, gamma_overlap
from src.bandwidth.plugin import plugin_bandwidth
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.dtos.request import Command, RunConfig
from src.errors import MonotonicityViolation
from src.estimators.shifted import approximation_distance, evaluate_shifted, gaussian_approximation
from src.estimators.weight_function import DensityEstimate
from src.kernels.distributions import pdf_gamma
from src.kernels.moments import GAUSSIAN_KERNEL
from src.kernels.weights import effective_bandwidth, kernel_mean_variance, shift_term
from src.oracle.montecarlo import cv_unbiasedness, mc_estimator_summary, replicate
from src.oracle.quadrature import integrate_positive
from src.oracle.rates import fit_rate
from src.reference.lognormal import LogNormalRef, as_reference_density, ln_sample
from src.reference.streams import block_generator, uniforms
from src.tools.file_processor import FileProcessor
from src.tools.writer import read_csv_output

F = KernelFamily
ASYMMETRIC = [family for family in F if family.is_asymmetric]
GAMMA_IMPROPER = KernelSpec(F.GAMMA, KernelRole.IMPROPER, 1.0)
GAMMA_PROPER = KernelSpec(F.GAMMA, KernelRole.PROPER, 1.0)


class SuiteSettings(BaseModel):
    """Sizes and tolerances of the acceptance criteria."""
    model_config = ConfigDict(frozen=True)

    normalization_n: int = 50
    normalization_sigmas: tuple[float, ...] = (0.1, 0.3, 0.8)
    normalization_tol: float = 1e-6

    moment_points: tuple[float, ...] = (0.5, 1.0, 4.0)
    moment_sigmas: tuple[float, ...] = (0.05, 0.2)
    moment_tol: float = 1e-7

    table2_n: int = 10_000
    table2_replications: int = 500
    table2_sigma: float = 0.15
    table2_coarse_sigma: float = 0.3
    table2_points: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    table2_bias_allowance: float = 0.25
    table2_variance_n: int = 2000
    table2_variance_replications: int = 8000
    table2_variance_tol: float = 0.10
    table2_check_shrinking: bool = True

    plugin_mus: tuple[float, ...] = (-0.5, 0.5, 1.5)
    plugin_log_sds: tuple[float, ...] = (0.5, 1.0, 1.5)
    plugin_ns: tuple[int, ...] = (50, 300, 5000)
    plugin_tol: float = 1e-10
    plugin_scan_points: int = 4001

    overlap_triples: int = 50
    overlap_tol: float = 1e-8

    cv_n: int = 50
    cv_replications: int = 2000
    cv_sigma: float = 0.3
    cv_z: float = 3.0

    band_n: int = 300
    band_replications: int = 200
    band_grid_points: int = 40
    band_width: float = 0.4
    band_fraction: float = 0.8

    rate_ns: tuple[int, ...] = (100, 400, 1600)
    rate_replications: int = 200
    rate_slope: float = -0.8
    rate_tol: float = 0.15

    lemma_sigmas: tuple[float, ...] = (0.2, 0.1, 0.05)
    lemma_point: float = 1.0

    approximation_sigmas: tuple[float, ...] = (0.2, 0.1, 0.05)
    approximation_samples: tuple[float, ...] = (1.0, 2.0, 3.0)
    approximation_interval: tuple[float, float] = (0.5, 5.0)
    approximation_points: int = 4501


FULL_SUITE = SuiteSettings()
QUICK_SUITE = SuiteSettings(
    table2_n=2000, table2_replications=150, table2_check_shrinking=False,
    table2_variance_replications=1500, table2_variance_tol=0.20,
    overlap_triples=10,
    cv_replications=200,
    band_replications=20, band_grid_points=15, band_fraction=0.6,
    rate_replications=30, rate_tol=0.25,
)


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    seconds: float
    detail: str = ""


def _integrate_line(fn: Callable[[float], float], centre: float, scale: float,
                    points: np.ndarray) -> float:
    right = points[points > centre] - centre
    left = centre - points[points < centre]
    return (integrate_positive(lambda t: fn(centre + t), scale=scale, breakpoints=right).value
            + integrate_positive(lambda t: fn(centre - t), scale=scale, breakpoints=left).value)


class AcceptanceSuite:
    """
    Runs the acceptance criteria against one seed.

    Each criterion draws from its own stream key, so criteria are independent of the
    order they run in and of the worker count.
    """
    def __init__(self, settings: SuiteSettings, seed: int = 0, workers: int = 1,
                 tolerance_scale: float = 1.0):
        self.settings = settings
        self.seed = seed
        self.workers = workers
        self.tolerance_scale = tolerance_scale
        self.reference = LogNormalRef(1.0, 1.0)

    def _result(self, name: str, measured: float, tolerance: float, seconds: float,
                detail: str = "") -> CriterionResult:
        scaled = tolerance * self.tolerance_scale
        passed = bool(measured <= scaled)
        logger.info("{}: {} (measured {:.4g}, tolerance {:.4g})", name, "pass" if passed else "FAIL",
                    measured, scaled)
        return CriterionResult(name=name, passed=passed, measured=float(measured), tolerance=scaled,
                               seconds=seconds, detail=detail)

    def normalization(self) -> List[CriterionResult]:
        s = self.settings
        start = time.perf_counter()
        samples = ln_sample(self.reference, s.normalization_n, self.seed, stream=(1,))
        worst, where = 0.0, ""
        for family in ASYMMETRIC:
            for sigma in s.normalization_sigmas:
                spec = KernelSpec(family, KernelRole.PROPER, sigma)
                deviation = abs(DensityEstimate(spec, samples).integrate().value - 1.0)
                if deviation > worst:
                    worst, where = deviation, f"{spec.label}, sigma={sigma}"
        centre = float(np.median(samples.values))
        for sigma in s.normalization_sigmas:
            descriptor = gaussian_approximation(GAMMA_PROPER.with_sigma(sigma))
            total = _integrate_line(lambda x: evaluate_shifted(descriptor, samples, x), centre, centre,
                                    samples.values)
            deviation = abs(total - 1.0)
            if deviation > worst:
                worst, where = deviation, f"sample-smoothing gaussian, sigma={sigma}"
        return [self._result("normalization", worst, s.normalization_tol, time.perf_counter() - start,
                             f"worst: {where}")]

    def kernel_moments(self) -> List[CriterionResult]:
        s = self.settings
        start = time.perf_counter()
        worst, where = 0.0, ""
        for family in ASYMMETRIC:
            for sigma in s.moment_sigmas:
                spec = KernelSpec(family, KernelRole.IMPROPER, sigma)
                for x in s.moment_points:
                    mean, variance = kernel_mean_variance(spec, x)
                    expected_mean = x + shift_term(spec, x)
                    expected_variance = effective_bandwidth(spec, x) ** 2
                    error = max(abs(mean / expected_mean - 1.0), abs(variance / expected_variance - 1.0))
                    if error > worst:
                        worst, where = error, f"{spec.label}, sigma={sigma}, x={x}"
        return [self._result("kernel moments", worst, s.moment_tol, time.perf_counter() - start,
                             f"worst: {where}")]

    def _summary(self, spec: KernelSpec, sigma: float, stream: int):
        s = self.settings
        return mc_estimator_summary(spec, self.reference, s.table2_n, sigma, s.table2_points,
                                    s.table2_replications, self.seed + stream, with_mise=False,
                                    workers=self.workers)

    def _deviation_over_sigma2(self, spec: KernelSpec, summary) -> float:
        """Largest |empirical - predicted| bias over sigma^2, relative to the largest prediction."""
        f = as_reference_density(self.reference)
        points = self.settings.table2_points
        empirical = np.array([summary.point_bias[float(x)][0] for x in points])
        predicted = np.array([table2_bias(spec.with_sigma(summary.sigma), x, f) for x in points])
        return float(np.max(np.abs(empirical - predicted)) / np.max(np.abs(predicted)))

    def table2_monte_carlo(self) -> List[CriterionResult]:
        """
        Empirical bias within 3 standard errors plus an allowance of the leading-order
        bias, and the empirical variance within a relative tolerance of the
        leading-order variance.

        The variance runs on its own, larger set of replications so that its Monte Carlo
        error stays well inside the tolerance; the largest 3 s.e. relative to the
        prediction is reported in the detail column. The prediction subtracts
        f(x)^2 / n, the squared-mean term of the exact variance that the leading order
        drops; at sigma = 0.15 it is several percent of the total.
        """
        s = self.settings
        f = as_reference_density(self.reference)
        results, summaries = [], {}
        for stream, spec in ((3, GAMMA_IMPROPER), (4, GAMMA_PROPER)):
            start = time.perf_counter()
            sized = spec.with_sigma(s.table2_sigma)
            summary = summaries[spec.role] = self._summary(spec, s.table2_sigma, stream)
            bias_ratio = 0.0
            for x in s.table2_points:
                empirical, error = summary.point_bias[float(x)]
                predicted = table2_bias(sized, x, f)
                bias_ratio = max(bias_ratio, abs(empirical - predicted)
                                 / (3.0 * error + s.table2_bias_allowance * abs(predicted)))
            results.append(self._result(f"bias ({spec.label})", bias_ratio, 1.0, time.perf_counter() - start,
                                        "ratio to 3 s.e. + allowance"))

            start = time.perf_counter()
            spread = mc_estimator_summary(spec, self.reference, s.table2_variance_n, s.table2_sigma,
                                          s.table2_points, s.table2_variance_replications,
                                          self.seed + stream + 100, with_mise=False, workers=self.workers)
            relative_error, noise = 0.0, 0.0
            for x in s.table2_points:
                variance, variance_error = spread.point_variance[float(x)]
                expected = (table2_variance(sized, x, f, s.table2_variance_n)
                            - f(x) ** 2 / s.table2_variance_n)
                relative_error = max(relative_error, abs(variance / expected - 1.0))
                noise = max(noise, 3.0 * variance_error / expected)
            if noise > s.table2_variance_tol / 2.0:
                logger.warning("variance ({}): 3 s.e. is {:.3g} of the prediction, too coarse for a {:.3g} check",
                               spec.label, noise, s.table2_variance_tol)
            results.append(self._result(f"variance ({spec.label})", relative_error, s.table2_variance_tol,
                                        time.perf_counter() - start, f"relative error; 3 s.e. = {noise:.3g}"))

        if s.table2_check_shrinking:
            start = time.perf_counter()
            fine = self._deviation_over_sigma2(GAMMA_IMPROPER, summaries[KernelRole.IMPROPER])
            coarse = self._deviation_over_sigma2(GAMMA_IMPROPER, self._summary(GAMMA_IMPROPER, s.table2_coarse_sigma, 5))
            results.append(self._result("bias / sigma^2 convergence", fine / coarse, 1.0,
                                        time.perf_counter() - start,
                                        f"relative deviation {coarse:.3g} -> {fine:.3g}"))
        return results

    @staticmethod
    def _plugin_oracle(spec: KernelSpec, mu: float, log_sd: float, n: int) -> mpmath.mpf:
        """(B / (4 A n))^(1/5) from the MISE constants, at 40 digits."""
        with mpmath.workdps(40):
            mu, s = mpmath.mpf(mu), mpmath.mpf(log_sd)
            s2 = s * s
            drift = spec.role is KernelRole.IMPROPER
            if spec.family is F.RECIPROCAL_INVERSE_GAUSSIAN:
                drift = not drift
            if spec.family in (F.GAMMA, F.RECIPROCAL_INVERSE_GAUSSIAN):
                c, a = -3, mpmath.mpf(-1) / 2
                poly = 12 + 20 * s2 + 9 * s2 ** 2 if drift else 12 + 4 * s2 + s2 ** 2
            elif spec.family is F.INVERSE_GAUSSIAN:
                c, a = 1, mpmath.mpf(-3) / 2
                poly = 12 + 68 * s2 + 225 * s2 ** 2
            else:
                c, a = -1, -1
                poly = 12 + 4 * s2 + s2 ** 2
            big_a = mpmath.exp(c * mu + c * c * s2 / 4) * poly / (128 * mpmath.sqrt(mpmath.pi) * s ** 5)
            big_b = mpmath.exp(a * mu + a * a * s2 / 2) / (2 * mpmath.sqrt(mpmath.pi))
            return mpmath.root(big_b / (4 * big_a * n), 5)

    def plugin_formulas(self) -> List[CriterionResult]:
        s = self.settings
        start = time.perf_counter()
        specs = [KernelSpec(family, role, 1.0) for family in ASYMMETRIC for role in KernelRole]
        specs = [spec for spec in specs if spec.asymptotics_available]
        worst = 0.0
        for spec in specs:
            for mu in s.plugin_mus:
                for log_sd in s.plugin_log_sds:
                    for n in s.plugin_ns:
                        value = plugin_bandwidth(spec, mu, log_sd, n)
                        expected = self._plugin_oracle(spec, mu, log_sd, n)
                        worst = max(worst, float(abs(value / expected - 1)))
        formulas = self._result("plugin formulas", worst, s.plugin_tol, time.perf_counter() - start)

        start = time.perf_counter()
        worst_steps = 0.0
        for spec in specs:
            plugin = plugin_bandwidth(spec, 1.0, 1.0, 300)
            sigmas = np.geomspace(plugin / 3.0, plugin * 3.0, s.plugin_scan_points)
            curve = [mise_lognormal_reference(spec, 1.0, 1.0, 300, float(sigma)) for sigma in sigmas]
            i = int(np.argmin(curve))
            step = sigmas[i + 1] - sigmas[i] if i + 1 < sigmas.size else sigmas[i] - sigmas[i - 1]
            worst_steps = max(worst_steps, abs(sigmas[i] - plugin) / step)
        bracket = self._result("plugin brackets MISE argmin", worst_steps, 1.0, time.perf_counter() - start,
                               "distance in grid steps")
        return [formulas, bracket]

    def gamma_overlap(self) -> List[CriterionResult]:
        s = self.settings
        start = time.perf_counter()
        u = uniforms(block_generator(self.seed, (6,), 0), 3 * s.overlap_triples).reshape(-1, 3)
        xi = 0.1 + 4.9 * u[:, 0]
        xj = xi * np.exp(0.6 * u[:, 1] - 0.3)
        sigmas = 0.2 + 0.8 * u[:, 2]
        worst = 0.0
        for a, b, sigma in zip(xi, xj, sigmas):
            s2 = sigma * sigma
            marks = [c + k * sigma * math.sqrt(c + s2) for c in (a + s2, b + s2) for k in (-3, 0, 3)]
            value = integrate_positive(
                lambda t: pdf_gamma(t, 1 + a / s2, s2) * pdf_gamma(t, 1 + b / s2, s2),
                abs_tol=1e-13, rel_tol=1e-11, scale=(a + b) / 2, breakpoints=[m for m in marks if m > 0],
            ).value
            worst = max(worst, abs(gamma_overlap(a, b, sigma) / value - 1.0))
        pinned = max(abs(gamma_overlap(0.0, 0.0, 1.0) - 0.5), abs(gamma_overlap(0.0, 0.0, 0.5) - 2.0))
        return [self._result("gamma overlap closed form", max(worst, pinned), s.overlap_tol,
                             time.perf_counter() - start)]

    def cv_unbiased(self) -> List[CriterionResult]:
        s = self.settings
        start = time.perf_counter()
        check = cv_unbiasedness(GAMMA_PROPER, LogNormalRef(0.0, 1.0), s.cv_n, s.cv_sigma, s.cv_replications,
                                self.seed + 7, workers=self.workers)
        return [self._result("cv unbiasedness", check.z_score, s.cv_z, time.perf_counter() - start,
                             f"cv {check.cv_estimate[0]:.6g}, mise {check.mise[0]:.6g}")]

    def cv_band(self) -> List[CriterionResult]:
        """Cross-validation argmins around the plugin bandwidth for the proper gamma estimator."""
        from src.cli.commands import simulation_sigma_grid

        s = self.settings
        start = time.perf_counter()
        sigmas = simulation_sigma_grid(GAMMA_PROPER, self.reference, s.band_n, s.band_grid_points)
        seed = self.seed + 8

        def one(r: int):
            samples = ln_sample(self.reference, s.band_n, seed, stream=(r,))
            return cv_profile(GAMMA_PROPER, samples, sigmas, workers=1)

        profiles = replicate(one, s.band_replications, seed, self.workers)
        seconds = time.perf_counter() - start
        plugin = plugin_bandwidth(GAMMA_PROPER, self.reference.mu, self.reference.log_sd, s.band_n)
        argmins = np.array([p.cv_argmin for p in profiles])
        plugins = np.array([p.plugin_sigma for p in profiles])
        outside = float(np.mean(np.abs(argmins / plugin - 1.0) > s.band_width))
        cv_spread = float(np.std(np.log(argmins)))
        curve_spread = float(np.std(np.log(plugins)))
        return [
            self._result("median cv argmin", abs(float(np.median(argmins)) / plugin - 1.0), s.band_width, seconds,
                         f"plugin {plugin:.6g}"),
            self._result("cv argmins outside band", outside, 1.0 - s.band_fraction, 0.0),
            self._result("cv spread over asymptotic spread", curve_spread / cv_spread if cv_spread > 0 else math.inf,
                         1.0, 0.0, f"log-sd {cv_spread:.3g} against {curve_spread:.3g}"),
        ]

    def convergence_rate(self) -> List[CriterionResult]:
        s = self.settings
        start = time.perf_counter()
        mises = []
        for i, n in enumerate(s.rate_ns):
            sigma = plugin_bandwidth(GAMMA_IMPROPER, self.reference.mu, self.reference.log_sd, n)
            summary = mc_estimator_summary(GAMMA_IMPROPER, self.reference, n, sigma, [1.0], s.rate_replications,
                                           self.seed + 9 + i, with_mise=True, workers=self.workers)
            mises.append(summary.mise[0])
        slope = fit_rate(s.rate_ns, mises)
        return [self._result("mise rate", abs(slope - s.rate_slope), s.rate_tol, time.perf_counter() - start,
                             f"slope {slope:.4f}")]

    def lemma_series(self) -> List[CriterionResult]:
        """
        Truncated expansions against direct quadrature for the gamma-like shapes
        h = sigma sqrt(x), delta = 1 / x; the error over sigma^2 must shrink with sigma.
        """
        s = self.settings
        start = time.perf_counter()
        f = as_reference_density(self.reference)
        x = s.lemma_point

        def delta_fn(t):
            return 1.0 / t

        balloon, smoothing = [], []
        for sigma in s.lemma_sigmas:
            def h_fn(t, sigma=sigma):
                return sigma * math.sqrt(t)

            oracle = lemma_balloon_integral_oracle(GAUSSIAN_KERNEL, f, h_fn, delta_fn, 2, x)
            series = (balloon_coefficient_A(0, x, f, h_fn, delta_fn, 2)
                      + balloon_coefficient_A(2, x, f, h_fn, delta_fn, 2))
            balloon.append(abs(oracle - series) / sigma ** 2)
            oracle = lemma_smoothing_integral_oracle(GAUSSIAN_KERNEL, f, h_fn, delta_fn, 2, x)
            series = (smoothing_coefficient_B(0, x, f, h_fn, delta_fn, 2)
                      + smoothing_coefficient_B(2, x, f, h_fn, delta_fn, 2))
            smoothing.append(abs(oracle - series) / sigma ** 2)

        def worst_ratio(errors: list[float]) -> float:
            return max(b / a if a > 0 else math.inf for a, b in zip(errors, errors[1:]))

        try:
            lemma_smoothing_integral_oracle(GAUSSIAN_KERNEL, f, lambda t: 0.2 * t ** 1.5, lambda t: 0.0, 2, x)
            violation = 1.0
        except MonotonicityViolation:
            violation = 0.0
        seconds = time.perf_counter() - start
        return [
            self._result("balloon series", worst_ratio(balloon), 1.0, seconds,
                         "largest ratio of successive error / sigma^2"),
            self._result("sample-smoothing series", worst_ratio(smoothing), 1.0, 0.0,
                         "largest ratio of successive error / sigma^2"),
            self._result("inverse-gaussian shape rejected", violation, 0.0, 0.0),
        ]

    def approximation_convergence(self) -> List[CriterionResult]:
        """
        Improper gamma estimate against its shifted-balloon Gaussian approximation on
        fixed samples; the distance must shrink each time sigma is halved.
        """
        s = self.settings
        start = time.perf_counter()
        distances = [approximation_distance(GAMMA_IMPROPER.with_sigma(sigma), s.approximation_samples,
                                            np.linspace(*s.approximation_interval, s.approximation_points))
                     for sigma in s.approximation_sigmas]
        worst = max(b / a if a > 0 else math.inf for a, b in zip(distances, distances[1:]))
        return [self._result("gaussian approximation", worst, 1.0, time.perf_counter() - start,
                             "largest ratio of successive n h |f_hat - f_gauss| sup-distances")]

    def cli_fidelity(self) -> List[CriterionResult]:
        from src.cli.commands import cmd_estimate, run_command

        start = time.perf_counter()
        failures = []
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "samples.txt"
            samples = ln_sample(self.reference, 300, self.seed, stream=(10,))
            path.write_text("".join(f"{v!r}\n" for v in samples.values))
            config = RunConfig(command=Command.ESTIMATE, input_path=path)
            first, second = cmd_estimate(config), cmd_estimate(config)
            if first.content != second.content:
                failures.append("repeated runs differ")
            table = read_csv_output(first.content)
            spec = KernelSpec(F.GAMMA, KernelRole.IMPROPER, first.selected_sigma)
            direct = DensityEstimate(spec, FileProcessor.read_samples(path)).evaluate_grid(table["x"].to_numpy())
            if not np.array_equal(direct, table["density"].to_numpy()):
                failures.append("output differs from direct evaluation")

            broken = Path(directory) / "broken.txt"
            broken.write_text("1.5\n2.5\nnot-a-number\n")
            response = run_command(RunConfig(command=Command.ESTIMATE, input_path=broken))
            if response.status_code != 2 or "line 3" not in (response.error or ""):
                failures.append(f"malformed input gave exit {response.status_code}: {response.error}")
        return [self._result("cli fidelity", float(len(failures)), 0.0, time.perf_counter() - start,
                             "; ".join(failures))]

    def run(self) -> List[CriterionResult]:
        checks = [self.normalization, self.kernel_moments, self.table2_monte_carlo, self.plugin_formulas,
                  self.gamma_overlap, self.cv_unbiased, self.cv_band, self.convergence_rate,
                  self.lemma_series, self.approximation_convergence, self.cli_fidelity]
        results: List[CriterionResult] = []
        for check in checks:
            results.extend(check())
        passed = sum(r.passed for r in results)
        logger.info("acceptance suite: {}/{} criteria passed", passed, len(results))
        return results


def run_acceptance(config: RunConfig) -> List[CriterionResult]:
    settings = QUICK_SUITE if config.quick else FULL_SUITE
    return AcceptanceSuite(settings, config.seed, config.workers, config.tolerance_scale).run()


def results_table(results: List[CriterionResult]) -> pd.DataFrame:
    return pd.DataFrame([
        {"criterion": r.name, "passed": r.passed, "measured": r.measured, "tolerance": r.tolerance,
         "seconds": r.seconds, "detail": r.detail}
        for r in results
    ])
