"""
Command handlers behind the CLI. Each takes a validated RunConfig and returns a
CommandResponse whose content is the rendered table; the handlers do no arithmetic
beyond calling the library.
"""
from __future__ import annotations

import math
import time
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd
from loguru import logger

from src import __version__
from src.bandwidth.cross_validation import cv_profile, default_sigma_grid
from src.bandwidth.plugin import plugin_bandwidth, plugin_from_samples
from src.dtos.kernel import KernelFamily, KernelRole, KernelSpec
from src.dtos.request import BandwidthMode, Command, RunConfig
from src.dtos.response import CommandResponse
from src.dtos.sample import SampleSet
from src.errors import KdeError
from src.estimators.grids import geometric_grid, grid_from_spec, quantile_grid
from src.estimators.shifted import evaluate_shifted, gaussian_approximation
from src.estimators.weight_function import DensityEstimate
from src.kernels.weights import lower_limit
from src.asymptotics.mise import mise_lognormal_reference
from src.oracle.montecarlo import replicate
from src.reference.lognormal import LogNormalRef, ln_integral_of_square, ln_sample
from src.tools.file_processor import FileProcessor
from src.tools.writer import render

ESTIMATE_GRID_POINTS = 512
SIMULATION_GRID_POINTS = 40
QUICK_SIMULATION_GRID_POINTS = 12
QUICK_REPLICATIONS = 20
ENVELOPE_QUANTILES = (0.05, 0.5, 0.95)


def _base_spec(config: RunConfig) -> KernelSpec:
    return KernelSpec(config.kernel, config.role, config.sigma or 1.0)


def _bandwidth_label(config: RunConfig) -> str:
    if config.bandwidth_mode is BandwidthMode.FIXED:
        return f"fixed:{config.sigma!r}"
    return config.bandwidth_mode.value


def select_sigma(spec: KernelSpec, samples: SampleSet, config: RunConfig) -> float:
    """
    Bandwidth for the configured mode: the fixed value, the plugin rule on the log
    sample moments, or the argmin of the cross-validation profile.
    """
    if config.bandwidth_mode is BandwidthMode.FIXED:
        return float(config.sigma)
    if config.bandwidth_mode is BandwidthMode.PLUGIN:
        return plugin_from_samples(spec, samples)
    sigmas = grid_from_spec(config.grid) if config.grid else default_sigma_grid(spec, samples)
    return cv_profile(spec, samples, sigmas, workers=config.workers).cv_argmin


def default_estimate_grid(spec: KernelSpec, samples: SampleSet, count: int = ESTIMATE_GRID_POINTS) -> np.ndarray:
    """
    Geometric grid between the 1e-5 and 1 - 1e-5 quantiles of the log-normal fitted to
    the sample, kept above sigma^2 for the improper RIG estimator.
    """
    if samples.log_std > 0:
        xs = quantile_grid(LogNormalRef(samples.log_mean, samples.log_std).ppf, count)
    else:
        value = float(samples.values[0])
        xs = geometric_grid(value / 10.0, value * 10.0, count)
    lower = lower_limit(spec)
    if xs[0] <= lower:
        xs = geometric_grid(1.01 * lower, max(float(xs[-1]), 10.0 * lower), count)
    return xs


def _metadata(config: RunConfig, spec: KernelSpec, **extra) -> Dict[str, object]:
    metadata = {
        "command": config.command.value,
        "kernel": spec.family.value,
        "role": spec.role.value,
    }
    metadata.update(extra)
    metadata["version"] = __version__
    return metadata


def cmd_estimate(config: RunConfig) -> CommandResponse:
    """
    Density estimate on a grid: columns x and density, plus the Gaussian small-sigma
    approximation when requested.
    """
    samples = FileProcessor.read_samples(config.input_path)
    spec = _base_spec(config)
    sigma = select_sigma(spec, samples, config)
    spec = spec.with_sigma(sigma)
    logger.info("estimating with {} (sigma = {:.6g}, mode {})", spec.label, sigma, config.bandwidth_mode.value)

    xs = grid_from_spec(config.grid) if config.grid else default_estimate_grid(spec, samples)
    table = pd.DataFrame({"x": xs, "density": DensityEstimate(spec, samples).evaluate_grid(xs)})
    if config.with_approximation:
        table["approximation"] = evaluate_shifted(gaussian_approximation(spec), samples, xs)

    metadata = _metadata(config, spec, sigma=sigma, bandwidth=_bandwidth_label(config), n=samples.n)
    return CommandResponse(content=render(table, metadata, config.output_format), status_code=0,
                           selected_sigma=sigma)


def cmd_bandwidth(config: RunConfig) -> CommandResponse:
    """
    Bandwidth report. Plugin mode tabulates the asymptotic MISE around the plugin value,
    with the cross-validation scores alongside when ``with_cv`` is set; cv mode adds the
    cross-validation profile; fixed mode scores the given sigma.
    """
    samples = FileProcessor.read_samples(config.input_path)
    spec = _base_spec(config)
    mode = config.bandwidth_mode
    fitted = spec.asymptotics_available and samples.n >= 2 and samples.log_std > 0

    if mode is BandwidthMode.PLUGIN:
        plugin = plugin_from_samples(spec, samples)
        sigmas = grid_from_spec(config.grid) if config.grid else default_sigma_grid(spec, samples)
        curve = [mise_lognormal_reference(spec, samples.log_mean, samples.log_std, samples.n, float(s))
                 for s in sigmas]
        table = pd.DataFrame({"sigma": sigmas, "asymptotic_mise": curve})
        selected, extra = plugin, {"plugin_sigma": plugin}
        if config.with_cv:
            profile = cv_profile(spec, samples, sigmas, workers=config.workers)
            table.insert(1, "cv_score", profile.cv_scores)
            extra["cv_argmin"] = profile.cv_argmin
    else:
        if mode is BandwidthMode.FIXED:
            sigmas = np.array([float(config.sigma)])
        else:
            sigmas = grid_from_spec(config.grid) if config.grid else default_sigma_grid(spec, samples)
        profile = cv_profile(spec, samples, sigmas, workers=config.workers)
        table = pd.DataFrame({"sigma": profile.sigmas, "cv_score": profile.cv_scores})
        if profile.asymptotic_mise is not None:
            table["asymptotic_mise"] = profile.asymptotic_mise
        extra = {"cv_argmin": profile.cv_argmin}
        if fitted:
            extra["plugin_sigma"] = plugin_bandwidth(spec, samples.log_mean, samples.log_std, samples.n)
        selected = float(config.sigma) if mode is BandwidthMode.FIXED else profile.cv_argmin

    metadata = _metadata(config, spec, bandwidth=_bandwidth_label(config), n=samples.n, selected_sigma=selected, **extra)
    return CommandResponse(content=render(table, metadata, config.output_format), status_code=0,
                           selected_sigma=selected, details=dict(extra))


def simulation_sigma_grid(spec: KernelSpec, generating: LogNormalRef, n: int, count: int) -> np.ndarray:
    """
    Shared grid for every replication: [plugin/5, 5 plugin] for the true reference.

    For the improper RIG estimator the top is capped at 0.99 times the square root of the
    1/(n + 1) quantile, a typical smallest sample; replications whose minimum falls lower
    leave the top grid points unscored.
    """
    if spec.asymptotics_available:
        centre = plugin_bandwidth(spec, generating.mu, generating.log_sd, n)
        lo, hi = centre / 5.0, centre * 5.0
    else:
        lo, hi = 0.01, 2.0
    if spec.family is KernelFamily.RECIPROCAL_INVERSE_GAUSSIAN and spec.role is KernelRole.IMPROPER:
        top = 0.99 * math.sqrt(generating.ppf(1.0 / (n + 1)))
        if hi > top:
            hi, lo = top, min(lo, top / 25.0)
    return np.geomspace(lo, hi, count)


def cmd_simulate(config: RunConfig) -> CommandResponse:
    """
    Cross-validation profiles of seeded log-normal replications, one row per
    (replication, sigma), followed by 5/50/95% envelope rows per sigma.

    The cv_mise column adds the true int f^2 to the score so it estimates the MISE.
    """
    spec = _base_spec(config)
    generating = LogNormalRef(config.mu, config.log_sd)
    replications = min(config.replications, QUICK_REPLICATIONS) if config.quick else config.replications
    if config.grid:
        sigmas = grid_from_spec(config.grid)
    else:
        count = QUICK_SIMULATION_GRID_POINTS if config.quick else SIMULATION_GRID_POINTS
        sigmas = simulation_sigma_grid(spec, generating, config.n, count)
    offset = ln_integral_of_square(generating)

    def one(r: int):
        samples = ln_sample(generating, config.n, config.seed, stream=(r,))
        return cv_profile(spec, samples, sigmas, workers=1)

    profiles = replicate(one, replications, config.seed, config.workers)
    rows = []
    for r, profile in enumerate(profiles):
        for i, sigma in enumerate(profile.sigmas):
            rows.append({
                "row": "replication", "replication": r, "quantile": np.nan, "sigma": sigma,
                "cv_score": profile.cv_scores[i], "cv_mise": profile.cv_scores[i] + offset,
                "asymptotic_mise": np.nan if profile.asymptotic_mise is None else profile.asymptotic_mise[i],
                "cv_argmin": profile.cv_argmin,
                "plugin_sigma": np.nan if profile.plugin_sigma is None else profile.plugin_sigma,
            })

    scores = np.vstack([p.cv_scores for p in profiles])
    curves = [p.asymptotic_mise for p in profiles]
    has_curves = all(c is not None for c in curves)
    score_bands = np.nanquantile(scores, ENVELOPE_QUANTILES, axis=0)
    curve_bands = np.quantile(np.vstack(curves), ENVELOPE_QUANTILES, axis=0) if has_curves else None
    for q, quantile in enumerate(ENVELOPE_QUANTILES):
        for i, sigma in enumerate(sigmas):
            rows.append({
                "row": "envelope", "replication": np.nan, "quantile": quantile, "sigma": sigma,
                "cv_score": score_bands[q, i], "cv_mise": score_bands[q, i] + offset,
                "asymptotic_mise": curve_bands[q, i] if has_curves else np.nan,
                "cv_argmin": np.nan, "plugin_sigma": np.nan,
            })
    table = pd.DataFrame(rows)
    table["replication"] = table["replication"].astype("Int64")

    argmins = np.array([p.cv_argmin for p in profiles])
    details: Dict[str, object] = {"median_cv_argmin": float(np.median(argmins))}
    extra: Dict[str, object] = {}
    if spec.asymptotics_available:
        plugin = plugin_bandwidth(spec, generating.mu, generating.log_sd, config.n)
        details["plugin_sigma"] = plugin
        details["band_fraction"] = float(np.mean(np.abs(argmins / plugin - 1.0) <= 0.4))
        extra["plugin_sigma"] = plugin
    metadata = _metadata(config, spec, mu=config.mu, log_sd=config.log_sd, n=config.n,
                         replications=replications, seed=config.seed, **extra)
    logger.info("simulated {} replications; median cv argmin {:.6g}", replications, details["median_cv_argmin"])
    return CommandResponse(content=render(table, metadata, config.output_format), status_code=0,
                           selected_sigma=details["median_cv_argmin"], details=details)


def cmd_verify(config: RunConfig) -> CommandResponse:
    from src.cli.verify import run_acceptance, results_table

    results = run_acceptance(config)
    metadata = {"command": config.command.value, "seed": config.seed, "quick": config.quick,
                "tolerance_scale": config.tolerance_scale, "version": __version__}
    failed = [r.name for r in results if not r.passed]
    return CommandResponse(content=render(results_table(results), metadata, config.output_format),
                           status_code=1 if failed else 0,
                           error=f"failed criteria: {', '.join(failed)}" if failed else None,
                           details={"results": results})


COMMANDS: Dict[Command, Callable[[RunConfig], CommandResponse]] = {
    Command.ESTIMATE: cmd_estimate,
    Command.BANDWIDTH: cmd_bandwidth,
    Command.VERIFY: cmd_verify,
    Command.SIMULATE: cmd_simulate,
}


def run_command(config: RunConfig, handler: Optional[Callable[[RunConfig], CommandResponse]] = None) -> CommandResponse:
    """
    Run a command and turn package errors into a response carrying their exit code.

    Args:
        config (RunConfig): Validated run configuration
        handler (Optional[Callable]): Override for the command's handler

    Returns:
        CommandResponse: Rendered output or the error, with timing
    """
    handler = handler or COMMANDS[config.command]
    start = time.perf_counter()
    try:
        response = handler(config)
    except KdeError as e:
        logger.error("{} failed: {}", config.command.value, e)
        response = CommandResponse(content="", status_code=e.exit_code, error=str(e))
    response.command = config.command.value
    response.processing_time = time.perf_counter() - start
    return response
