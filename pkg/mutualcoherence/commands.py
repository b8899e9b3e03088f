"""Command implementations, each returning the text it writes."""
import logging
from typing import Callable, Dict, List

from tabulate import tabulate

from . import config
from .detection import DetectorKind, contribution_value, count_amplitude_terms, electron_pair_overlap, enumerate_contributions, select_ordering
from .errors import ConfigError, ToleranceExceeded
from .fermi import expectation_str
from .kernel import steady_covariance
from .linalg import lyapunov_residual
from .oracle import multitime_correlation, relative_error
from .runconfig import RunConfig
from .sweep import grid_csv, sweep_g3
from .system import ModeKind
from .util.complex import complex_str
from .wick import default_g3_weights, g3_spec, unnormalized_g3, wick_terms

log = logging.getLogger(__name__)


def cmd_eig(run_config: RunConfig, threads: int) -> str:  # pylint: disable=unused-argument
    """Return the table of drift eigenvalues."""
    lambdas = run_config.system.decomposition.lambdas
    rows = [[index, value.real, value.imag] for index, value in enumerate(lambdas)]
    return tabulate(rows, headers=["k", "Re λ", "Im λ"], floatfmt=".9f") + "\n"


def cmd_covariance(run_config: RunConfig, threads: int) -> str:  # pylint: disable=unused-argument
    """Return the steady covariance table and its Lyapunov residual."""
    system = run_config.system
    covariance = steady_covariance(system)
    labels = [f"{kind.value}{index}" for index, kind in enumerate(system.labels)]
    rows = [[label, *(complex_str(value, precision=9) for value in row)] for label, row in zip(labels, covariance)]
    residual = lyapunov_residual(system.drift, covariance, system.diffusion_matrix)
    return tabulate(rows, headers=["⟨x_d† x_u⟩", *labels], disable_numparse=True) + f"\n\nLyapunov residual: {residual:.3e}\n"


def cmd_g3(run_config: RunConfig, threads: int) -> str:
    """Return the CSV grid of the normalized third-order correlator."""
    system = run_config.system
    df = sweep_g3(run_config.kind, system, default_g3_weights(system), run_config.tau1_axis, run_config.tau2_axis, threads=threads)
    return grid_csv(df)


def cmd_gating(run_config: RunConfig, threads: int) -> str:  # pylint: disable=unused-argument
    """Return the selected ordering, the contributions and the counting-rate survivors of the detection plan."""
    if (plan := run_config.plan) is None:
        raise ConfigError("The gating report requires a detector list.")
    contributions = enumerate_contributions(plan, run_config.distinguishable)
    rows = [
        [term.term_class.value, f"{'+' if term.sign > 0 else '-'}{term.prefactor}", " ".join(term.efficiency_factors), str(term.operator_string), "yes" if term.survives_counting_rate else "no"]
        for term in contributions
    ]
    lines = [
        f"Ordering: {select_ordering(plan)}",
        f"Amplitude terms: {count_amplitude_terms(plan.num_maxwell, plan.num_schrodinger)}",
        "",
        tabulate(rows, headers=["class", "factor", "efficiencies", "operator string", "counting rate"], disable_numparse=True),
        "",
        f"Counting-rate survivors: {sum(term.survives_counting_rate for term in contributions)} of {len(contributions)}",
    ]
    if plan.num_schrodinger == 2 and not run_config.distinguishable:
        lines.append(f"Electron pair overlap: {expectation_str(electron_pair_overlap(plan))}")
    return "\n".join(lines) + "\n"


def cmd_terms(run_config: RunConfig, threads: int) -> str:  # pylint: disable=unused-argument
    """Return the Wick pairings of the third-order correlator at the configured point, and the values of the plan's contributions if times are given."""
    system = run_config.system
    tau1, tau2 = run_config.point
    spec = g3_spec(run_config.kind, *default_g3_weights(system), 0.0, tau2, tau1)
    daggered, undaggered = spec.daggered, spec.undaggered
    terms = wick_terms(system, spec)
    rows = [[" ".join(f"[{undaggered[u]}·{daggered[d]}]" for u, d in enumerate(term.pairing)), complex_str(term.value, precision=9)] for term in terms]
    lines = [
        f"G3_{run_config.kind.value} at τ1={tau1:g} and τ2={tau2:g}: {spec}",
        "",
        tabulate(rows, headers=["pairing", "value"], disable_numparse=True),
        "",
        f"Total: {complex_str(sum(term.value for term in terms), precision=9)}",
    ]
    if (plan := run_config.plan) is not None and run_config.times:
        if missing := sorted(detector.time_symbol for detector in plan.detectors if detector.time_symbol not in run_config.times):
            raise ConfigError(f"The contribution values require the gate times {', '.join(missing)}, which the configured times lack.")
        if shared := sorted({d.position_label for d in plan.of_kind(DetectorKind.MAXWELL)} & {d.position_label for d in plan.of_kind(DetectorKind.SCHRODINGER)}):
            raise ConfigError(f"The positions {', '.join(shared)} carry both Maxwell and Schrödinger detectors, so their mode weights are ambiguous.")
        positions = {detector.position_label: system.unit_weights(ModeKind.OPTICAL if detector.kind == DetectorKind.MAXWELL else ModeKind.MATTER) for detector in plan.detectors}
        contribution_rows = [
            [term.term_class.value, str(term.operator_string), complex_str(contribution_value(term, system, positions, run_config.times, run_config.efficiencies), precision=9)]
            for term in enumerate_contributions(plan, run_config.distinguishable)
        ]
        lines += ["", tabulate(contribution_rows, headers=["class", "operator string", "value"], disable_numparse=True)]
    return "\n".join(lines) + "\n"


def cmd_oracle_check(run_config: RunConfig, threads: int) -> str:  # pylint: disable=unused-argument
    """Return the table of Gaussian-engine and Fock-oracle correlators at the configured points.

    `ToleranceExceeded` carrying the table is raised if any relative error exceeds the allowed tolerance.
    """
    system, kind = run_config.system, run_config.kind
    weights = default_g3_weights(system)
    rows: List[List[str]] = []
    errors: List[float] = []
    for tau1, tau2 in run_config.oracle_points:
        gaussian = unnormalized_g3(kind, system, weights, tau1, tau2)
        oracle = multitime_correlation(system, run_config.fock, g3_spec(kind, *weights, 0.0, tau2, tau1))
        errors.append(relative_error(oracle, gaussian))
        rows.append([f"{tau1:g}", f"{tau2:g}", complex_str(gaussian, precision=9), complex_str(oracle, precision=9), f"{errors[-1]:.2e}"])
    report = tabulate(rows, headers=["τ1", "τ2", f"G3_{kind.value} Gaussian", f"G3_{kind.value} oracle", "relative error"], disable_numparse=True) + "\n"
    if (worst := max(errors, default=0.0)) > config.ORACLE_RELATIVE_TOLERANCE:
        raise ToleranceExceeded(f"The largest relative error {worst:.3g} exceeds {config.ORACLE_RELATIVE_TOLERANCE}.", report=report)
    log.info("The oracle check passed at %s points with the largest relative error %.3g.", len(rows), worst)
    return report


COMMANDS: Dict[str, Callable[[RunConfig, int], str]] = {
    "eig": cmd_eig,
    "covariance": cmd_covariance,
    "g3": cmd_g3,
    "gating": cmd_gating,
    "terms": cmd_terms,
    "oracle-check": cmd_oracle_check,
}
