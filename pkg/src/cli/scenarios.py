"""Scenario runners: build an instance, run a pipeline, collect its checks."""
from __future__ import annotations

import logging
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ando import (
    ando_truncated,
    continuous_pair_dilation,
    continuous_semigroup_report,
    dilation_compression_residual,
    minimal_restriction,
    monomials,
    remove_fixed_vectors,
    schaffer_truncated,
)
from cogen import GeneratorPair, cogenerator_commutation_check, cogenerator_limit_check, eigenvalue_one_check
from index import IndexElement, SubsetMask, group_box
from matcore import CheckReport, ComplexMatrix, isometry_defect, spectral_norm
from regular import (
    IDENTITY_TOL,
    SemigroupFamily,
    brehmer_check,
    brehmer_scan,
    coisometric_dilation,
    doubly_commuting_check,
    doubly_commuting_dilation_check,
    extension_check,
    isometric_from_unitary,
    kernel_gram,
    naimark_truncated,
    regular_identity_report,
    semigroup_law_check,
    unitary_from_isometric,
)

from .config import Scenario, canonical_kind
from .generators import gen_family, gen_generator_pair, random_contraction
from .report import Report

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

# H is co-invariant under the truncated pair, so compression_monotone is a sanity check on roundoff.
MONOTONE_SLACK = 1e-12
CONTINUOUS_BOUND = 0.05
PRESERVATION_TOL = 1e-10
DETERMINACY_TOL = 1e-10

Runner = Callable[[Scenario], List[CheckReport]]


# ----------------------------------------------------------------------
# Instances
# ----------------------------------------------------------------------
def _pair(sc: Scenario) -> Tuple[ComplexMatrix, ComplexMatrix]:
    first, second = sc.operator("T1"), sc.operator("T2")
    if first is not None and second is not None:
        return first, second
    first, second = gen_family(sc.generator, sc.dim, sc.seed).operators
    return first, second


def _family(sc: Scenario) -> SemigroupFamily:
    operators = [op for op in (sc.operator("T1"), sc.operator("T2"), sc.operator("T3")) if op is not None]
    if not operators:
        family = gen_family(sc.generator, sc.dim, sc.seed)
        operators = list(family.operators)
    bases = None if sc.bases is None else [Fraction(base) for base in sc.bases]
    return SemigroupFamily.from_operators(operators, bases)


def _gap_report(subject: str, operators: Dict[str, ComplexMatrix], gap: float) -> CheckReport:
    report = CheckReport(subject)
    for label, operator in operators.items():
        distance = eigenvalue_one_check(operator, gap).distance
        report.record(f"eigenvalue_one_gap_{label}", max(0.0, gap - distance), 0.0, distance=distance)
    return report


# ----------------------------------------------------------------------
# Runners
# ----------------------------------------------------------------------
def _run_schaffer(sc: Scenario) -> List[CheckReport]:
    operator = sc.operator("T")
    if operator is None:
        operator = random_contraction(sc.dim, sc.seed)
    bundle = schaffer_truncated(operator, sc.depth, sc.tolerances.equality)
    report = CheckReport("schaffer", data={"dim_k": bundle.dim})
    report.record("compression", bundle.residuals["compression"], sc.tolerances.equality)
    report.record("isometry_interior", bundle.residuals["isometry_V1"], sc.tolerances.equality)
    return [report]


def _ando_report(bundle, tol: float) -> CheckReport:
    report = CheckReport("ando", data={"dim_k": bundle.dim})
    for name in ("isometry_V1", "isometry_V2", "commutation", "compression"):
        report.record(name, bundle.residuals[name], tol)
    return report


def _run_ando(sc: Scenario) -> List[CheckReport]:
    first, second = _pair(sc)
    bundle = ando_truncated(first, second, sc.depth, tol=sc.tolerances.equality, seed=sc.seed)
    reports = [_ando_report(bundle, sc.tolerances.equality)]
    if sc.generator == "doubly_commuting":
        # The regular dilation of a doubly commuting pair has the same compressions.
        family = SemigroupFamily.from_operators([first, second])
        oracle = naimark_truncated(family, group_box(family.generators, sc.depth), tol=sc.tolerances.equality)
        worst = 0.0
        for m, n in monomials(sc.depth):
            value = oracle.dilation_value(IndexElement.of(m, n))
            worst = max(worst, spectral_norm(bundle.power_compression(m, n) - value))
        oracle_report = CheckReport("naimark_oracle", data={"gns_dim": oracle.dim})
        oracle_report.record("compression_agreement", worst, IDENTITY_TOL)
        reports.append(oracle_report)
    return reports


def _run_reduce(sc: Scenario) -> List[CheckReport]:
    first, second = _pair(sc)
    gap = sc.tolerances.gap
    bundle = ando_truncated(first, second, sc.depth, tol=sc.tolerances.equality, seed=sc.seed)
    reduced, blocks = remove_fixed_vectors(bundle, gap)

    report = blocks.to_check_report("fixed_vectors")
    report.data.update({"dim_before": bundle.dim, "dim_after": reduced.dim, "blocks": blocks.to_dict()})
    preserved = max(
        spectral_norm(bundle.power_compression(m, n) - reduced.power_compression(m, n)) for m, n in monomials(sc.depth)
    )
    report.record("compression_preserved", preserved, PRESERVATION_TOL)
    return [_ando_report(bundle, sc.tolerances.equality), report, _gap_report("reduced_gap", {"U1": reduced.V1, "U2": reduced.V2}, gap)]


def _run_continuous(sc: Scenario) -> List[CheckReport]:
    first, second = sc.operator("A1"), sc.operator("A2")
    pair = GeneratorPair(first, second) if first is not None and second is not None else gen_generator_pair(sc.dim, sc.seed)
    s, t = sc.evaluation
    depths = sorted(set(sc.depths))

    residuals = []
    bundle = None
    report = CheckReport("continuous_dilation", data={"depths": depths, "evaluation": [s, t]})
    for depth in depths:
        bundle = continuous_pair_dilation(pair, depth, gap_tol=sc.tolerances.gap, seed=sc.seed)
        residual = dilation_compression_residual(bundle, s, t)
        residuals.append(residual)
        report.record(f"compression_bound[N={depth}]", residual, CONTINUOUS_BOUND)
        report.record(f"compression_at_zero[N={depth}]", dilation_compression_residual(bundle, 0.0, 0.0), 0.0)
    steps = [later - earlier for earlier, later in zip(residuals, residuals[1:])]
    report.record("compression_monotone", max(steps, default=0.0), MONOTONE_SLACK)
    report.data["residuals"] = residuals

    restricted = minimal_restriction(bundle, [(a, b) for a in sc.grid for b in sc.grid])
    restriction = CheckReport("minimal_restriction", data={"dim_before": bundle.dim, "dim_after": restricted.dim})
    restriction.record("restriction_compression", restricted.residuals["restriction_compression"], sc.tolerances.equality)
    return [
        cogenerator_limit_check(pair.A1),
        cogenerator_commutation_check(pair.A1, pair.A2),
        report,
        continuous_semigroup_report(bundle, sc.grid),
        restriction,
    ]


def _run_brehmer(sc: Scenario) -> List[CheckReport]:
    family = _family(sc)
    s = IndexElement.zero(family.omega_size)
    for generator in family.generators:
        s = s + generator
    members = family.coordinates if sc.subset is None else sc.subset
    reports = [brehmer_check(family, s, SubsetMask(family.omega_size, members), sc.tolerances.equality)]
    box = group_box(family.generators, sc.box_depth)
    scan = brehmer_scan(family, box, sc.tolerances.equality)
    _, verdict = kernel_gram(family, box, sc.tolerances.equality)
    agreement = CheckReport("kernel_agreement", data={"kernel_min_eigenvalue": verdict.min_eigenvalue})
    agreement.record("brehmer_matches_kernel", float(scan.passed != verdict.passed), 0.0)
    return reports + [scan, agreement]


def _determinacy(first, second) -> float:
    worst = 0.0
    for g in first.representable:
        worst = max(worst, spectral_norm(first.dilation_value(g) - second.dilation_value(g)))
    return worst


def _run_naimark(sc: Scenario) -> List[CheckReport]:
    family = _family(sc)
    box = group_box(family.generators, sc.box_depth)
    bundle = naimark_truncated(family, box, tol=sc.tolerances.equality, seed=sc.seed)
    other = naimark_truncated(family, box, tol=sc.tolerances.equality, seed=sc.seed + 1)
    determinacy = CheckReport("gram_determinacy", data={"gns_dim": bundle.dim, "seeds": [sc.seed, sc.seed + 1]})
    determinacy.record("seed_independence", _determinacy(bundle, other), DETERMINACY_TOL)

    restricted = isometric_from_unitary(bundle)
    isometric = CheckReport("isometric_restriction", data={"gns_dim": restricted.dim})
    isometric.record("isometry", restricted.residuals["isometry"], IDENTITY_TOL)
    isometric.record("regular_identity", restricted.residuals["regular_identity"], IDENTITY_TOL)

    extended = unitary_from_isometric(restricted, seed=sc.seed)
    round_trip = CheckReport("unitary_extension", data={"gns_dim": extended.dim})
    for name in ("extends_isometric", "unitarity", "regular_identity"):
        round_trip.record(name, extended.residuals[name], IDENTITY_TOL)

    reports = [regular_identity_report(bundle), semigroup_law_check(bundle), determinacy, isometric, round_trip]
    if len(family.operators) > 1 and doubly_commuting_check(family).passed:
        reports.append(doubly_commuting_dilation_check(restricted))
    if max(isometry_defect(op) for op in family.operators) <= 1e-10:
        reports.append(extension_check(bundle))
    return reports


def _run_coisometric(sc: Scenario) -> List[CheckReport]:
    family = _family(sc) if sc.matrices else gen_family("unitary", sc.dim, sc.seed)
    box = group_box(family.generators, sc.box_depth)
    bundle, report = coisometric_dilation(family, box, tol=sc.tolerances.equality, seed=sc.seed)
    return [report, regular_identity_report(bundle)]


def _run_hunt(sc: Scenario) -> List[CheckReport]:
    """Random commuting pairs: Brehmer verdicts against kernel positivity on the unit box."""

    report = CheckReport("hunt")
    minima: List[float] = []
    kernel_minima: List[float] = []
    for trial in range(sc.trials):
        family = gen_family(sc.generator, sc.dim, sc.seed + trial)
        box = group_box(family.generators, 1)
        scan = brehmer_scan(family, box, sc.tolerances.equality)
        _, verdict = kernel_gram(family, box, sc.tolerances.equality)
        minima.append(scan.data["min_eigenvalue"])
        kernel_minima.append(verdict.min_eigenvalue)
        report.record(f"brehmer_matches_kernel[trial={trial}]", float(scan.passed != verdict.passed), 0.0)
    violations = sum(value < -sc.tolerances.equality for value in minima)
    report.data.update(
        {
            "min_eigenvalues": minima,
            "kernel_min_eigenvalues": kernel_minima,
            "violations": violations,
            "quantiles": [float(q) for q in np.quantile(minima, (0.0, 0.5, 1.0))],
        }
    )
    log.info("hunt: %d of %d trials violate the Brehmer condition", violations, sc.trials)
    return [report]


RUNNERS: Dict[str, Runner] = {
    "schaffer": _run_schaffer,
    "ando": _run_ando,
    "reduce": _run_reduce,
    "continuous": _run_continuous,
    "brehmer": _run_brehmer,
    "naimark": _run_naimark,
    "coisometric": _run_coisometric,
    "hunt": _run_hunt,
}


def run_scenario(sc: Scenario, runners: Optional[Dict[str, Runner]] = None) -> Report:
    """Run ``sc`` and collect every applicable check into a :class:`Report`.

    Library errors propagate unchanged; the command line maps them to exit code 2.
    """

    runner = (runners or RUNNERS)[canonical_kind(sc.kind)]
    log.info("run_scenario: kind=%s seed=%d", sc.kind, sc.seed)
    started = time.perf_counter()
    parts = runner(sc)
    report = Report.from_reports(sc.echo(), parts, seed=sc.seed, expected_verdict=sc.expected_verdict)
    report.wall_time = time.perf_counter() - started
    log.info("run_scenario: verdict=%s expected=%s digest=%s", report.verdict, report.expected_verdict, report.digest)
    return report


__all__ = ["RUNNERS", "run_scenario"]
