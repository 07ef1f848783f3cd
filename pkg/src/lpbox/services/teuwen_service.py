import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from lpbox.analysis.kernels import TEUWEN_MAX_ORDER, dt_m_ou
from lpbox.analysis.oracles import (
    EXTENDED_DIGITS,
    SYMBOLIC_MAX_DIMENSION,
    SYMBOLIC_MAX_ORDER,
    FDScheme,
    FixtureRecorder,
    evaluate_table,
    fd_time_derivative,
    mehler_ou_extended,
    symbolic_kernel_derivative,
    table_mismatches,
    teuwen_expansion_table,
)
from lpbox.core.exceptions import CapabilityError
from lpbox.models.data_models import ExperimentConfig, ExperimentReport
from lpbox.services.report_service import Stopwatch, start_report
from lpbox.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

FD_T_RANGE = (0.05, 5.0)
FD_REL_TOL = 1e-7
FD_ABS_FLOOR = 1e-9
FIXTURE_POINTS = 5


def scaled_error(value: float, reference: float) -> float:
    """
    |value - reference| / max(|reference|, FD_ABS_FLOOR / FD_REL_TOL).

    At most FD_REL_TOL exactly when |value - reference| <= max(FD_REL_TOL |reference|, FD_ABS_FLOOR).
    """
    return abs(value - reference) / max(abs(reference), FD_ABS_FLOOR / FD_REL_TOL)


class TeuwenService:
    """Checks the corrected time-derivative expansion of the Mehler kernel."""

    def __init__(self, recorder: FixtureRecorder | None = None):
        self.recorder = recorder or FixtureRecorder()

    def sample_points(self, seed: int, m: int, n: int, count: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        rng = np.random.default_rng([seed, m, n])
        x = rng.standard_normal((count, n))
        y = rng.standard_normal((count, n))
        t = rng.uniform(*FD_T_RANGE, size=count)
        return x, y, t

    def symbolic_row(self, m: int, n: int) -> Dict[str, Any]:
        symbolic = symbolic_kernel_derivative(m, n)
        corrected = table_mismatches(teuwen_expansion_table(m, n, "corrected"), symbolic)
        uncorrected = table_mismatches(teuwen_expansion_table(m, n, "uncorrected"), symbolic)
        return {
            "m": m,
            "n": n,
            "terms": len(symbolic),
            "corrected_mismatches": len(corrected),
            "uncorrected_mismatches": len(uncorrected),
        }

    def numeric_rows(self, m: int, n: int, seed: int, count: int) -> List[Dict[str, Any]]:
        """dt_m_ou against Richardson finite differences, and against the symbolic table when it exists."""
        x, y, t = self.sample_points(seed, m, n, count)
        symbolic = symbolic_kernel_derivative(m, n) if m <= SYMBOLIC_MAX_ORDER and n <= SYMBOLIC_MAX_DIMENSION else None
        rows = []
        for i in range(count):
            value = float(dt_m_ou(x[i], y[i], t[i], m))
            scheme = FDScheme.for_time(float(t[i]), m, digits=EXTENDED_DIGITS)
            fd = fd_time_derivative(lambda s, i=i: mehler_ou_extended(x[i], y[i], s), float(t[i]), m, scheme)
            fd_error = abs(value - float(fd.value))
            fd_scaled = scaled_error(float(fd.value), value)
            row = {
                "m": m,
                "n": n,
                "point": i,
                "t": float(t[i]),
                "value": value,
                "fd_value": float(fd.value),
                "fd_error": fd_error,
                "fd_scaled_error": fd_scaled,
                "fd_ok": fd_scaled <= FD_REL_TOL,
            }
            if symbolic is not None:
                exact = evaluate_table(symbolic, x[i], y[i], float(t[i]))
                row["symbolic_scaled_error"] = scaled_error(value, exact)
            if i < FIXTURE_POINTS:
                self.recorder.record(
                    "dt_m_ou",
                    {"x": x[i].tolist(), "y": y[i].tolist(), "t": float(t[i]), "m": m},
                    value,
                )
            rows.append(row)
        return rows

    def run(self, config: ExperimentConfig) -> ExperimentReport:
        too_high = [m for m in config.orders if m > TEUWEN_MAX_ORDER]
        if too_high:
            raise CapabilityError(f"Orders {too_high} exceed the finite-difference path maximum {TEUWEN_MAX_ORDER}.")

        clock = Stopwatch()
        report = start_report(config)
        cases = [(m, n) for n in config.dimensions for m in config.orders]
        logger.info(f"teuwen-verify: {len(cases)} (m, n) cases, {config.fd_points} points each.")

        symbolic_rows = [self.symbolic_row(m, n) for m, n in cases
                         if m <= SYMBOLIC_MAX_ORDER and n <= SYMBOLIC_MAX_DIMENSION]
        numeric = ordered_map(lambda case: self.numeric_rows(case[0], case[1], config.seed, config.fd_points),
                              cases, config.threads)

        summary_rows = []
        for (m, n), rows in zip(cases, numeric):
            worst = max(r["fd_scaled_error"] for r in rows)
            failures = sum(not r["fd_ok"] for r in rows)
            summary = {"m": m, "n": n, "points": len(rows), "max_fd_scaled_error": worst, "fd_failures": failures}
            report.add_assertion(f"fd_agreement[m={m},n={n}]", failures == 0, worst, FD_REL_TOL)
            if "symbolic_scaled_error" in rows[0]:
                symbolic_worst = max(r["symbolic_scaled_error"] for r in rows)
                summary["max_symbolic_scaled_error"] = symbolic_worst
                report.add_assertion(f"symbolic_values[m={m},n={n}]", symbolic_worst <= FD_REL_TOL,
                                     symbolic_worst, FD_REL_TOL)
            summary_rows.append(summary)

        for row in symbolic_rows:
            m, n = row["m"], row["n"]
            report.add_assertion(f"symbolic_table[m={m},n={n}]", row["corrected_mismatches"] == 0,
                                 float(row["corrected_mismatches"]), 0.0)
            if m >= 1:
                report.add_assertion(
                    f"negative_control[m={m},n={n}]",
                    row["uncorrected_mismatches"] >= 1,
                    float(row["uncorrected_mismatches"]),
                    1.0,
                    detail="the uncorrected sign pattern must disagree with the symbolic table",
                )

        report.tables["teuwen_points"] = [r for rows in numeric for r in rows]
        report.tables["teuwen_summary"] = summary_rows
        if symbolic_rows:
            report.tables["teuwen_symbolic"] = symbolic_rows
        report.summary = {
            "cases": len(cases),
            "max_fd_scaled_error": max(s["max_fd_scaled_error"] for s in summary_rows),
            "negative_control_mismatches": sum(r["uncorrected_mismatches"] for r in symbolic_rows),
        }
        report.fixtures = self.recorder.to_document()
        return clock.stop(report)
