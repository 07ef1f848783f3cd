import logging
import math
from typing import Any, Callable, Dict, List

import numpy as np

from lpbox.analysis.kernels import composition_check
from lpbox.analysis.oracles import FixtureRecorder, weyl_integral
from lpbox.analysis.special_functions import MultiIndex
from lpbox.analysis.spectral import (
    HermiteExpansion,
    apply_operator,
    heat_action,
    inner_product,
    intertwining_defect,
    inverse_sqrt,
    kernel_heat_action,
    ordinary_time_derivative,
    plancherel_check,
    polarization_check,
    riesz_transform,
    space_derivative,
)
from lpbox.models.data_models import ExperimentConfig, ExperimentReport
from lpbox.services.corpus_service import CorpusService
from lpbox.services.report_service import Stopwatch, start_report
from lpbox.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

ALGEBRAIC_TOLERANCE = 1e-14
QUADRATURE_TOLERANCE = 1e-6
KERNEL_TOLERANCE = 1e-7
WEYL_TOLERANCE = 1e-5
INTERTWINING_TIMES = (0.1, 1.0, 3.0)
WEYL_ORDERS = (0.25, 0.5, 0.75, 1.5)
WEYL_RATES = tuple(float(lam) for lam in range(1, 11))
# Gram and kernel quadratures grow as points^n.
QUADRATURE_MAX_DIMENSION = 2


def _relative(difference: float, reference: HermiteExpansion) -> float:
    scale = float(np.max(np.abs(reference.coefficients))) if reference.indices else 0.0
    return difference / scale if scale > 0 else difference


class IdentityService:
    """
    Spectral identities: exact coefficient algebra (eigenrelation, Riesz rule,
    intertwining) and quadrature-mediated checks (polarization, Plancherel,
    semigroup composition, kernel versus spectral actions, Weyl integrals).
    """

    def __init__(self, corpus_service: CorpusService, recorder: FixtureRecorder | None = None):
        self.corpus_service = corpus_service
        self.recorder = recorder or FixtureRecorder()

    def algebraic_rows(self, f: HermiteExpansion, name: str) -> List[Dict[str, Any]]:
        n = f.dimension
        rows = []
        af = apply_operator(f)
        eigen = f.scaled(f.eigenvalues("heat_A"))
        rows.append({"identity": "eigenrelation", "member": name, "n": n,
                     "error": _relative(af.max_coefficient_difference(eigen), eigen)})
        generator = -ordinary_time_derivative(f, 0.0, 1, "heat_A")
        rows.append({"identity": "generator", "member": name, "n": n,
                     "error": _relative(af.max_coefficient_difference(generator), generator)})
        for i in range(1, n + 1):
            riesz = riesz_transform(f, i)
            direct = space_derivative(inverse_sqrt(f), MultiIndex.unit(n, i - 1))
            rows.append({"identity": f"riesz[{i}]", "member": name, "n": n,
                         "error": _relative(riesz.max_coefficient_difference(direct), riesz)})
            for t in INTERTWINING_TIMES:
                rows.append({"identity": f"intertwining[{i},t={t}]", "member": name, "n": n,
                             "error": _relative(intertwining_defect(f, t, i), f)})
        return rows

    def quadrature_rows(self, f: HermiteExpansion, h: HermiteExpansion, name: str) -> List[Dict[str, Any]]:
        n = f.dimension
        polar = polarization_check(f, h)
        formula, quadrature = plancherel_check(f, 1, MultiIndex.zero(n))
        # <f, h> may vanish; errors are measured against ||f|| ||h||.
        scale = math.sqrt(inner_product(f, f) * inner_product(h, h))
        rows = [
            {"identity": "polarization_spectral", "member": name, "n": n,
             "error": abs(polar.lhs_spectral - polar.rhs_spectral) / scale},
            {"identity": "polarization_quadrature", "member": name, "n": n,
             "error": abs(polar.lhs_quadrature - polar.rhs_quadrature) / scale},
            {"identity": "plancherel", "member": name, "n": n,
             "error": abs(formula - quadrature) / max(abs(formula), 1e-300)},
        ]
        self.recorder.record("inner_product", {"member": name, "n": n}, polar.lhs_spectral)
        return rows

    def kernel_rows(self, f: HermiteExpansion, name: str, rng: np.random.Generator) -> List[Dict[str, Any]]:
        """Kernel quadrature against the spectral action, and the semigroup law."""
        n = f.dimension
        x = rng.uniform(-1.5, 1.5, size=(4, n))
        rows = []
        for t in (0.3, 1.0):
            spectral = heat_action(f, t).evaluate(x)
            kernel = kernel_heat_action(f.evaluate, t, x)
            kernel = kernel if kernel.ndim == 2 else kernel[:, None]
            scale = max(float(np.max(np.abs(spectral))), 1e-300)
            rows.append({"identity": f"kernel_heat[t={t}]", "member": name, "n": n,
                         "error": float(np.max(np.abs(kernel - spectral))) / scale})
        z = rng.uniform(-1.0, 1.0, size=n)
        for m1, m2 in ((0, 0), (1, 0), (1, 1), (2, 1)):
            closed, quadrature = composition_check(x[0], z, 0.4, 0.7, m1, m2)
            rows.append({"identity": f"composition[m1={m1},m2={m2}]", "member": name, "n": n,
                         "error": abs(closed - quadrature) / max(abs(closed), 1e-300)})
            self.recorder.record("composition", {"x": x[0].tolist(), "z": z.tolist(), "t": 0.4, "s": 0.7,
                                                 "m1": m1, "m2": m2}, closed)
        return rows

    def weyl_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for alpha in WEYL_ORDERS:
            for lam in WEYL_RATES:
                t = 0.5
                expected = lam**alpha * np.exp(-lam * t)
                value = weyl_integral(
                    lambda u, lam=lam: np.exp(-lam * u), t, alpha,
                    derivative=lambda u, order, lam=lam: (-lam) ** order * np.exp(-lam * u),
                )
                rows.append({"identity": f"weyl[alpha={alpha},lam={lam}]", "member": "exp", "n": 1,
                             "error": abs(value - expected) / expected})
        return rows

    def run(self, config: ExperimentConfig) -> ExperimentReport:
        clock = Stopwatch()
        report = start_report(config)
        degree = config.identity_degree
        rows: List[Dict[str, Any]] = []
        for n in config.dimensions:
            members = self.corpus_service.random_expansions(n, config.corpus_size, degree)
            eigen = self.corpus_service.eigenfunctions(n, min(degree, 8))
            rows.extend(row for name, f in eigen.items() for row in self.algebraic_rows(f, name))
            rows.extend(row for name, f in members.items() for row in self.algebraic_rows(f, name))

            if n > QUADRATURE_MAX_DIMENSION:
                logger.info(f"spectral-identities: n={n} runs the coefficient identities only.")
                continue
            pairs = list(members.items())
            jobs: List[Callable[[], List[Dict[str, Any]]]] = []
            for j, (name, f) in enumerate(pairs):
                h = pairs[(j + 1) % len(pairs)][1]
                jobs.append(lambda f=f, h=h, name=name: self.quadrature_rows(f, h, name))
                rng = np.random.default_rng([config.seed, n, j])
                jobs.append(lambda f=f, name=name, rng=rng: self.kernel_rows(f, name, rng))
            for chunk in ordered_map(lambda job: job(), jobs, config.threads):
                rows.extend(chunk)
        rows.extend(self.weyl_rows())

        tolerances = self.tolerances()
        worst: Dict[str, float] = {}
        for row in rows:
            family = row["identity"].split("[")[0]
            row["tolerance"] = tolerances[family]
            row["passed"] = row["error"] <= tolerances[family]
            worst[family] = max(worst.get(family, 0.0), row["error"])
        for family, error in sorted(worst.items()):
            report.add_assertion(family, error <= tolerances[family], error, tolerances[family])

        report.tables["identities"] = rows
        report.summary = {"identities": len(rows), "worst": worst}
        report.fixtures = self.recorder.to_document()
        return clock.stop(report)

    @staticmethod
    def tolerances() -> Dict[str, float]:
        return {
            "eigenrelation": ALGEBRAIC_TOLERANCE,
            "generator": ALGEBRAIC_TOLERANCE,
            "riesz": ALGEBRAIC_TOLERANCE,
            "intertwining": ALGEBRAIC_TOLERANCE,
            "polarization_spectral": QUADRATURE_TOLERANCE,
            "polarization_quadrature": QUADRATURE_TOLERANCE,
            "plancherel": QUADRATURE_TOLERANCE,
            "kernel_heat": KERNEL_TOLERANCE,
            "composition": QUADRATURE_TOLERANCE,
            "weyl": WEYL_TOLERANCE,
        }
