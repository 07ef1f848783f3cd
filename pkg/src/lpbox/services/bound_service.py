import logging
from typing import List

from lpbox.analysis.regions import BoundParameters, build_problem, run_problem
from lpbox.analysis.special_functions import MultiIndex
from lpbox.models.data_models import BoundReport, ExperimentConfig, ExperimentReport
from lpbox.services.report_service import Stopwatch, start_report
from lpbox.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

# Bounds whose time norm is a sup and so ignore q.
_Q_FREE = ("acot_deriv", "maximal_kernel")


class BoundService:
    """Samples each kernel estimate and fits its constant."""

    def parameter_sets(self, config: ExperimentConfig, bound_id: str) -> List[BoundParameters]:
        sets = []
        orders = [0] if bound_id == "diferencia" else [m for m in config.orders if m >= 1] or [1]
        degrees = [0] if bound_id == "diferencia" else config.k_degrees
        qs = [config.q_values[0]] if bound_id in _Q_FREE else config.q_values
        for n in config.dimensions:
            for m in orders:
                for degree in degrees:
                    for q in qs:
                        k = MultiIndex((degree,) + (0,) * (n - 1))
                        sets.append(BoundParameters(
                            dimension=n, m=m, k=k, q=q, eta=config.eta, delta=config.delta,
                            time_points=config.time_points or BoundParameters.time_points,
                        ))
        return sets

    def run_one(self, bound_id: str, params: BoundParameters, samples: int, seed: int) -> BoundReport:
        logger.info(f"Sampling bound '{bound_id}' with {params.as_dict()}")
        return run_problem(build_problem(bound_id, params), samples, seed)

    def run(self, config: ExperimentConfig) -> ExperimentReport:
        clock = Stopwatch()
        report = start_report(config)
        jobs = [(bound_id, params) for bound_id in config.bounds for params in self.parameter_sets(config, bound_id)]
        results = ordered_map(lambda job: self.run_one(job[0], job[1], config.samples, config.seed),
                              jobs, config.threads)
        for bound in results:
            label = ",".join(f"{key}={value}" for key, value in sorted(bound.parameters.items()))
            report.add_assertion(f"stable[{bound.bound_id}:{label}]", bound.stable and bound.non_finite == 0,
                                 bound.growth, 0.10)
        report.tables["bounds"] = [bound.to_row() for bound in results]
        report.summary = {
            "bounds": len(results),
            "unstable": sum(not b.stable for b in results),
            "max_fitted_constant": max((b.fitted_constant for b in results), default=None),
        }
        return clock.stop(report)
