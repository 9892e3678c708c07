"""Service layer: one handler per command, plus the FastAPI app.

The CLI calls the same run_* handlers in-process; the app wraps them as
POST endpoints with the error taxonomy mapped to HTTP statuses
(validation 400, capacity 413, accuracy 500).  All handlers are pure
request -> Report functions; per-modulus tables and kernel grids are
cached inside the library, which is what makes the long-running service
worthwhile.
"""

from __future__ import annotations

import math
import random

import numpy as np

from . import central, empirical, kernels, moments, optimize
from .characters import (
    enumerate_characters,
    even_orthogonality_rhs,
    even_primitive_pair_sum_exact,
)
from .errors import AccuracyError, CapacityError, NonvanishError, SpecValidationError
from .rpoly import frac_str
from .schemas import (
    CensusRequest,
    EmpiricalRequest,
    KernelsRequest,
    MomentsRequest,
    OptimizeRequest,
    OraclesRequest,
    ProportionRequest,
    Report,
    ScanRequest,
    ShiftedRequest,
)


def run_proportion(req: ProportionRequest) -> Report:
    spec = req.spec.to_spec()
    s1 = moments.first_moment_main(spec)
    lam = moments.second_moment_main(spec)
    prop = moments.nonvanishing_proportion(spec)
    return Report(
        command="proportion",
        config=req.model_dump(),
        results={
            "spec": spec.to_dict(),
            "s1_main": frac_str(s1),
            "lambda": frac_str(lam),
            "proportion": frac_str(prop),
            "decimals": {
                "s1_main": float(s1),
                "lambda": float(lam),
                "proportion": float(prop),
            },
            "warnings": list(spec.warnings),
        },
    )


def run_optimize(req: OptimizeRequest) -> Report:
    from fractions import Fraction

    model = optimize.build_forms(
        req.dp, req.dq, Fraction(req.theta1), Fraction(req.theta2)
    )
    res = optimize.maximize_proportion(model)
    return Report(
        command="optimize",
        config=req.model_dump(),
        results={"optimum": res.to_dict(), "basis": list(model.basis)},
    )


def run_scan(req: ScanRequest) -> Report:
    from fractions import Fraction

    rows = optimize.degree_scan(
        req.max_dp, req.max_dq, Fraction(req.theta1), Fraction(req.theta2)
    )
    return Report(
        command="scan",
        config=req.model_dump(),
        results={
            "rows": [r.to_dict() for r in rows],
            "csv": optimize.scan_csv(rows),
        },
    )


def run_moments(req: MomentsRequest) -> Report:
    spec = req.spec.to_spec()
    report = moments.moments_report(spec, req.q, req.shifts or None)
    return Report(command="moments", config=req.model_dump(), results=report)


def run_shifted(req: ShiftedRequest) -> Report:
    spec = req.spec.to_spec()
    lny2 = float(spec.theta2) * math.log(req.q)
    r1 = moments.shifted_cross_moment(spec, req.q, req.alpha, req.beta, method=req.method)
    r2 = moments.shifted_psi2_square_moment(spec, req.q, req.alpha, req.beta, method=req.method)
    return Report(
        command="shifted",
        config=req.model_dump(),
        results={
            "alpha": req.alpha,
            "beta": req.beta,
            "I": moments.shifted_psi2_first_moment(spec, req.alpha * lny2),
            "J1": r1.value,
            "J2": r2.value,
            "method": req.method,
            "convergence": {"J1": r1.convergence, "J2": r2.convergence},
        },
    )


def run_empirical(req: EmpiricalRequest) -> Report:
    spec = req.spec.to_spec()
    values = central.central_values_smoothed(req.q, 0.0)
    rec = empirical.empirical_moments(req.q, spec, values, req.threshold)
    mv = empirical.mollifier_values(req.q, spec)
    return Report(
        command="empirical",
        config=req.model_dump(),
        results={
            "record": rec.to_dict(),
            "y1": mv.y1,
            "y2": mv.y2,
            "cauchy_schwarz_strict": bool(
                rec.s2_emp is not None and rec.s2_emp > rec.s1_emp**2
            ),
        },
    )


def run_census(req: CensusRequest) -> Report:
    spec = req.spec.to_spec()
    records = []
    for q in req.q_list:
        values = central.central_values_smoothed(q, 0.0)
        if req.with_moments and values.size:
            records.append(empirical.empirical_moments(q, spec, values, req.threshold))
        else:
            records.append(empirical.nonvanishing_census(q, values, req.threshold))
    return Report(
        command="census",
        config=req.model_dump(),
        results={
            "rows": [r.to_dict() for r in records],
            "csv": empirical.census_csv(records),
        },
    )


def run_kernels(req: KernelsRequest) -> Report:
    points = []
    for p in req.points:
        spec = kernels.KernelSpec(
            kind=p.kind,
            alpha=p.alpha,
            beta=p.beta,
            contour_re=p.contour_re,
            truncation_T=p.truncation_T,
            node_count=p.node_count,
        )
        points.append(
            {"kind": p.kind, "x": p.x, "value": kernels.kernel_by_spec(p.x, spec)}
        )
    mellin = [
        {"i": mp.i, "y": mp.y, "h": mp.h, "value": kernels.power_log_profile(mp.i, mp.y, mp.h)}
        for mp in req.mellin
    ]
    return Report(
        command="kernels",
        config=req.model_dump(),
        results={"points": points, "mellin": mellin},
    )


def run_oracles(req: OraclesRequest) -> Report:
    if req.which == "orthogonality":
        if req.q is None:
            raise SpecValidationError("orthogonality oracle needs q")
        table = enumerate_characters(req.q)
        rng = random.Random(req.seed)
        checks = []
        all_equal = True
        for _ in range(req.count):
            while True:
                m = rng.randrange(1, req.q)
                n = rng.randrange(1, req.q)
                if math.gcd(m * n, req.q) == 1:
                    break
            lhs = even_primitive_pair_sum_exact(m, n, table)
            rhs = even_orthogonality_rhs(m, n, req.q)
            all_equal &= lhs == rhs
            checks.append(
                {"m": m, "n": n, "brute": frac_str(lhs), "closed_form": frac_str(rhs)}
            )
        return Report(
            command="oracles",
            config=req.model_dump(),
            results={"which": req.which, "all_equal": all_equal, "checks": checks},
        )
    if req.which == "twisted":
        if None in (req.q, req.h, req.k):
            raise SpecValidationError("twisted oracle needs q, h, k")
        brute, main = empirical.twisted_moment_check(req.h, req.k, req.q, req.alpha)
        return Report(
            command="oracles",
            config=req.model_dump(),
            results={
                "which": req.which,
                "brute": [brute.real, brute.imag],
                "main_term": [main.real, main.imag],
                "difference": abs(brute - main),
            },
        )
    if req.which == "divisor-integral":
        if req.y1 is None or req.y2 is None:
            raise SpecValidationError("divisor-integral oracle needs y1, y2")
        one = lambda x: np.ones_like(x)  # noqa: E731
        lhs, rhs = empirical.divisor_sum_vs_integral(
            req.order, req.z, one, one, req.y1, req.y2
        )
        return Report(
            command="oracles",
            config=req.model_dump(),
            results={"which": req.which, "lhs": lhs, "rhs": rhs,
                     "ratio": lhs / rhs if rhs else None},
        )
    if req.which == "divisor-bound":
        if req.y1 is None:
            raise SpecValidationError("divisor-bound oracle needs y1")
        lhs, bound = empirical.divisor_sum_bound(req.order, req.sigma, req.y1)
        return Report(
            command="oracles",
            config=req.model_dump(),
            results={"which": req.which, "lhs": lhs, "bound": bound,
                     "ratio": lhs / bound},
        )
    raise SpecValidationError(f"unknown oracle {req.which!r}")


HANDLERS = {
    "proportion": (ProportionRequest, run_proportion),
    "optimize": (OptimizeRequest, run_optimize),
    "scan": (ScanRequest, run_scan),
    "moments": (MomentsRequest, run_moments),
    "shifted": (ShiftedRequest, run_shifted),
    "empirical": (EmpiricalRequest, run_empirical),
    "census": (CensusRequest, run_census),
    "kernels": (KernelsRequest, run_kernels),
    "oracles": (OraclesRequest, run_oracles),
}


def create_app():
    from fastapi import FastAPI
    from fastapi.responses import JSONResponse

    app = FastAPI(
        title="nonvanish",
        description="Two-piece mollifier main terms, proportion optimization, "
        "and central-value verification for even Dirichlet L-functions",
    )

    @app.exception_handler(NonvanishError)
    async def _nonvanish_error(request, exc: NonvanishError):
        status = 400
        kind = "validation"
        if isinstance(exc, CapacityError):
            status, kind = 413, "capacity"
        elif isinstance(exc, AccuracyError):
            status, kind = 500, "accuracy"
        return JSONResponse(
            status_code=status, content={"error": {"kind": kind, "message": str(exc)}}
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/proportion", response_model=Report)
    def proportion(req: ProportionRequest):
        return run_proportion(req)

    @app.post("/optimize", response_model=Report)
    def optimize_(req: OptimizeRequest):
        return run_optimize(req)

    @app.post("/scan", response_model=Report)
    def scan(req: ScanRequest):
        return run_scan(req)

    @app.post("/moments", response_model=Report)
    def moments_(req: MomentsRequest):
        return run_moments(req)

    @app.post("/shifted", response_model=Report)
    def shifted(req: ShiftedRequest):
        return run_shifted(req)

    @app.post("/empirical", response_model=Report)
    def empirical_(req: EmpiricalRequest):
        return run_empirical(req)

    @app.post("/census", response_model=Report)
    def census(req: CensusRequest):
        return run_census(req)

    @app.post("/kernels", response_model=Report)
    def kernels_(req: KernelsRequest):
        return run_kernels(req)

    @app.post("/oracles", response_model=Report)
    def oracles(req: OraclesRequest):
        return run_oracles(req)

    return app


app = create_app()
