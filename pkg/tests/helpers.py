"""Small instance documents built in code for focused tests."""

import numpy as np


def probe_doc(demands, probs=None, capacity=1000.0, price=10.0, efficiency=0.5,
              x_max=0.0, years=(2020,), weight=1.0, co2=None):
    """One node, one gas technology, one hour; one explicit scenario per demand.

    With ``x_max=0`` the first stage is empty, so each scenario's operating
    cost is demand * price / efficiency * weight.
    """
    demands = np.atleast_1d(np.asarray(demands, dtype=float))
    if probs is None:
        probs = np.full(demands.size, 1.0 / demands.size)
    ny = len(years)
    co2 = [0.0] * ny if co2 is None else co2
    return {
        "schema_version": 1, "name": "probe", "years": list(years), "certain_years": [],
        "finance": {"interest_rate": 0.05, "discount_rate": 0.0, "base_year": years[0]},
        "fuels": ["gas"], "sectors": ["industry"],
        "technologies": [{"name": "ocgt", "kind": "thermal", "fuel": "gas",
                          "efficiency": efficiency, "emission_factor": 0.2, "capex": 1e5,
                          "lifetime": 20, "investable": True, "vom": 0.0, "availability": 1.0}],
        "nodes": [{"name": "N", "existing": {"ocgt": [capacity] * ny},
                   "x_max": {"ocgt": [x_max] * ny},
                   "shares": {"industry": 1.0}, "vola": {"industry": 1e4}}],
        "hours": [{"weight": weight, "month": 1}],
        "scenarios": {"explicit": [
            {"name": f"s{i}", "probability": float(p), "demand": {"N": [[float(d)]] * ny},
             "fuel_price": {"gas": [price] * ny}, "co2_price": list(co2)}
            for i, (d, p) in enumerate(zip(demands, probs))
        ]},
    }


# acceptance bookkeeping: one line per criterion in the terminal summary
ACCEPTANCE = {}


def criterion(number, title, budget):
    """Record pass/fail and wall time of an acceptance test; enforce its time budget."""
    import functools
    import time

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - start
                assert elapsed < budget, f"took {elapsed:.2f} s, budget {budget} s"
            except BaseException as exc:
                elapsed = time.perf_counter() - start
                ACCEPTANCE[number] = (False, title, elapsed, f"{type(exc).__name__}: {exc}".splitlines()[0])
                print(f"criterion {number:2d}: FAIL  {title} ({elapsed:.2f} s)")
                raise
            ACCEPTANCE[number] = (True, title, elapsed, "")
            print(f"criterion {number:2d}: PASS  {title} ({elapsed:.2f} s)")
        return run
    return wrap
