"""Verification suites shared by the command line and the acceptance tests.

Every suite returns a list of :class:`Check` records.  A check carries the
measured residual, its tolerance and a pass flag; nothing time dependent is
stored so that reports are reproducible byte for byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .catmap import cat_map_fixed_point_count, count_table, enumerate_periodic_points
from .cech import cup, deligne_cocycle_check
from .functions import parse_function, weil_product
from .integration import stokes_check
from .lattice import Lattice, lattice_reduce
from .mesh import TorusMesh, default_index_map, enumerate_flags
from .models import (
    MODEL_NAMES,
    canonical_form_check,
    flow_tangency_check,
    make_model,
    period_group,
)
from .symbols import (
    boundary_data,
    compare_mod_lattice,
    local_symbol_direct,
    local_symbol_flag,
    product_symbol_prediction,
    reciprocity_sum,
    triple_curvature_residual,
)

CAT_MAP = ((3, 1), (2, 1))
CAT_MAP_2 = ((2, 1), (1, 1))

# (model, f, g, orbit) cases for the flag/direct comparison
ORACLE_CASES: list[tuple[str, str, str, object]] = [
    ("product", "z", "z-2", 0),
    ("product", "z", "z-2", 2),
    ("product", "z", "z-2", "inf"),
    ("product", "z", "z", 0),
    ("product", "z^2-1", "z-3", 1),
    ("product", "z^2-1", "z-3", "inf"),
    ("product", "3", "z", 0),
    ("product", "(z-1)/(z+1)", "z-2i", -1),
    ("product", "2z^2", "z^3/(z-1)", 0),
    ("rotation", "z^3", "z^3-1", 0),
    ("rotation", "z^3", "z^3-1", 1),
    ("rotation", "z^3", "z^3-1", "inf"),
    ("rotation", "z^3-1", "z^3+8", -2),
    ("rotation", "(z^3-1)/z^3", "z^3-8", 0),
]

RECIPROCITY_PAIRS: list[tuple[str, str, str]] = [
    ("product", "z", "z-2"),
    ("product", "z^2-1", "z-3"),
    ("product", "z", "z"),
    ("product", "3", "z+1"),
    ("product", "(z-1)/(z+1)", "z-2i"),
    ("product", "2z", "z^3/(z-1)"),
    ("product", "(z-1+i)^2", "(z+2)/(z-3)"),
    ("rotation", "z^3", "z^3-1"),
    ("rotation", "z^3-1", "z^3+8"),
    ("rotation", "z^3-1", "z^3-1"),
    ("rotation", "(z^3-1)/z^3", "z^3-8"),
]

STABILITY_CASES = ORACLE_CASES[:3] + ORACLE_CASES[4:5] + ORACLE_CASES[9:12]

EXPECTED_PERIODS = {
    "product": (1.0,),
    "rotation": (1.0,),
    "t3_type2": (),
    "t3_type3": (1.0, math.sqrt(2)),
    "t3_linear": (1.0, math.sqrt(2), math.sqrt(3)),
}


@dataclass
class Check:
    suite: str
    name: str
    residual: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "residual": float(self.residual),
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "details": self.details,
        }


def _check(suite, name, residual, tolerance, details=None, passed=None) -> Check:
    ok = residual < tolerance if passed is None else passed
    return Check(suite, name, float(residual), tolerance, bool(ok), details or {})


def _orbit(o):
    return o if isinstance(o, str) else complex(o)


def _orbit_label(o) -> str:
    return o if isinstance(o, str) else f"{complex(o):g}"


# -- suites ----------------------------------------------------------------

def catmap_suite(n_max: int = 6) -> list[Check]:
    out = []
    fixed = sorted(enumerate_periodic_points(CAT_MAP, 1))
    expected = [(Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(0))]
    out.append(_check("catmap", "fixed points of [[3,1],[2,1]]", 0.0, 1.0,
                      {"count": cat_map_fixed_point_count(CAT_MAP, 1), "points": [[str(a), str(b)] for a, b in fixed]},
                      passed=fixed == expected and cat_map_fixed_point_count(CAT_MAP, 1) == 2))
    for A in (CAT_MAP, CAT_MAP_2):
        table = count_table(A, n_max)
        bad = sum(not row["match"] for row in table)
        out.append(_check("catmap", f"counts vs brute force {A} n=1..{n_max}", bad, 1, {"table": table}))
    return out


def canonical_suite(samples: int = 10_000, seed: int = 0) -> list[Check]:
    out = []
    for name in MODEL_NAMES:
        model = make_model(name)
        rep = canonical_form_check(model, samples, seed)
        worst = max([rep.leaf_residual, rep.d_omega_residual, *rep.flow_residuals.values()])
        out.append(_check("canonical", f"{name} omega", worst, 1e-9, rep.to_dict(), passed=rep.passed))
        if rep.integrability_residual is not None:
            out.append(_check("canonical", f"{name} integrability", rep.integrability_residual, 1e-10))
        for orbit in model.closed_orbits:
            t = flow_tangency_check(model, orbit, seed=seed)
            out.append(_check("canonical", f"{name} orbit {orbit.name} tangency", t.tangency_residual, 1e-9,
                              t.to_dict(), passed=t.passed))
    return out


def periods_suite() -> list[Check]:
    out = []
    for name in MODEL_NAMES:
        rep = period_group(make_model(name))
        expected = EXPECTED_PERIODS[name]
        got = rep.lattice.generators
        same = len(got) == len(expected) and all(abs(a - b) < 1e-8 for a, b in zip(got, expected))
        out.append(_check("periods", f"{name} period group", rep.max_error, 1e-8, rep.to_dict(),
                          passed=same and rep.max_error < 1e-8))
    return out


def cocycle_suite(sample_count: int = 5, max_r: int = 4, cases=None) -> list[Check]:
    out = []
    mesh = TorusMesh(1)
    counts = [len(enumerate_flags(mesh, 3, i)) for i in range(3)]
    out.append(_check("cocycle", "flag counts at r=1", 0.0, 1.0, {"counts": counts}, passed=counts == [18, 54, 108]))
    chis = {r: TorusMesh(r).euler_characteristic() for r in range(1, max_r + 1)}
    out.append(_check("cocycle", "Euler characteristic", max(abs(c) for c in chis.values()), 0.5, {"chi": chis}))
    for model_name, fs, gs, o in cases or (ORACLE_CASES[0], ORACLE_CASES[5], ORACLE_CASES[10]):
        data = boundary_data(make_model(model_name), parse_function(fs), parse_function(gs), _orbit(o))
        cf, cg, cw = data.classes()
        classes = {
            "c(f)": cf, "c(g)": cg, "c(omega)": cw,
            "c(f)c(g)": cup(cf, cg), "c(g)c(omega)": cup(cg, cw), "c(f)c(omega)": cup(cf, cw),
            "(c(f)c(g))c(omega)": data.triple(), "c(f)(c(g)c(omega))": cup(cf, cup(cg, cw)),
        }
        for label, c in classes.items():
            rep = deligne_cocycle_check(c, sample_count)
            out.append(_check("cocycle", f"{model_name} {fs},{gs} @ {_orbit_label(o)}: {label}", rep.max_residual, 1e-9,
                              rep.to_dict(), passed=rep.valid))
        imap = default_index_map(mesh, data.cover)
        lo, hi = data.cover.radial
        st = stokes_check(data.triple(), mesh, imap, lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo))
        out.append(_check("cocycle", f"{model_name} {fs},{gs} @ {_orbit_label(o)}: Stokes on shell", st.residual, 1e-7,
                          st.to_dict()))
    return out


def oracle_suite(cases=None, r: int = 1, order: int = 16, eps: float = 0.1) -> list[Check]:
    out = []
    for model_name, fs, gs, o in cases or ORACLE_CASES:
        model = make_model(model_name)
        f, g = parse_function(fs), parse_function(gs)
        data = boundary_data(model, f, g, _orbit(o), eps)
        a = local_symbol_flag(data, r, order)
        b = local_symbol_direct(data, order, r)
        red = compare_mod_lattice(a.raw, b.raw, data.lattice, 1e-8)
        pred = product_symbol_prediction(f, g, _orbit(o), data.label["period"])
        tame = compare_mod_lattice(a.raw, pred, data.lattice, 1e-8)
        name = f"{model_name} f={fs} g={gs} @ {_orbit_label(o)}"
        details = {"flag": a.to_dict(), "direct": b.to_dict(), "difference": red.to_dict()}
        out.append(_check("oracle", f"flag = direct: {name}", red.residual, 1e-8, details))
        out.append(_check("oracle", f"flag = tame-symbol prediction: {name}", tame.residual, 1e-8, tame.to_dict()))
    return out


def reciprocity_suite(pairs=None, eps: float = 0.1, r: int = 1, order: int = 16,
                      basepoints=(None, 0.5 + 0.5j, -3 + 1j, 4 - 2j)) -> list[Check]:
    out = []
    for model_name, fs, gs in pairs or RECIPROCITY_PAIRS:
        model = make_model(model_name)
        f, g = parse_function(fs), parse_function(gs)
        for base in basepoints:
            res = reciprocity_sum(model, f, g, eps, r, order, log_base=base)
            label = "" if base is None else f" (basepoint {base:g})"
            out.append(_check("reciprocity", f"{model_name} f={fs} g={gs}{label}", res.total.residual, 1e-6,
                              res.to_dict(), passed=res.verdict == "pass"))
        w = weil_product(f, g)
        out.append(_check("reciprocity", f"Weil product {fs},{gs}", abs(w - 1), 1e-9))
    return out


def stability_suite(cases=None, eps: float = 0.1, order: int = 16, curvature_samples: int = 1000) -> list[Check]:
    out = []
    for model_name, fs, gs, o in cases or STABILITY_CASES:
        model = make_model(model_name)
        f, g = parse_function(fs), parse_function(gs)
        data = boundary_data(model, f, g, _orbit(o), eps)
        base = local_symbol_flag(data, 1, order).raw
        variants = {
            "eps/2": local_symbol_flag(boundary_data(model, f, g, _orbit(o), eps / 2), 1, order).raw,
            "r=2": local_symbol_flag(data, 2, order).raw,
            "alternate index map": local_symbol_flag(data, 1, order, "alternate").raw,
            "continued branches": local_symbol_flag(boundary_data(model, f, g, _orbit(o), eps, branch="continued"),
                                                    1, order).raw,
        }
        name = f"{model_name} f={fs} g={gs} @ {_orbit_label(o)}"
        for label, value in variants.items():
            red = compare_mod_lattice(base, value, data.lattice, 1e-7)
            out.append(_check("stability", f"{label}: {name}", red.residual, 1e-7, red.to_dict()))
        out.append(_check("stability", f"curvature of triple: {name}",
                          triple_curvature_residual(data, curvature_samples), 1e-10))
    return out


def lattice_suite(count: int = 1000, max_coeff: int = 1000, seed: int = 0) -> list[Check]:
    out = []
    rng = np.random.default_rng(seed)
    for gens in ((1.0,), (1.0, math.sqrt(2))):
        lat = Lattice(gens, 3)
        wrong = 0
        worst = 0.0
        for _ in range(count):
            coeffs = tuple(int(c) for c in rng.integers(-max_coeff, max_coeff + 1, size=lat.rank))
            res = lattice_reduce(lat.value(coeffs), lat, bound=max(10_000, 2 * max_coeff))
            wrong += res.coefficients != coeffs
            worst = max(worst, res.residual)
        out.append(_check("lattice", f"round trip over {gens}", worst, 1e-9, {"wrong_coefficients": wrong},
                          passed=wrong == 0 and worst < 1e-9))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "catmap": catmap_suite,
    "canonical": canonical_suite,
    "periods": periods_suite,
    "cocycle": cocycle_suite,
    "oracle": oracle_suite,
    "reciprocity": reciprocity_suite,
    "stability": stability_suite,
    "lattice": lattice_suite,
}


def run_suites(names) -> list[Check]:
    checks: list[Check] = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
        checks.extend(SUITES[name]())
    return checks
