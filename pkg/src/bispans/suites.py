"""Seeded property suites behind ``bispans check``.

Each suite pairs a per-instance checker (returning ``None`` or a
counterexample dict) with a random instance generator.  Trial ``i`` draws
from its own generator seeded by ``(seed, i)``, so results do not depend on
how trials are spread over workers.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cache
from typing import Any, Callable

from . import finset
from .arrfib import (ArMor, ar_compose, ar_identity, ev0, is_in_s, is_in_w,
                     w_factor_through_s)
from .bispancat import (Bispan, additive, backward, bispan_canon, bispan_compose, bispan_id,
                        bispan_is_invertible, bispan_sum, multiplicative)
from .finset import FinFun
from .generate import (random_armor, random_arobj, random_bispan, random_fun, random_w_map)
from .semiring import (Boolean, Naturals, Polynomials, Semiring, Tropical,
                       eval_bispan, random_finite_semiring, semiring_check_axioms)
from .serialize import to_json

SUITES = ("functoriality", "associativity", "distributivity", "mate", "ev0-functor",
          "w-inversion", "axioms")


@dataclass
class SuiteResult:
    suite: str
    seed: int
    trials: int
    max_size: int
    checked: int = 0
    counterexample: dict | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def summary(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "trials": self.trials,
                "max_size": self.max_size, "checked": self.checked, "ok": self.ok}


def trial_rng(seed: int, i: int) -> random.Random:
    return random.Random(seed * 1_000_003 + i)


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, int, str)):
        return v
    try:
        return to_json(v)
    except TypeError:
        return repr(v)


# -- functoriality -------------------------------------------------------------

def input_vectors(R: Semiring, n: int, naturals_max: int = 3) -> list[tuple]:
    """Every vector of length ``n`` over a small carrier of ``R``."""
    elems = R.elements()
    if elems is None:
        elems = list(range(naturals_max + 1))
    return list(itertools.product(elems, repeat=n))


def check_functoriality(g: Bispan, f: Bispan, semirings: list[Semiring]) -> dict | None:
    gf = bispan_compose(g, f)
    for R in semirings:
        for psi in input_vectors(R, f.src.size):
            lhs = eval_bispan(gf, R, psi).entries
            rhs = eval_bispan(g, R, eval_bispan(f, R, psi)).entries
            if lhs != rhs:
                return {"law": "eval(g∘f) = eval(g)∘eval(f)", "g": g, "f": f, "semiring": R,
                        "input": list(psi), "composite": list(lhs), "stepwise": list(rhs)}
    return None


def functoriality_semirings(seed: int) -> list[Semiring]:
    return [Naturals(), Boolean(), random_finite_semiring(random.Random(seed))]


def _trial_functoriality(rng: random.Random, max_size: int, seed: int) -> dict | None:
    a, b, c = (rng.randint(0, max_size) for _ in range(3))
    f = random_bispan(rng, a, b, max_size)
    g = random_bispan(rng, b, c, max_size)
    return check_functoriality(g, f, functoriality_semirings(seed))


# -- associativity and identities -------------------------------------------

def check_associativity(h: Bispan, g: Bispan, f: Bispan) -> dict | None:
    left = bispan_canon(bispan_compose(bispan_compose(h, g), f))
    right = bispan_canon(bispan_compose(h, bispan_compose(g, f)))
    if left != right:
        return {"law": "(h∘g)∘f ≅ h∘(g∘f)", "h": h, "g": g, "f": f,
                "left": left, "right": right}
    return None


def check_identities(f: Bispan) -> dict | None:
    c = bispan_canon(f)
    for name, composite in (("id∘f ≅ f", bispan_compose(bispan_id(f.tgt), f)),
                            ("f∘id ≅ f", bispan_compose(f, bispan_id(f.src)))):
        if bispan_canon(composite) != c:
            return {"law": name, "f": f, "composite": composite}
    return None


def _trial_associativity(rng, max_size, seed):
    a, b, c, d = (rng.randint(0, max_size) for _ in range(4))
    f = random_bispan(rng, a, b, max_size)
    g = random_bispan(rng, b, c, max_size)
    h = random_bispan(rng, c, d, max_size)
    return check_associativity(h, g, f) or check_identities(f)


# -- distributivity -------------------------------------------------------------

@cache
def distributivity_witnesses() -> tuple[Bispan, Bispan]:
    """The bispans ``3 ⇒ 1`` computing ``x·(y+z)`` and ``x·y + x·z`` from ``(x, y, z)``."""
    times = multiplicative(FinFun.of((0, 0), 1))
    plus = additive(FinFun.of((0, 0), 1))
    factored = bispan_compose(times, bispan_sum(bispan_id(1), plus))
    duplicate = backward(FinFun.of((0, 1, 0, 2), 3))
    expanded = bispan_compose(plus, bispan_compose(bispan_sum(times, times), duplicate))
    return factored, expanded


@cache
def axiom_witnesses() -> tuple[tuple[str, Bispan, Bispan], ...]:
    """Pairs of bispans whose classes must agree for the semiring laws to hold."""
    times = multiplicative(FinFun.of((0, 0), 1))
    plus = additive(FinFun.of((0, 0), 1))
    one_id = bispan_id(1)
    swap = backward(FinFun.of((1, 0), 2))
    zero = Bispan.of(0, 1, (), (), ())
    unit = Bispan.of(0, 1, (), (), (0,))
    constant_zero = Bispan.of(1, 1, (), (), ())
    out = []
    for name, op, neutral in (("add", plus, zero), ("mul", times, unit)):
        out.append((f"{name}_comm", bispan_compose(op, swap), op))
        out.append((f"{name}_assoc", bispan_compose(op, bispan_sum(op, one_id)),
                    bispan_compose(op, bispan_sum(one_id, op))))
        out.append((f"{name}_unit", bispan_compose(op, bispan_sum(one_id, neutral)), one_id))
    out.append(("zero_absorbing", bispan_compose(times, bispan_sum(one_id, zero)), constant_zero))
    factored, expanded = distributivity_witnesses()
    out.append(("distributivity", factored, expanded))
    return tuple(out)


def check_axiom_witnesses() -> dict | None:
    for name, lhs, rhs in axiom_witnesses():
        if bispan_canon(lhs) != bispan_canon(rhs):
            return {"law": f"{name} witness classes agree", "lhs": lhs, "rhs": rhs}
    return None


def builtin_semirings() -> list[Semiring]:
    return [Naturals(), Boolean(), Tropical(), Polynomials(1)]


def check_distributivity_classes() -> dict | None:
    factored, expanded = distributivity_witnesses()
    if bispan_canon(factored) != bispan_canon(expanded):
        return {"law": "x·(y+z) ≅ x·y + x·z", "factored": factored, "expanded": expanded}
    return None


def check_distributivity_at(R: Semiring, x, y, z) -> dict | None:
    factored, expanded = distributivity_witnesses()
    lhs = eval_bispan(factored, R, (x, y, z)).entries
    rhs = eval_bispan(expanded, R, (x, y, z)).entries
    if lhs != rhs:
        return {"law": "x·(y+z) = x·y + x·z", "semiring": R, "input": [x, y, z],
                "factored": list(lhs), "expanded": list(rhs)}
    return None


def _trial_distributivity(rng, max_size, seed):
    bad = check_distributivity_classes() or check_axiom_witnesses()
    if bad:
        return bad
    for R in builtin_semirings() + [random_finite_semiring(rng)]:
        x, y, z = (R.sample(rng) for _ in range(3))
        bad = check_distributivity_at(R, x, y, z)
        if bad:
            return bad
    return None


# -- mate -----------------------------------------------------------------------

def pullback_square(f: FinFun, eta: FinFun, perm) -> tuple[FinFun, FinFun]:
    """``(f', xi)`` for the pullback of ``f`` and ``eta`` with apex relabelled by ``perm``."""
    pb = finset.pullback(f, eta)
    inv = [0] * len(perm)
    for k, v in enumerate(perm):
        inv[v] = k
    apex = pb.apex
    f_prime = FinFun(apex, eta.dom, tuple(pb.to_right.map[inv[k]] for k in range(apex.size)))
    xi = FinFun(apex, f.dom, tuple(pb.to_left.map[inv[k]] for k in range(apex.size)))
    return f_prime, xi


def check_mate(f: FinFun, f_prime: FinFun, xi: FinFun, eta: FinFun, l: FinFun) -> dict | None:
    result = finset.mate_check(f, f_prime, xi, eta, l)
    if not result:
        return {"law": "mate comparison is bijective over y'", "f": f, "f_prime": f_prime,
                "xi": xi, "eta": eta, "l": l, "comparison": result.comparison}
    return None


def _random_slice(rng, base: int, max_fiber: int) -> FinFun:
    values = [y for y in range(base) for _ in range(rng.randint(0, max_fiber))]
    rng.shuffle(values)
    return FinFun.of(values, base)


def _trial_mate(rng, max_size, seed):
    while True:
        x, y, yp = (rng.randint(0, max_size) for _ in range(3))
        if (x and not y) or (yp and not y):
            continue
        f, eta = random_fun(rng, x, y), random_fun(rng, yp, y)
        n = finset.pullback(f, eta).apex.size
        if n <= max_size:
            break
    perm = list(range(n))
    rng.shuffle(perm)
    f_prime, xi = pullback_square(f, eta, perm)
    return check_mate(f, f_prime, xi, eta, _random_slice(rng, x, 2))


# -- ev0 ------------------------------------------------------------------------

def check_ev0_functor(second: ArMor, first: ArMor) -> dict | None:
    composite = ar_compose(second, first)
    lhs = bispan_canon(ev0(composite))
    rhs = bispan_canon(bispan_compose(ev0(second), ev0(first)))
    if lhs != rhs:
        return {"law": "ev0(g∘f) ≅ ev0(g)∘ev0(f)", "g": second, "f": first,
                "ev0_composite": lhs, "composite_of_ev0": rhs}
    return None


def check_ev0_identity(obj) -> dict | None:
    got = bispan_canon(ev0(ar_identity(obj)))
    if got != bispan_canon(bispan_id(obj.top)):
        return {"law": "ev0(id) ≅ id", "object": obj, "ev0": got}
    return None


def _trial_ev0(rng, max_size, seed):
    a = random_arobj(rng, max_size)
    first = random_armor(rng, a, max_size)
    second = random_armor(rng, first.tgt, max_size)
    return check_ev0_identity(a) or check_ev0_functor(second, first)


# -- W inversion ----------------------------------------------------------------

def check_w_inversion(m: ArMor) -> dict | None:
    if (is_in_w(m) or is_in_s(m)) and not bispan_is_invertible(ev0(m)):
        return {"law": "ev0 inverts W", "m": m, "ev0": ev0(m)}
    if is_in_w(m):
        cert = w_factor_through_s(m)
        if not cert.verified:
            return {"law": "W factors through S", "m": m, "checks": cert.checks}
    return None


def _trial_w(rng, max_size, seed):
    return check_w_inversion(random_w_map(rng, max_size))


# -- semiring axioms ------------------------------------------------------------

def check_axioms(R: Semiring, budget: int, seed: int) -> dict | None:
    report = semiring_check_axioms(R, budget=budget, seed=seed)
    if not report:
        return {"law": "commutative semiring axioms", "semiring": R,
                "failures": {k: list(v) for k, v in report.failures.items()}}
    return None


def _trial_axioms(rng, max_size, seed):
    for R in builtin_semirings() + [random_finite_semiring(rng, max(2, max_size + 2))]:
        bad = check_axioms(R, budget=max(2, max_size + 1), seed=rng.randrange(2**32))
        if bad:
            return bad
    return None


TRIALS: dict[str, Callable[[random.Random, int, int], dict | None]] = {
    "functoriality": _trial_functoriality,
    "associativity": _trial_associativity,
    "distributivity": _trial_distributivity,
    "mate": _trial_mate,
    "ev0-functor": _trial_ev0,
    "w-inversion": _trial_w,
    "axioms": _trial_axioms,
}


def _run_chunk(args) -> tuple[int, dict | None, int]:
    suite, seed, max_size, start, stop = args
    trial = TRIALS[suite]
    for i in range(start, stop):
        bad = trial(trial_rng(seed, i), max_size, seed)
        if bad is not None:
            return i - start + 1, {"trial": i, **bad}, i
    return stop - start, None, stop


def run_suite(suite: str, seed: int, trials: int, max_size: int, threads: int = 1) -> SuiteResult:
    """Run ``trials`` seeded trials; the reported counterexample is the lowest-indexed one."""
    if suite not in TRIALS:
        raise KeyError(suite)
    result = SuiteResult(suite, seed, trials, max_size)
    if threads <= 1 or trials < 2:
        checked, bad, _ = _run_chunk((suite, seed, max_size, 0, trials))
        chunks = [(checked, bad)]
    else:
        step = -(-trials // threads)
        jobs = [(suite, seed, max_size, s, min(s + step, trials)) for s in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = [(c, b) for c, b, _ in pool.map(_run_chunk, jobs)]
    for checked, bad in chunks:
        result.checked += checked
        if bad is not None:
            result.counterexample = _jsonable({"suite": suite, "seed": seed, **bad})
            break
    return result
