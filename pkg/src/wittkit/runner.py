"""Suite runners behind the command line.

Each suite turns a spec file, a window, a seed and a trial count into a
list of checks.  A check records what theory expects, what was observed,
and on failure a counterexample written in the element grammar so it can
be fed back to ``parse_element``.  Checks are sorted by key before the
report is assembled, which keeps the output independent of evaluation
order.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .foundations import Window, multiindices, scalar_str
from .io.expr import basis_label, format_element
from .io.specfile import SpecFile, serialize
from .modules import (
    ModuleSpec,
    claims_suite,
    eigenspace_dimension,
    module_axiom_residual,
    quotient_weight_multiplicity,
    sample_pairs,
)
from .witt import _random_coeff

SUITES = ("structure", "module-axioms", "claims", "simplicity", "isomorphism",
          "constraints", "nonexistence", "weights")
SCHEMA_VERSION = 1
MAX_SUPPORT = 4


class UsageError(ValueError):
    """Bad suite name, window or module selection; the CLI exits with 2."""


@dataclass
class Check:
    key: str
    name: str
    status: str  # pass | fail | skip
    expected: str
    observed: str
    details: list = field(default_factory=list)
    counterexample: dict | None = None

    def as_dict(self) -> dict:
        return {
            "key": self.key,
            "name": self.name,
            "status": self.status,
            "expected": self.expected,
            "observed": self.observed,
            "details": list(self.details),
            "counterexample": self.counterexample,
        }


def _check(key, name, ok, expected, observed, details=(), counterexample=None) -> Check:
    return Check(key, name, "pass" if ok else "fail", expected, observed, list(details),
                 None if ok else counterexample)


def _skip(key, name, why) -> Check:
    return Check(key, name, "skip", "not applicable", why)


def _random_function(A, rng: random.Random, gamma_bound: int, level_bound: int):
    idxs = multiindices(A.sig.n_t, level_bound)
    terms = {}
    for _ in range(rng.randint(1, MAX_SUPPORT)):
        alpha = tuple(rng.randint(-gamma_bound, gamma_bound) for _ in range(A.lattice.dim))
        terms[(alpha, rng.choice(idxs))] = _random_coeff(rng)
    return A.element(terms)


def _coords(c) -> str:
    return "(" + ", ".join(str(x) for x in c) + ")"


# ---------------------------------------------------------------------------
# suites


def suite_structure(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    W = spec.W
    A = W.A
    rng = random.Random(seed)
    g, lv = window.gamma_bound, window.level_bound

    def rand():
        return W.random_element(g, lv, rng.randint(1, MAX_SUPPORT), rng=rng)

    anti = jac = rep = None
    for _ in range(trials):
        u, v, w = rand(), rand(), rand()
        if anti is None:
            r = W.bracket(u, v) + W.bracket(v, u)
            if r:
                anti = {"u": format_element(u), "v": format_element(v), "residual": format_element(r)}
        if jac is None:
            r = (W.bracket(u, W.bracket(v, w)) + W.bracket(v, W.bracket(w, u))
                 + W.bracket(w, W.bracket(u, v)))
            if r:
                jac = {"u": format_element(u), "v": format_element(v), "w": format_element(w),
                       "residual": format_element(r)}
        if rep is None:
            f = _random_function(A, rng, g, lv)
            lhs = W.act_on_algebra(W.bracket(u, v), f)
            rhs = W.act_on_algebra(u, W.act_on_algebra(v, f)) - W.act_on_algebra(v, W.act_on_algebra(u, f))
            if lhs != rhs:
                rep = {"u": format_element(u), "v": format_element(v), "f": format_element(f),
                       "residual": format_element(lhs - rhs)}
    n = f"{trials} seeded samples"
    return [
        _check("structure/antisymmetry", "[u,v] + [v,u] = 0", anti is None, "0 for every sample",
               "0" if anti is None else "nonzero", [n], anti),
        _check("structure/jacobi", "Jacobi identity", jac is None, "0 for every sample",
               "0" if jac is None else "nonzero", [n], jac),
        _check("structure/derivations", "[u,v] f = u(v f) - v(u f) on the algebra", rep is None,
               "0 for every sample", "0" if rep is None else "nonzero", [n], rep),
    ]


def suite_module_axioms(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    out = []
    for name in modules:
        M = spec.module(name)
        bad = None
        for g, h, v in sample_pairs(M, trials, seed, window.gamma_bound, window.level_bound, MAX_SUPPORT):
            r = module_axiom_residual(M, g, h, v)
            if r:
                bad = {"g": format_element(g), "h": format_element(h), "v": format_element(v),
                       "residual": format_element(r)}
                break
        out.append(_check(f"module-axioms/{name}", f"g(hv) - h(gv) = [g,h]v on {name}", bad is None,
                          "0 for every sample", "0" if bad is None else "nonzero",
                          [M.spec.describe(), f"{trials} seeded samples"], bad))
    return out


def suite_claims(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    out = []
    for name in modules:
        M = spec.module(name)
        if M.spec.family != "GeneralAb" or M.killed:
            out.append(_skip(f"claims/{name}", f"closed-form identities on {name}",
                             "the identities are stated for GeneralAb modules"))
            continue
        for rep in claims_suite(M, window.gamma_bound, window.level_bound):
            ce = None
            if rep.failures:
                f = rep.failures[0]
                ce = {"params": {k: _coords(v) if isinstance(v, tuple) else str(v) for k, v in f.params.items()},
                      "lhs": format_element(f.lhs), "rhs": format_element(f.rhs)}
            out.append(_check(f"claims/{name}/{rep.identity}", f"identity {rep.identity} on {name}", rep.ok,
                              "holds on the window", f"{rep.checked - len(rep.failures)}/{rep.checked} hold",
                              [], ce))
    return out


def suite_simplicity(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    from .structure.simplicity import predicted_structure, simplicity_scan

    out = []
    for name in modules:
        M = spec.module(name)
        kind, vec = predicted_structure(M)
        v = simplicity_scan(M, window)
        ok = v.kind == kind and (vec is None or v.vector == vec)
        seen = v.kind + (f" {basis_label(v.vector)}" if v.vector is not None else "")
        want = kind + (f" {basis_label(vec)}" if vec is not None else "")
        details = [M.spec.describe() + (" modulo its trivial vector" if M.killed else ""),
                   f"graph: {v.nodes} nodes, {v.edges} edges"]
        if v.basis and v.kind != "trivial_submodule_found":
            details.append(f"submodule meets the window in {len(v.basis)} basis vectors")
        ce = {"submodule": [basis_label(k) for k in v.basis[:16]]}
        out.append(_check(f"simplicity/{name}", f"submodule structure of {name}", ok, want, seen, details, ce))
    return out


def suite_isomorphism(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    from .structure.isomorphism import (
        check_isomorphism,
        describe_table,
        predicted_isomorphic,
        verify_intertwiner,
    )

    if len(modules) < 2:
        raise UsageError("the isomorphism suite needs two modules (repeat --module)")
    out = []
    for a, b in zip(modules, modules[1:]):
        A, B = spec.module(a), spec.module(b)
        key = f"isomorphism/{a}~{b}"
        title = f"{a} isomorphic to {b}"
        expect = predicted_isomorphic(A, B)
        if expect is None:
            out.append(_skip(key, title, "the classification makes no statement about this pair"))
            continue
        src, dst = (B, A) if B.killed and not A.killed else (A, B)
        details = [] if src is A else [f"map searched from {b} to {a}"]
        v = check_isomorphism(src, dst, window)
        details.append(v.reason)
        if v.found:
            checks, fail = verify_intertwiner(src, dst, v.table, window)
            details.append(f"independent recheck: {checks} equivariance checks")
            if fail is not None:
                details.append(f"recheck fails on {basis_label(fail[0])} . {basis_label(fail[1])}")
                v.kind = "ruled_out"
        details += [f"  {scalar_str(m)} * ({t})" for m, t in v.witness[:12]]
        ok = v.found == expect
        ce = {"witness": [f"{scalar_str(m)} * ({t})" for m, t in v.witness[:12]],
              "map": describe_table(v.table, limit=12)}
        out.append(_check(key, title, ok, "intertwiner_found" if expect else "ruled_out",
                          v.kind, details, ce))
    return out


def _constraint_module(spec: SpecFile, modules):
    for name in modules:
        M = spec.module(name)
        if M.spec.family == "GeneralAb" and not M.killed and not M.spec.alpha_in_lattice:
            return name, M
    return None, None


def suite_constraints(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    from .structure.constraints import (
        ConstraintSetup,
        check_family,
        determinant_pair,
        find_split,
        monotonicity_check,
        sigma_forms,
        window_sample,
    )

    name, M = _constraint_module(spec, modules)
    if M is None:
        return [_skip("constraints", "level-one constraint system",
                      "needs a GeneralAb module with alpha outside the lattice")]
    S = ConstraintSetup(spec.signature, spec.lattice, M.spec.alpha, M.spec.b)
    sig, b = spec.signature, S.b
    out = []
    bounds = sorted({0, min(1, window.gamma_bound)})
    samples = [window_sample(S, gb) for gb in bounds]
    ok, dims = monotonicity_check(S, samples)
    out.append(_check("constraints/monotone", "solution space shrinks as the sample grows", ok,
                      "non-increasing dimensions", " >= ".join(map(str, dims)),
                      [f"samples at gamma bounds {bounds}"], {"dimensions": [str(d) for d in dims]}))

    box = [mu for mu in S.lattice.box(window.gamma_bound) if any(mu)]
    lam = S.lattice.zero()
    if sig.ell1:
        for mu in box:
            r = next((r for r in S.grading_indices if S.c(mu, r)), None)
            if r is None:
                continue
            for p in range(1, sig.n_t + 1):
                for q in range(1, sig.ell1 + 1):
                    key = f"constraints/det/p{p}q{q}r{r}/mu{_coords(mu)}"
                    D = determinant_pair(S, p, q, r, mu, lam)
                    if b not in (0, 1):
                        ok = D.determinant != 0 and D.forced_zero
                        out.append(_check(key, "level-zero derivation rows force d = 0", ok,
                                          "nonzero determinant, d forced to 0",
                                          f"determinant {scalar_str(D.determinant)}, forced {D.forced_zero}",
                                          D.describe(), {"matrix": D.describe()}))
                    elif b == 0:
                        F = check_family(S, [inst for _, inst in D.recipe], r)
                        out.append(_check(key, "b = 0 rows cut out the one-parameter family", F.matches,
                                          "nullity 1 spanned by the family",
                                          f"nullity {F.report.nullity}, matches {F.matches}",
                                          F.report.describe() + [f"determinant {scalar_str(D.determinant)}"],
                                          {"system": F.report.describe(limit=20)}))
                    else:
                        out.append(_check(key, "determinant vanishes at b = 1", D.determinant == 0,
                                          "determinant 0", f"determinant {scalar_str(D.determinant)}",
                                          D.describe(), {"matrix": D.describe()}))
    for q in S.grading_indices:
        for mu in box:
            forms = sigma_forms(S, q, mu, lam)
            ok = forms["product"] == forms["expanded"]
            split = find_split(S, q, mu, lam)
            details = [f"sigma = {scalar_str(forms['product'])}",
                       "split: " + (" + ".join(_coords(m) for m in split) if split else "none within bound 4")]
            out.append(_check(f"constraints/sigma/q{q}/mu{_coords(mu)}",
                              "sigma expansion agrees and mu splits into good parts",
                              ok and split is not None, "expansion equal, split found",
                              f"expansion equal {ok}, split {'found' if split else 'missing'}", details,
                              {k: scalar_str(v) for k, v in forms.items()}))
    return out


def suite_nonexistence(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    from .structure.nonexistence import ExtensionProblem, compare_with_expected, solve_extension

    sig = spec.signature
    if sig.ell1 + sig.ell2 < 1 or sig.dim < 1:
        return [_skip("nonexistence", "extension candidates", "needs ell1+ell2 >= 1 and ell2+ell3 >= 1")]
    plan = []
    if sig.ell2 >= 1:
        plan += [("A_beta", False), ("B_beta", False)]
    if sig.ell1 == 1 and sig.ell2 == 0:
        plan.append(("A00_plus", True))
    if not plan:
        return [_skip("nonexistence", "extension candidates", "no candidate has a stated outcome here")]
    out = []
    for cand, feasible in plan:
        P = ExtensionProblem(cand, sig, spec.lattice)
        v = solve_extension(P, window)
        details = [f"{v.equations} equations, {v.unknowns} unknowns, {v.rounds} rounds"]
        ok = v.feasible == feasible
        ce = None
        if v.feasible:
            checks, bad = compare_with_expected(P, v, window)
            details.append(f"{len(v.determined)} coefficients determined, {len(v.free)} free")
            details.append(f"{checks} comparisons with the re-indexed quotient action, {len(bad)} mismatches")
            if feasible:
                ok = ok and not bad
            ce = {"mismatches": [str(m) for m in bad[:12]]}
        else:
            coeffs, rhs = v.system.replay(v.combo)
            replay_ok = not coeffs and rhs != 0
            details.append(f"witness of {len(v.witness)} equations replays to 0 = {scalar_str(rhs)}")
            details += [f"  {scalar_str(m)} * ({t})" for m, t in v.witness[:24]]
            ok = ok and replay_ok
            ce = {"witness": [f"{scalar_str(m)} * ({t})" for m, t in v.witness[:24]]}
        out.append(_check(f"nonexistence/{cand}", f"extension candidate {cand}", ok,
                          "feasible" if feasible else "infeasible", v.kind, details, ce))
    return out


def suite_weights(spec: SpecFile, modules, window: Window, seed: int, trials: int) -> list[Check]:
    from .modules import QuotientModule

    sig = spec.signature
    if sig.n_t < 1:
        return [_skip("weights", "weight-zero multiplicity of the quotient", "needs ell1+ell2 >= 1")]
    ms = ModuleSpec("GeneralAb", sig, spec.lattice, alpha=(0,) * sig.dim, b=0)
    gb, lb = min(window.gamma_bound, 1), max(window.level_bound, 2)
    dim = quotient_weight_multiplicity(ms, gb, lb)
    _, kernel = eigenspace_dimension(QuotientModule(ms), (0,) * sig.dim, gb, lb)
    return [_check("weights/quotient", "stage-0 weight-0 dimension of A_{0,0} modulo v_{0,0}",
                   dim == sig.n_t, str(sig.n_t), str(dim),
                   ["basis: " + ", ".join(format_element(k) for k in kernel)],
                   {"kernel": [format_element(k) for k in kernel]})]


RUNNERS = {
    "structure": suite_structure,
    "module-axioms": suite_module_axioms,
    "claims": suite_claims,
    "simplicity": suite_simplicity,
    "isomorphism": suite_isomorphism,
    "constraints": suite_constraints,
    "nonexistence": suite_nonexistence,
    "weights": suite_weights,
}


def run_suite(suite: str, spec: SpecFile, modules=None, window: Window | None = None,
              seed: int = 0, trials: int = 100) -> dict:
    if suite not in RUNNERS:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    window = window or spec.window
    if min(window.gamma_bound, window.level_bound, window.margin) < 0:
        raise UsageError("invalid window: bounds must be nonnegative")
    if suite in ("simplicity", "isomorphism", "nonexistence") and window.margin < 1:
        raise UsageError(f"invalid window: the {suite} suite needs a margin of at least 1")
    if trials < 1:
        raise UsageError("trials must be positive")
    modules = list(modules or spec.modules)
    for m in modules:
        if m not in spec.modules:
            raise UsageError(f"no module named {m!r} in the spec")
    if suite in ("module-axioms", "claims", "simplicity", "isomorphism") and not modules:
        raise UsageError(f"the {suite} suite needs at least one module in the spec")
    start = time.perf_counter()
    checks = sorted(RUNNERS[suite](spec, modules, window, seed, trials), key=lambda c: c.key)
    elapsed = time.perf_counter() - start
    counts = {s: sum(c.status == s for c in checks) for s in ("pass", "fail", "skip")}
    return {
        "schema_version": SCHEMA_VERSION,
        "suite": suite,
        "status": "mismatch" if counts["fail"] else "match",
        "spec": serialize(spec),
        "modules": modules,
        "window": {"gamma": window.gamma_bound, "level": window.level_bound, "margin": window.margin},
        "seed": seed,
        "trials": trials,
        "summary": {"checks": len(checks), "passed": counts["pass"], "failed": counts["fail"],
                    "skipped": counts["skip"]},
        "checks": [c.as_dict() for c in checks],
        "timing": {"seconds": round(elapsed, 3)},
    }
