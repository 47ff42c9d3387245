"""Randomized verification suites comparing closed forms with the Fock oracle.

Each suite returns a :class:`SuiteResult`: structured results plus a list of
named residuals, every one of which passes when ``value <= tol``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import bipartite as bp
from . import cp_maps, fock
from . import linalg as la
from .conditioning import (
    conditional_bounds,
    conditional_symbol,
    conditioner_for_target,
    exponential_conditioner,
    normalized_exp_conditioner_fock,
    oracle_conditional_symbol,
    target_kernel,
)
from .errors import FermiCondError, UnknownSuite
from .free_states import FreeState, Monomial, exp_expectation, wick_expectation
from .symbols import (
    DEFAULT_TOL,
    BlockSymbol,
    Tolerances,
    assemble,
    correlation_terms,
    random_block_symbol,
    random_symbol,
)


@dataclass
class Residual:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tol)


@dataclass
class SuiteResult:
    name: str
    results: dict = field(default_factory=dict)
    residuals: list = field(default_factory=list)

    def add(self, name: str, value: float, tol: float) -> None:
        self.residuals.append(Residual(f"{self.name}.{name}", float(value), float(tol)))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.residuals)


def _rng(seed: int, suite: str) -> np.random.Generator:
    return np.random.default_rng([seed, SUITE_IDS[suite]])


def _unit(rng, n):
    v = la.random_vector(rng, n)
    return v / np.linalg.norm(v)


class _Reps(dict):
    def __missing__(self, n):
        self[n] = fock.build_rep(n, cap=fock.HARD_MAX_MODES)
        return self[n]


def _split(rng, modes: int):
    if modes < 2:
        raise FermiCondError("bipartite suites need at least 2 modes")
    d1 = int(rng.integers(1, modes))
    return d1, modes - d1


def _random_l(rng, d2: int, spread: float = 3.0) -> np.ndarray:
    u = la.random_unitary(rng, d2)
    return (u * np.exp(rng.uniform(-spread, spread, d2))) @ la.dag(u)


def suite_car(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    res = SuiteResult("car")
    rng = _rng(seed, "car")
    worst = 0.0
    for n in range(1, modes + 1):
        rep = fock.build_rep(n)
        for _ in range(trials):
            phi, psi = _unit(rng, n), _unit(rng, n)
            a_phi, a_psi = rep.a(phi), rep.a(psi)
            ad_psi = la.dag(a_psi)
            worst = max(
                worst,
                la.op_norm(a_phi @ a_psi + a_psi @ a_phi),
                la.op_norm(a_phi @ ad_psi + ad_psi @ a_phi - la.vdot(phi, psi) * rep.identity()),
            )
    res.results["max_modes_checked"] = modes
    res.add("anticommutator", worst, 1e-12)
    return res


def suite_wick(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    res = SuiteResult("wick")
    rng = _rng(seed, "wick")
    reps = _Reps()
    worst = herm = gauge = n1 = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, modes + 1))
        order = int(rng.integers(1, min(3, n) + 1))
        q = random_symbol(rng, n, pinned=0.2)
        state = FreeState(q)
        rep = reps[n]
        fs = fock.free_density_matrix(q, rep)
        cre = [la.random_vector(rng, n) for _ in range(order)]
        ann = [la.random_vector(rng, n) for _ in range(order)]
        m = Monomial(cre, ann)
        closed = wick_expectation(state, m)
        oracle = fs.expect(fock.monomial_op(rep, cre, ann))
        worst = max(worst, abs(closed - oracle))
        herm = max(herm, abs(wick_expectation(state, m.adjoint()) - np.conj(closed)))
        if order == 1:
            n1 = max(n1, abs(closed - la.vdot(ann[0], q.q @ cre[0])))
        if order < n:
            gauge = max(gauge, abs(fs.expect(fock.monomial_op(rep, cre + [cre[0]], ann))))
    res.add("closed_vs_oracle", worst, 1e-9)
    res.add("adjoint_conjugate", herm, 1e-12)
    res.add("order_one_two_point", n1, 0.0)
    res.add("unequal_counts_vanish", gauge, 1e-12)
    return res


def suite_expdet(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    """Determinant identity ``omega_Q(E(X)) = det(1 - Q + QX)`` and multiplicativity of ``E``."""
    res = SuiteResult("expdet")
    rng = _rng(seed, "expdet")
    reps = _Reps()
    det_worst = mult_worst = adj_worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, modes + 1))
        rep = reps[n]
        q = random_symbol(rng, n, pinned=0.2)
        gen = lambda: la.random_vector(rng, n * n).reshape(n, n)  # noqa: E731
        x, y = expm(0.2 * gen()), expm(0.2 * gen())
        ex, ey = fock.exp_element(rep, x), fock.exp_element(rep, y)
        state = FreeState(q)
        fs = fock.free_density_matrix(q, rep)
        det_worst = max(det_worst, abs(exp_expectation(state, x) - fs.expect(ex)))
        mult_worst = max(mult_worst, la.op_norm(ex @ ey - fock.exp_element(rep, x @ y)))
        adj_worst = max(adj_worst, la.op_norm(la.dag(ex) - fock.exp_element(rep, la.dag(x))))
    res.add("det_identity", det_worst, 1e-8)
    res.add("multiplicativity", mult_worst, 1e-9)
    res.add("adjoint", adj_worst, 1e-9)
    return res


def suite_gamma(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    """Norm bounds of second quantization and of the exponential map."""
    res = SuiteResult("gamma")
    rng = _rng(seed, "gamma")
    n = min(modes, 4)
    rep = fock.build_rep(n)
    lower = upper = positive = emap = 0.0
    for _ in range(trials):
        h = la.random_hermitian(rng, n)
        g = la.op_norm(fock.gamma_fock(rep, h))
        t1 = la.trace_norm(h)
        lower = max(lower, 0.5 * t1 - g)
        upper = max(upper, g - t1)
        p = h @ la.dag(h) / n
        positive = max(positive, abs(la.op_norm(fock.gamma_fock(rep, p)) - np.trace(p).real))
        report = fock.e_map_bounds_check(rep, p)
        emap = max(emap, -min(report["margins"].values()) / np.exp(report["trace_norm"]))
    res.results["modes"] = n
    res.add("half_trace_norm_le_norm", lower, 1e-10)
    res.add("norm_le_trace_norm", upper, 1e-10)
    res.add("positive_norm_is_trace", positive, 1e-10)
    res.add("e_map_bounds", emap, 1e-10)
    return res


def suite_lemma1(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    res = SuiteResult("lemma1")
    rng = _rng(seed, "lemma1")
    reps = _Reps()
    smeared = 0.0
    plain = []
    for _ in range(trials):
        n = int(rng.integers(1, modes + 1))
        rep = reps[n]
        q = random_symbol(rng, n, pinned=0.2)
        phi = la.random_vector(rng, n)
        y = fock.random_gauge_invariant_positive(rep, q, int(rng.integers(2**31)))
        if rng.uniform() < 0.5:
            y = y + fock.random_gauge_invariant(rep, rng)
        variants = fock.lemma1_variants(q, phi, y, rep)
        smeared = max(smeared, variants["smeared"])
        plain.append(variants["plain"])
    res.results["plain_variant_max_residual"] = float(max(plain))
    res.results["confirmed_variant"] = "smeared" if smeared <= 1e-9 < max(plain) else "undecided"
    res.add("smeared_identity", smeared, 1e-9)
    return res


def suite_bounds(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL,
                 blocks: int | None = None) -> SuiteResult:
    """Oracle-conditioned two-point matrices stay within the two-sided bounds.

    Also checks that the number-sector projectors onto the empty and the
    completely filled ``H2`` attain the bounds exactly, that the ``eps = 1e-3``
    conditioners come within ``1e-2`` of them, and that the bounds with
    ``C^-1/2`` in place of ``C^-1`` are violated by these conditioners.
    """
    res = SuiteResult("bounds")
    rng = _rng(seed, "bounds")
    reps = _Reps()
    blocks = blocks or max(2, trials // 10)
    containment = attained = near = 0.0
    half_violation = []
    for _ in range(blocks):
        d1, d2 = _split(rng, modes)
        block = random_block_symbol(d1, d2, int(rng.integers(2**31)), 0.05)
        bounds = conditional_bounds(block, tol)
        rep, rep2 = reps[d1 + d2], reps[d2]
        for _ in range(trials):
            y = fock.random_gauge_invariant_positive(rep2, block.c, int(rng.integers(2**31)))
            a_t = oracle_conditional_symbol(block, y, tol, rep).q
            containment = max(containment, -la.min_eig(a_t - bounds.lower),
                              -la.min_eig(bounds.upper - a_t))
        # the normalization of a projector Y is its omega_C expectation
        fs2 = fock.free_density_matrix(block.c, rep2)
        for sector, end in ((0, bounds.upper), (d2, bounds.lower)):
            proj = fock.number_sector_projector(rep2, sector)
            a_t = oracle_conditional_symbol(block, proj / fs2.expect(proj).real, tol, rep).q
            attained = max(attained, la.op_norm(a_t - end))
        through_c, through_1mc = correlation_terms(block)
        eps = 1e-3
        low_t = conditional_symbol(
            block, conditioner_for_target(block, block.a - (1 - eps) * through_c, eps, tol), tol).q
        up_t = conditional_symbol(
            block, conditioner_for_target(block, block.a + (1 - eps) * through_1mc, eps, tol), tol).q
        near = max(near, la.op_norm(low_t - bounds.lower), la.op_norm(up_t - bounds.upper))
        eye2 = np.eye(d2)
        half_lower = block.a - block.b @ la.herm_func(block.c, lambda w: w**-0.5) @ la.dag(block.b)
        half_upper = block.a + block.b @ la.herm_func(eye2 - block.c, lambda w: w**-0.5) @ la.dag(block.b)
        half_violation.append(max(-la.min_eig(low_t - half_lower), -la.min_eig(half_upper - up_t)))
    res.results["blocks"] = blocks
    res.results["min_half_exponent_violation"] = float(min(half_violation))
    res.add("containment", max(containment, 0.0), 1e-8)
    res.add("sector_projectors_attain_bounds", attained, 1e-8)
    res.add("eps_conditioners_near_bounds", near, 1e-2)
    res.add("half_exponent_not_falsified", float(min(half_violation) <= tol.psd), 0.0)
    return res


def suite_condsym(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    """Closed-form conditional symbols against the Fock oracle."""
    res = SuiteResult("condsym")
    rng = _rng(seed, "condsym")
    reps = _Reps()
    entry = full = valid = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, modes + 1)) if modes >= 2 else modes
        d1, d2 = _split(rng, n)
        block = random_block_symbol(d1, d2, int(rng.integers(2**31)), float(rng.uniform(0.01, 0.2)))
        l = _random_l(rng, d2)
        cond = exponential_conditioner(block, l, tol)
        closed = conditional_symbol(block, cond, tol).q
        y = normalized_exp_conditioner_fock(block, cond, tol)
        oracle = oracle_conditional_symbol(block, y, tol, reps[n]).q
        entry = max(entry, float(np.max(np.abs(closed - oracle))))
        valid = max(valid, -la.min_eig(closed), la.max_eig(closed) - 1.0)
        # E(K1) on H1 together with E(L) on H2
        k1 = _random_l(rng, d1, 1.0)
        q = assemble(block, tol)
        joint = np.linalg.det(np.eye(n) - q.q + q.q @ _direct_sum(k1, l)) / cond.normalization
        closed_k = exp_expectation(FreeState(conditional_symbol(block, cond, tol)), k1)
        fs = fock.free_density_matrix(q, reps[n])
        oracle_k = fs.expect(fock.exp_element(reps[n], _direct_sum(k1, l))) / cond.normalization
        full = max(full, abs(joint - closed_k), abs(oracle_k - closed_k))
    res.add("closed_vs_oracle_entrywise", entry, 1e-8)
    res.add("full_expectation", full, 1e-8)
    res.add("symbol_validity", max(valid, 0.0), 1e-9)
    return res


def _direct_sum(x, y):
    out = np.zeros((x.shape[0] + y.shape[0],) * 2, dtype=complex)
    out[: x.shape[0], : x.shape[0]] = x
    out[x.shape[0]:, x.shape[0]:] = y
    return out


def random_shrunk_target(rng, block: BlockSymbol, eps: float, t_range=(0.05, 0.95)) -> np.ndarray:
    """Random symbol strictly inside the ``eps``-shrunk conditional bounds."""
    through_c, through_1mc = correlation_terms(block)
    ub = la.range_basis(block.b, 1e-9)
    proj = ub @ la.dag(ub)
    # sqrt lifts roundoff eigenvalues off ran B; project them away
    spread = proj @ la.sqrtm_psd(through_c + through_1mc) @ proj
    u = la.random_unitary(rng, block.d1)
    t = (u * rng.uniform(*t_range, block.d1)) @ la.dag(u)
    return la.hermitize(block.a + (1 - eps) * (-through_c + spread @ t @ spread))


def suite_roundtrip(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL,
                    eps: float = 1e-3) -> SuiteResult:
    res = SuiteResult("roundtrip")
    rng = _rng(seed, "roundtrip")
    worst = neg_l = 0.0
    min_det = np.inf
    for _ in range(trials):
        n = int(rng.integers(2, modes + 1)) if modes >= 2 else modes
        d1, d2 = _split(rng, n)
        block = random_block_symbol(d1, d2, int(rng.integers(2**31)), 0.05)
        target = random_shrunk_target(rng, block, eps)
        k = target_kernel(block, target, eps, tol)
        min_det = min(min_det, float(np.linalg.det(np.eye(d2) + block.c @ k).real))
        cond = conditioner_for_target(block, target, eps, tol)
        neg_l = max(neg_l, -la.min_eig(cond.l))
        worst = max(worst, la.op_norm(conditional_symbol(block, cond, tol).q - target))
    res.results["min_det_1_plus_ck"] = min_det
    res.add("target_reproduced", worst, 1e-9)
    res.add("l_negativity", max(neg_l, 0.0), 1e-10)
    res.add("det_1_plus_ck_small", float(min_det <= 1e-9), 0.0)
    return res


def suite_cpmodel(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL,
                  blocks: int | None = None) -> SuiteResult:
    res = SuiteResult("cpmodel")
    rng = _rng(seed, "cpmodel")
    blocks = blocks or max(2, trials // 10)
    endpoint = recovery = 0.0
    outside = interior = candidates = 0
    for _ in range(blocks):
        if modes < 2:
            raise FermiCondError("bipartite suites need at least 2 modes")
        d1 = int(rng.integers(1, modes // 2 + 1))
        d2 = modes - d1
        block = random_block_symbol(d1, d2, int(rng.integers(2**31)), 0.05)
        report = cp_maps.model_equivalence_check(block, trials, int(rng.integers(2**31)), tol)
        endpoint = max(endpoint, report["endpoint_residual"])
        recovery = max(recovery, report["max_recovery_residual"])
        outside += report["pullbacks_outside"]
        interior += report["targets_interior"]
        candidates += trials
    res.results.update(blocks=blocks, interior_targets=interior, targets=candidates)
    res.add("endpoints_equal_bounds", endpoint, 1e-10)
    res.add("pullbacks_outside", outside, 0)
    res.add("recovery", recovery, 1e-8)
    return res


def suite_bipartite(modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> SuiteResult:
    res = SuiteResult("bipartite")
    rng = _rng(seed, "bipartite")
    mismatches = swap = product = unital = choi = model = recon = 0.0
    for p in range(1, 5):
        for _ in range(max(1, trials // 10)):
            d1, d2 = (int(rng.integers(p, 6)) for _ in range(2))
            omega = bp.random_schmidt_state(rng, d1, d2, p)
            rho = bp.pure_density(omega, (d1, d2))
            mismatches += bp.correlation_dimension(rho, tol.psd) != p * p
            swapped = bp.pure_density(omega.reshape(d1, d2).T.reshape(-1), (d2, d1))
            swap += bp.correlation_dimension(swapped, tol.psd) != bp.correlation_dimension(rho, tol.psd)
            pb = bp.schmidt(omega, (d1, d2))
            mismatches += pb.rank != p
            recon = max(recon, np.linalg.norm(pb.reconstruct() - omega))
            _, gam = bp.pure_conditional_model(pb)
            unital = max(unital, la.op_norm(bp.apply_superop(gam, np.eye(d1)) - np.eye(p)))
            choi = max(choi, -la.min_eig(bp.choi_matrix(gam)))
            for _ in range(5):
                g = la.random_vector(rng, d2 * d2).reshape(d2, d2)
                a2 = g @ la.dag(g)
                a2 /= np.einsum("ikil,lk->", rho.tensor(), a2).real
                model = max(model, bp.model_residual(pb, a2))
        rho1 = _random_density(rng, 3)
        rho2 = _random_density(rng, 4)
        product += bp.correlation_dimension(bp.density_matrix(np.kron(rho1, rho2), (3, 4)), tol.psd) != 1
    res.add("rank_p_squared_mismatches", mismatches, 0)
    res.add("swap_symmetry_mismatches", swap, 0)
    res.add("product_state_mismatches", product, 0)
    res.add("schmidt_reconstruction", recon, 1e-12)
    res.add("model_unital", unital, 1e-12)
    res.add("model_choi_negativity", max(choi, 0.0), 1e-10)
    res.add("model_equivalence", model, 1e-9)
    return res


def _random_density(rng, d):
    g = la.random_vector(rng, d * d).reshape(d, d)
    rho = g @ la.dag(g)
    return rho / np.trace(rho).real


SUITES = {
    "car": suite_car,
    "wick": suite_wick,
    "expdet": suite_expdet,
    "gamma": suite_gamma,
    "lemma1": suite_lemma1,
    "bounds": suite_bounds,
    "condsym": suite_condsym,
    "roundtrip": suite_roundtrip,
    "cpmodel": suite_cpmodel,
    "bipartite": suite_bipartite,
}
SUITE_IDS = {name: i for i, name in enumerate(SUITES)}


def run_suite(name: str, modes: int, trials: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> list:
    """Run one suite, or every suite for ``name == "all"``."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    fock.check_modes(modes)
    return [SUITES[n](modes, trials, seed, tol) for n in names]


