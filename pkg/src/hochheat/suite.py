"""Check families for the verification suite.

Each family is a small battery of independent checks over one component:
exact cycle identities, shuffle multiplicativity, symbol normalization,
complex identities on random chains, the spectral model and its heat
traces, curvature integrals, and circle localization.  `run_suite` runs a
selection of families against a single configuration and collects the
outcomes into a `VerificationReport`.

Every check is deterministic given the configuration (random samples are
drawn from a seeded generator), so two runs with the same settings differ
only in timestamps and runtimes.
"""

from __future__ import annotations

import math
import os
import random
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .chains import (
    TensorChain,
    bar_bprime,
    cyclic_tau,
    hochschild_b,
    norm_n,
    normalize,
    normalized_omega_formula,
    omega_cycle,
    shuffle_product,
    tsygan_d,
)
from .chern import chern_density, integrate_chart, integrate_product, todd_density
from .circle import BumpFunction, TwoCircles, compare_localization, long_time_rows, poisson_deviation
from .forms import hkr_symbol, volume_form
from .randomgen import random_chain, random_column_vector
from .report import FAIL, PASS, CheckResult, VerificationReport
from .spectral import (
    build_model,
    harmonic_supertrace,
    heat_supertrace,
    load_spectrum,
    spectrum_summary,
    store_spectrum,
)
from .weyl import d_var, mul, unit, z_var

DEFAULT_CACHE_ENV = "HOCHHEAT_CACHE_DIR"


@dataclass
class SuiteConfig:
    seed: int = 0
    samples: int = 40
    max_weyl: int = 3                      # largest n for the degree-2n cycles
    k: int = 1                             # bundle degree for spectral checks
    trunc: int = 10
    use_cache: bool = True
    cache_dir: Optional[str] = None
    t_min: float = 0.2
    t_max: float = 5.0
    points: int = 20
    harmonic_ks: Tuple[int, ...] = (0, 1, 2, 3, 4)
    levels: int = 6
    method: str = "tanh-sinh"
    cross_trunc: int = 12                  # truncation for the quadrature cross-check
    product_factors: int = 3
    length_a: float = 1.0
    length_b: float = 1.7
    bump: Tuple[float, float, int] = (0.35, 0.2, 2)
    short_times: Tuple[float, ...] = tuple(0.01 * 10 ** (i / 9) for i in range(10))
    long_times: Tuple[float, ...] = (1.0, 2.0, 4.0, 7.0, 10.0)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _check(
    out: List[CheckResult],
    check_id: str,
    claim: str,
    computed: str,
    target: str,
    tolerance: str,
    ok: bool,
    started: float,
) -> None:
    out.append(
        CheckResult(
            id=check_id,
            claim=claim,
            computed=computed,
            target=target,
            tolerance=tolerance,
            verdict=PASS if ok else FAIL,
            runtime_ms=round(1000.0 * (time.perf_counter() - started), 3),
        )
    )


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def _family_cycles(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    for n in range(1, cfg.max_weyl + 1):
        t0 = time.perf_counter()
        omega = omega_cycle(n)
        boundary = hochschild_b(omega)
        _check(
            out,
            f"cycles.boundary.omega{2 * n}",
            f"the degree-{2 * n} fundamental chain is a Hochschild cycle",
            f"{len(boundary.terms)} residual terms",
            "0 residual terms",
            "exact",
            boundary.is_zero(),
            t0,
        )
        t0 = time.perf_counter()
        ok = normalize(omega) == normalized_omega_formula(n)
        _check(
            out,
            f"cycles.normalized.omega{2 * n}",
            f"normalization of the degree-{2 * n} cycle is the alternating permutation sum",
            "equal" if ok else "mismatch",
            "equal",
            "exact",
            ok,
            t0,
        )
    return out


def _family_shuffle(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    t0 = time.perf_counter()
    ok = shuffle_product(omega_cycle(1), omega_cycle(1)) == omega_cycle(2)
    _check(
        out,
        "shuffle.multiplicative.2x2",
        "the shuffle square of the degree-2 cycle is the degree-4 cycle",
        "equal" if ok else "mismatch",
        "equal",
        "exact",
        ok,
        t0,
    )
    t0 = time.perf_counter()
    ok = shuffle_product(omega_cycle(1), omega_cycle(2)) == omega_cycle(3)
    _check(
        out,
        "shuffle.multiplicative.2x4",
        "the shuffle of the degree-2 and degree-4 cycles is the degree-6 cycle",
        "equal" if ok else "mismatch",
        "equal",
        "exact",
        ok,
        t0,
    )
    t0 = time.perf_counter()
    rng = random.Random(cfg.seed)
    failures = 0
    trials = max(1, cfg.samples // 2)
    for _ in range(trials):
        p = rng.randrange(0, 3)
        q = rng.randrange(0, 3)
        x = random_chain(rng, 1, p)
        y = random_chain(rng, 1, q)
        lhs = hochschild_b(shuffle_product(x, y))
        sign = -1 if p % 2 else 1
        rhs = shuffle_product(hochschild_b(x), y) + sign * shuffle_product(x, hochschild_b(y))
        if lhs != rhs:
            failures += 1
    _check(
        out,
        "shuffle.leibniz",
        "the boundary is a derivation for the shuffle product",
        f"{failures} failures in {trials} samples",
        "0 failures",
        "exact",
        failures == 0,
        t0,
    )
    return out


def _family_symbol(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    for n in range(1, cfg.max_weyl + 1):
        t0 = time.perf_counter()
        sym = hkr_symbol(omega_cycle(n))
        vol = volume_form(n)
        ok = sym == vol
        _check(
            out,
            f"symbol.volume.n{n}",
            f"the antisymmetrized symbol of the degree-{2 * n} cycle is the volume form",
            "volume form, coefficient 1" if ok else f"{len(sym.terms)} terms",
            "volume form, coefficient 1",
            "exact",
            ok,
            t0,
        )
    return out


def _family_tsygan(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    rng = random.Random(cfg.seed)
    samples = [
        random_chain(rng, rng.randrange(1, 3), rng.randrange(0, 4)) for _ in range(cfg.samples)
    ]

    def run(check_id: str, claim: str, predicate: Callable[[TensorChain], bool]) -> None:
        t0 = time.perf_counter()
        failures = sum(0 if predicate(c) else 1 for c in samples)
        _check(
            out,
            check_id,
            claim,
            f"{failures} failures in {len(samples)} samples",
            "0 failures",
            "exact",
            failures == 0,
            t0,
        )

    run(
        "tsygan.b.squared",
        "the Hochschild boundary squares to zero",
        lambda c: hochschild_b(hochschild_b(c)).is_zero(),
    )
    run(
        "tsygan.bprime.squared",
        "the bar boundary squares to zero",
        lambda c: bar_bprime(bar_bprime(c)).is_zero(),
    )

    def intertwine(c: TensorChain) -> bool:
        bp = bar_bprime(c)
        return hochschild_b(c + (-1) * cyclic_tau(c)) == bp + (-1) * cyclic_tau(bp)

    run(
        "tsygan.intertwine",
        "the boundary intertwines the cyclic operator with the bar boundary",
        intertwine,
    )
    run(
        "tsygan.norm",
        "the norm operator intertwines the two boundaries",
        lambda c: bar_bprime(norm_n(c)) == norm_n(hochschild_b(c)),
    )
    t0 = time.perf_counter()
    failures = 0
    for _ in range(max(1, cfg.samples // 2)):
        vec = random_column_vector(rng, rng.randrange(1, 3))
        if not tsygan_d(tsygan_d(vec)).is_zero():
            failures += 1
    _check(
        out,
        "tsygan.differential.squared",
        "the bicomplex differential squares to zero",
        f"{failures} failures in {max(1, cfg.samples // 2)} samples",
        "0 failures",
        "exact",
        failures == 0,
        t0,
    )
    return out


def _cache_dir(cfg: SuiteConfig) -> str:
    if cfg.cache_dir:
        return cfg.cache_dir
    env = os.environ.get(DEFAULT_CACHE_ENV)
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "hochheat")


def _spectrum_data(cfg: SuiteConfig) -> Tuple[Dict[str, object], bool]:
    if cfg.use_cache:
        cached = load_spectrum(_cache_dir(cfg), cfg.k, cfg.trunc)
        if cached is not None:
            return cached, True
    model = build_model(cfg.k, cfg.trunc)
    summary = spectrum_summary(model)
    if cfg.use_cache:
        store_spectrum(_cache_dir(cfg), model)
    return summary, False


def _family_spectrum(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    t0 = time.perf_counter()
    data, from_cache = _spectrum_data(cfg)
    note = " (cached)" if from_cache else ""
    k = cfg.k
    dim0 = data["dim_harmonic0"]
    _check(
        out,
        "spectrum.kernel.sections",
        f"the section Laplacian for k={k} has an exactly (k+1)-dimensional kernel",
        f"{dim0}{note}",
        f"{k + 1}",
        "exact",
        dim0 == k + 1,
        t0,
    )
    t0 = time.perf_counter()
    dim1 = data["dim_harmonic1"]
    _check(
        out,
        "spectrum.kernel.forms",
        f"the form Laplacian for k={k} has trivial kernel",
        f"{dim1}{note}",
        "0",
        "exact",
        dim1 == 0,
        t0,
    )
    t0 = time.perf_counter()
    eigs0 = [(v, m) for v, m in data["eigs0"] if v > 1e-8]
    eigs1 = list(data["eigs1"])
    head = min(5, len(eigs0), len(eigs1))
    dev = max(
        (abs(eigs0[i][0] - eigs1[i][0]) for i in range(head)),
        default=math.inf,
    )
    mults_ok = all(eigs0[i][1] == eigs1[i][1] for i in range(head))
    _check(
        out,
        "spectrum.susy.pairing",
        "nonzero section and form spectra agree with multiplicity",
        f"max deviation {_fmt(dev)} over {head} clusters{note}",
        "identical clusters",
        "1e-06",
        dev <= 1e-6 and mults_ok,
        t0,
    )
    return out


def _family_mckean_singer(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    t0 = time.perf_counter()
    if cfg.points < 2 or cfg.t_min <= 0 or cfg.t_max <= cfg.t_min:
        raise ValueError("mckean-singer needs t-max > t-min > 0 and points >= 2")
    model = build_model(cfg.k, cfg.trunc)
    grid = np.linspace(cfg.t_min, cfg.t_max, cfg.points)
    dev = max(abs(heat_supertrace(model, float(t)) - (cfg.k + 1)) for t in grid)
    _check(
        out,
        f"mckean-singer.flat.k{cfg.k}",
        f"the heat supertrace for k={cfg.k} is constant at k+1 across the time grid",
        f"max deviation {_fmt(dev)}",
        f"{cfg.k + 1}",
        "1e-03",
        dev <= 1e-3,
        t0,
    )
    return out


def _family_harmonic(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    euler = mul(z_var(1, 1), d_var(1, 1))
    for k in cfg.harmonic_ks:
        trunc = max(k + 2, 8)
        model = build_model(k, trunc)
        t0 = time.perf_counter()
        ident = harmonic_supertrace(model, unit(1))
        _check(
            out,
            f"harmonic.identity.k{k}",
            f"the harmonic supertrace of the identity counts the k={k} sections",
            _fmt(ident),
            f"{k + 1}",
            "1e-08",
            abs(ident - (k + 1)) <= 1e-8,
            t0,
        )
        t0 = time.perf_counter()
        val = harmonic_supertrace(model, euler)
        expected = k * (k + 1) / 2
        _check(
            out,
            f"harmonic.euler.k{k}",
            f"the harmonic supertrace of z d/dz for k={k} is k(k+1)/2",
            _fmt(val),
            _fmt(expected),
            "1e-06",
            abs(val - expected) <= 1e-6,
            t0,
        )
    return out


def _family_chern(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    t0 = time.perf_counter()
    res = integrate_chart(chern_density(1), method=cfg.method, levels=cfg.levels)
    _check(
        out,
        "chern.degree.o1",
        "the curvature integral of O(1) is its degree",
        _fmt(res.value),
        "1",
        "1e-08",
        res.converged and abs(res.value - 1.0) <= 1e-8,
        t0,
    )
    t0 = time.perf_counter()
    todd = integrate_chart(todd_density(), method=cfg.method, levels=cfg.levels)
    _check(
        out,
        "chern.todd.integral",
        "the Todd integral of the sphere is 1",
        _fmt(todd.value),
        "1",
        "1e-08",
        todd.converged and abs(todd.value - 1.0) <= 1e-8,
        t0,
    )
    t0 = time.perf_counter()
    model = build_model(0, cfg.cross_trunc)
    counted = harmonic_supertrace(model, unit(1))
    dev = abs(todd.value - counted)
    _check(
        out,
        "chern.todd-vs-harmonic",
        "the quadrature Todd integral matches the spectral section count for k=0",
        f"quadrature {_fmt(todd.value)}, spectral {_fmt(counted)}",
        "equal",
        "1e-06",
        dev <= 1e-6,
        t0,
    )
    return out


def _family_product(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    t0 = time.perf_counter()
    n = cfg.product_factors
    res = integrate_product([todd_density()] * n, method=cfg.method, levels=cfg.levels)
    _check(
        out,
        f"product.todd.x{n}",
        f"the Todd integral of the {n}-fold product of spheres is 1",
        _fmt(res.value),
        "1",
        "1e-06",
        res.converged and abs(res.value - 1.0) <= 1e-6,
        t0,
    )
    return out


def _family_localization(cfg: SuiteConfig) -> List[CheckResult]:
    out: List[CheckResult] = []
    circles = TwoCircles(cfg.length_a, cfg.length_b)
    bump = BumpFunction(*cfg.bump)
    t0 = time.perf_counter()
    dev = max(
        poisson_deviation(t, length)
        for t in (0.01, 0.1, 1.0, 5.0)
        for length in (cfg.length_a, cfg.length_b)
    )
    _check(
        out,
        "localization.poisson",
        "image and spectral heat sums agree on both circles",
        f"max deviation {_fmt(dev)}",
        "0",
        "1e-12",
        dev <= 1e-12,
        t0,
    )
    t0 = time.perf_counter()
    rows = compare_localization(circles, bump, cfg.short_times)
    excess = max(row.delta - row.bound for row in rows)
    _check(
        out,
        "localization.short-time.bound",
        "the localized trace deviates from the free-line value within the image tail",
        f"max excess {_fmt(excess)}",
        "no excess",
        "1e-14",
        excess <= 1e-14,
        t0,
    )
    t0 = time.perf_counter()
    first = rows[0]
    ratio = first.bound / bump.integral()
    _check(
        out,
        "localization.short-time.smallt",
        f"at t={first.t:g} the localization error is below 1e-10 of the bump mass",
        f"bound/mass {_fmt(ratio)}",
        "<= 1e-10",
        "1e-10",
        ratio <= 1e-10,
        t0,
    )
    t0 = time.perf_counter()
    lrows = long_time_rows(cfg.length_a, bump, cfg.long_times)
    lexcess = max(row.deviation - row.bound for row in lrows)
    _check(
        out,
        "localization.long-time.gap",
        "the trace approaches equilibrium within the spectral gap bound",
        f"max excess {_fmt(lexcess)}",
        "no excess",
        "exact",
        lexcess <= 0.0,
        t0,
    )
    return out


FAMILIES: Dict[str, Callable[[SuiteConfig], List[CheckResult]]] = {
    "cycles": _family_cycles,
    "shuffle": _family_shuffle,
    "symbol": _family_symbol,
    "tsygan": _family_tsygan,
    "spectrum": _family_spectrum,
    "mckean-singer": _family_mckean_singer,
    "harmonic": _family_harmonic,
    "chern": _family_chern,
    "product": _family_product,
    "localization": _family_localization,
}


def run_suite(
    selection: Optional[Sequence[str]] = None, config: Optional[SuiteConfig] = None
) -> VerificationReport:
    """Run the selected families (all by default) and collect a report."""
    cfg = config or SuiteConfig()
    names = list(selection) if selection is not None else list(FAMILIES)
    unknown = [n for n in names if n not in FAMILIES]
    if unknown:
        raise ValueError(
            f"unknown check families {unknown}; available: {', '.join(FAMILIES)}"
        )
    checks: List[CheckResult] = []
    for name in names:
        checks.extend(FAMILIES[name](cfg))
    return VerificationReport.build(__version__, checks)
