"""Sampler families over the driven-system control parameters: random
propagator pair generation, k-frame potential estimation, and approximate
k-design certification, with the Haar-random control generator.

A sampler is a fiducial parameter set plus per-parameter distributions.
Sampler names use ASCII transliterations: C... draws the listed parameters
from continuous uniform ranges, D... from the discrete angle grid
{2 pi j / N}, and Dr... are drifting systems whose listed rates or initial
angles are drawn (a trailing "dot" marks a rate, "p" a primed amplitude).
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .harper import (
    TWO_PI,
    PARAM_NAMES,
    DriftRates,
    DriftSchedule,
    HarperParams,
    drift_propagator,
    floquet_propagator,
)

RATE_SUFFIX = "_rate"
VALID_TARGETS = PARAM_NAMES + tuple(name + RATE_SUFFIX for name in PARAM_NAMES)


def haar_unitary(N, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix with the
    R-diagonal phase correction."""
    rng = np.random.default_rng(rng)
    Z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


@dataclass(frozen=True)
class ParamDistribution:
    """Distribution of one control parameter (or drift rate).

    kind 'fixed' pins the value, 'uniform' draws from [lo, hi), and 'grid'
    draws uniformly from the discrete angle set {2 pi j / N : j = 0..N-1}.
    """
    target: str
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    value: float = 0.0

    def __post_init__(self):
        if self.target not in VALID_TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.kind not in ("fixed", "uniform", "grid"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "uniform" and not self.lo < self.hi:
            raise ValueError("uniform distribution needs lo < hi")

    def draw(self, rng, N):
        if self.kind == "fixed":
            return self.value
        if self.kind == "uniform":
            return rng.uniform(self.lo, self.hi)
        return TWO_PI * rng.integers(N) / N


def fixed(target, value):
    return ParamDistribution(target, "fixed", value=value)


def uniform(target, lo, hi):
    return ParamDistribution(target, "uniform", lo=lo, hi=hi)


def grid(target):
    return ParamDistribution(target, "grid")


@dataclass(frozen=True)
class SamplerSpec:
    """A distribution over unitaries: fiducial parameters plus per-parameter
    draws.  mode 'floquet' builds one-period propagators, 'drift' builds
    drifting propagators over n_periods, 'haar' ignores the fiducial and
    draws Haar-random matrices (control case)."""
    name: str
    mode: str
    fiducial: HarperParams
    distributions: tuple = ()
    rates: DriftRates = field(default_factory=DriftRates)
    n_periods: int = 1
    description: str = ""

    def __post_init__(self):
        if self.mode not in ("floquet", "drift", "haar"):
            raise ValueError(f"unknown sampler mode {self.mode!r}")
        targets = [d.target for d in self.distributions]
        if len(set(targets)) != len(targets):
            raise ValueError("each parameter may be distributed only once")
        if self.mode != "drift":
            for t in targets:
                if t.endswith(RATE_SUFFIX):
                    raise ValueError(f"rate target {t!r} requires drift mode")

    @property
    def N(self):
        return self.fiducial.N

    def with_dimension(self, N):
        return replace(self, fiducial=replace(self.fiducial, N=N))


def draw_params(spec, rng):
    """One independent draw from the sampler's parameter distributions,
    overriding the fiducial values.  Returns HarperParams in floquet mode and
    a DriftSchedule in drift mode."""
    rng = np.random.default_rng(rng)
    if spec.mode == "haar":
        raise ValueError("the Haar control sampler has no parameters to draw")
    values = {name: getattr(spec.fiducial, name) for name in PARAM_NAMES}
    rates = {name: getattr(spec.rates, name) for name in PARAM_NAMES}
    for dist in spec.distributions:
        drawn = dist.draw(rng, spec.N)
        if dist.target.endswith(RATE_SUFFIX):
            rates[dist.target[: -len(RATE_SUFFIX)]] = drawn
        else:
            values[dist.target] = drawn
    params = HarperParams(N=spec.N, **values)
    if spec.mode == "floquet":
        return params
    return DriftSchedule(initial=params, rates=DriftRates(**rates),
                         n_periods=spec.n_periods)


def build_unitary(spec, rng, n_tau=None):
    """Draw parameters and build the corresponding unitary."""
    if spec.mode == "haar":
        return haar_unitary(spec.N, rng)
    drawn = draw_params(spec, rng)
    if spec.mode == "floquet":
        return floquet_propagator(drawn, n_tau)
    return drift_propagator(drawn, n_tau)


def _pair_trace(args):
    spec, seed, n_tau, index = args
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    ss_u, ss_v = ss.spawn(2)
    U = build_unitary(spec, np.random.default_rng(ss_u), n_tau)
    V = build_unitary(spec, np.random.default_rng(ss_v), n_tau)
    return abs(np.vdot(V, U)) ** 2          # |tr(U V^dag)|^2


def sample_pair_traces(spec, n_pairs, seed=0, n_tau=None, workers=1):
    """z_i = |tr(U_i V_i^dag)|^2 for n_pairs independent pairs drawn from the
    sampler.

    Each pair owns a seed substream derived from (seed, pair index), and
    U_i / V_i use disjoint child streams, so the output is reproducible for a
    fixed seed regardless of the worker count.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    tasks = [(spec, seed, n_tau, i) for i in range(n_pairs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, n_pairs // (8 * workers))
            z = list(pool.map(_pair_trace, tasks, chunksize=chunk))
    else:
        z = [_pair_trace(t) for t in tasks]
    return np.asarray(z)


@dataclass(frozen=True)
class FramePotentialEstimate:
    """Monte-Carlo estimate of one k-frame potential: the sample mean of z^k
    with its standard error."""
    k: int
    value: float
    std_err: float
    n_pairs: int


def frame_potentials(z, ks=(1, 2, 3)):
    """Estimates F(k) = <z^k> with standard errors
    sigma_k = sqrt(<z^2k> - <z^k>^2) / sqrt(n)."""
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        raise ValueError("need a nonempty trace sample")
    out = []
    for k in ks:
        zk = z**k
        mean = zk.mean()
        sigma = math.sqrt(max(float((zk**2).mean() - mean**2), 0.0)) / math.sqrt(z.size)
        out.append(FramePotentialEstimate(k=int(k), value=float(mean),
                                          std_err=sigma, n_pairs=z.size))
    return out


@dataclass(frozen=True)
class EpsilonEntry:
    """Approximate-design certificate for one k: epsilon = sqrt(max(F - k!, 0))
    and the resolution floor sqrt(sigma_k) set by the sample size."""
    k: int
    epsilon: float
    error_floor: float


def epsilon_report(estimates):
    """Per-k epsilon of the frame-potential approximate-design criterion,
    with the standard-error floor below which epsilon cannot be resolved."""
    return [
        EpsilonEntry(
            k=e.k,
            epsilon=math.sqrt(max(e.value - math.factorial(e.k), 0.0)),
            error_floor=math.sqrt(e.std_err),
        )
        for e in estimates
    ]


# ---------------------------------------------------------------------------
# built-in sampler roster


def _floquet_fiducial(N=51):
    return HarperParams(N=N, a=3.0, b=0.0, epsilon=3.0, mu=3.0, mu_prime=3.1,
                        phi0=0.0, tau0=0.0)


def _drift_fiducial(N=51):
    return HarperParams(N=N, a=3.0, b=0.0, epsilon=3.01, mu=1.0, mu_prime=0.5,
                        phi0=0.0, tau0=0.0)


_DRIFT_BASE_RATES = DriftRates(b=0.0, mu=0.1, mu_prime=0.15)


def _fl(name, desc, *dists, N=51):
    return SamplerSpec(name=name, mode="floquet", fiducial=_floquet_fiducial(N),
                       distributions=tuple(dists), description=desc)


def _dr(name, desc, *dists, rates=_DRIFT_BASE_RATES):
    return SamplerSpec(name=name, mode="drift", fiducial=_drift_fiducial(),
                       distributions=tuple(dists), rates=rates, n_periods=3,
                       description=desc)


def builtin_samplers():
    """The named sampler roster (12 one-period families and 5 drifting
    families)."""
    full = (0.0, TWO_PI)
    return [
        _fl("Cmumup", "mu in [3,7), mu' in [3.1,7.1)",
            uniform("mu", 3.0, 7.0), uniform("mu_prime", 3.1, 7.1)),
        _fl("Dbphi", "b, phi0 on the discrete grid {2 pi j/N}",
            grid("b"), grid("phi0")),
        _fl("Dbtau", "b, tau0 on the discrete grid {2 pi j/N}",
            grid("b"), grid("tau0")),
        _fl("Cbphi", "b, phi0 in [0, 2 pi)",
            uniform("b", *full), uniform("phi0", *full)),
        _fl("Cbtau", "b, tau0 in [0, 2 pi)",
            uniform("b", *full), uniform("tau0", *full)),
        _fl("Ctaumu", "tau0 in [0, 2 pi), mu in [3,6)",
            uniform("tau0", *full), uniform("mu", 3.0, 6.0)),
        _fl("Cbphimu", "b, phi0 in [0, 2 pi), mu in [3,6)",
            uniform("b", *full), uniform("phi0", *full), uniform("mu", 3.0, 6.0)),
        _fl("Cbtaumu", "b, tau0 in [0, 2 pi), mu in [3,6)",
            uniform("b", *full), uniform("tau0", *full), uniform("mu", 3.0, 6.0)),
        _fl("C1btaumumup", "b, tau0 in [0, 2 pi), mu in [3,6), mu' in [3.1,5.1)",
            uniform("b", *full), uniform("tau0", *full),
            uniform("mu", 3.0, 6.0), uniform("mu_prime", 3.1, 5.1)),
        _fl("C2btaumumup", "as C1 at dimension N=30",
            uniform("b", *full), uniform("tau0", *full),
            uniform("mu", 3.0, 6.0), uniform("mu_prime", 3.1, 5.1), N=30),
        _fl("C3btaumumup", "as C1 at dimension N=70",
            uniform("b", *full), uniform("tau0", *full),
            uniform("mu", 3.0, 6.0), uniform("mu_prime", 3.1, 5.1), N=70),
        _fl("C4btaumumup", "weaker drive: b, tau0 in [0, 2 pi), mu in [1,4), mu' in [0,2)",
            uniform("b", *full), uniform("tau0", *full),
            uniform("mu", 1.0, 4.0), uniform("mu_prime", 0.0, 2.0)),
        _dr("Dr1bdotmudot", "b rate in [0,0.1), mu rate in [0.1,0.6)",
            uniform("b" + RATE_SUFFIX, 0.0, 0.1),
            uniform("mu" + RATE_SUFFIX, 0.1, 0.6)),
        _dr("Dr2bmudot", "b in [0, 2 pi), mu rate in [0.1,0.6)",
            uniform("b", *full), uniform("mu" + RATE_SUFFIX, 0.1, 0.6)),
        _dr("Dr3taumudot", "tau0 in [0, 2 pi), mu rate in [0.1,0.6)",
            uniform("tau0", *full), uniform("mu" + RATE_SUFFIX, 0.1, 0.6)),
        _dr("Dr4taumudot", "b rate fixed at 0.1; tau0 in [0, 2 pi), mu rate in [0.1,0.6)",
            uniform("tau0", *full), uniform("mu" + RATE_SUFFIX, 0.1, 0.6),
            rates=DriftRates(b=0.1, mu=0.1, mu_prime=0.15)),
        _dr("Dr5taumudotmupdot", "tau0 in [0, 2 pi), mu rate in [0.1,0.6), mu' rate in [0.15,0.65)",
            uniform("tau0", *full), uniform("mu" + RATE_SUFFIX, 0.1, 0.6),
            uniform("mu_prime" + RATE_SUFFIX, 0.15, 0.65)),
    ]


def haar_control(N=51):
    """Haar-uniform control sampler at dimension N."""
    return SamplerSpec(name="Haar-control", mode="haar",
                       fiducial=HarperParams(N=N),
                       description="Haar-uniform control distribution")


_ALIASES = {
    "c1": "C1btaumumup", "c2": "C2btaumumup",
    "c3": "C3btaumumup", "c4": "C4btaumumup",
    "dr1": "Dr1bdotmudot", "dr2": "Dr2bmudot", "dr3": "Dr3taumudot",
    "dr4": "Dr4taumudot", "dr5": "Dr5taumudotmupdot",
    "haar": "Haar-control",
}


def sampler_registry():
    """All built-in samplers plus the Haar control, keyed by name."""
    specs = {s.name: s for s in builtin_samplers()}
    specs["Haar-control"] = haar_control()
    return specs


def get_sampler(name):
    """Look up a built-in sampler by name or alias (case-insensitive)."""
    registry = sampler_registry()
    key = _ALIASES.get(name.lower(), name)
    for cand, spec in registry.items():
        if cand.lower() == key.lower():
            return spec
    raise KeyError(f"unknown sampler {name!r}; see list-samplers")


# ---------------------------------------------------------------------------
# JSON wire format


def _dist_to_json(d):
    args = {}
    if d.kind == "fixed":
        args["value"] = d.value
    elif d.kind == "uniform":
        args["lo"], args["hi"] = d.lo, d.hi
    return {"target": d.target, "kind": d.kind, "args": args}


def _dist_from_json(obj):
    args = obj.get("args", {})
    return ParamDistribution(target=obj["target"], kind=obj["kind"],
                             lo=args.get("lo", 0.0), hi=args.get("hi", 0.0),
                             value=args.get("value", 0.0))


def spec_to_json(spec):
    """Serialize a SamplerSpec to the JSON wire document."""
    fiducial = {name: getattr(spec.fiducial, name) for name in PARAM_NAMES}
    if spec.mode == "drift":
        for name in PARAM_NAMES:
            rate = getattr(spec.rates, name)
            if rate != 0.0:
                fiducial[name + RATE_SUFFIX] = rate
    doc = {
        "name": spec.name,
        "mode": spec.mode,
        "N": spec.N,
        "fiducial": fiducial,
        "distributions": [_dist_to_json(d) for d in spec.distributions],
    }
    if spec.mode == "drift":
        doc["n_periods"] = spec.n_periods
    return doc


def spec_from_json(doc):
    """Parse the JSON wire document back into a SamplerSpec."""
    for key in ("name", "mode", "N"):
        if key not in doc:
            raise ValueError(f"sampler spec is missing required key {key!r}")
    fid = dict(doc.get("fiducial", {}))
    rates = {}
    for name in PARAM_NAMES:
        rate = fid.pop(name + RATE_SUFFIX, 0.0)
        if rate:
            rates[name] = rate
    unknown = set(fid) - set(PARAM_NAMES)
    if unknown:
        raise ValueError(f"unknown fiducial parameters: {sorted(unknown)}")
    fiducial = HarperParams(N=int(doc["N"]), **fid)
    return SamplerSpec(
        name=str(doc["name"]),
        mode=str(doc["mode"]),
        fiducial=fiducial,
        distributions=tuple(_dist_from_json(d) for d in doc.get("distributions", [])),
        rates=DriftRates(**rates),
        n_periods=int(doc.get("n_periods", 1)),
    )


# ---------------------------------------------------------------------------
# bundled reference propagators


def reference_propagator(name, N, n_tau=None, seed=0):
    """Build one of the bundled reference unitaries (U_Ta, U_Tb, U_Drift,
    U_Haar) at dimension N."""
    from . import harper

    if name == "U_Ta":
        return floquet_propagator(harper.ergodic_reference_params(N), n_tau)
    if name == "U_Tb":
        return floquet_propagator(harper.hybrid_reference_params(N), n_tau)
    if name == "U_Drift":
        return drift_propagator(harper.drifting_reference_schedule(N), n_tau)
    if name == "U_Haar":
        return haar_unitary(N, np.random.default_rng(seed))
    raise KeyError(f"unknown reference propagator {name!r}")


REFERENCE_NAMES = ("U_Ta", "U_Tb", "U_Drift", "U_Haar")
