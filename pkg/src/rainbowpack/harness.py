"""Seeded Monte Carlo experiments with CSV and JSON reporting.

Every trial ``i`` runs on the child seed ``Seed(master).child("trial", i)``
so results do not depend on how trials are scheduled across workers.
Aggregation folds the records in trial order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from statistics import NormalDist
from typing import Callable, Dict, List, Optional, Tuple

from .bounds import choose_r0, expected_m_r, multiplicity_counts
from .decomposition import decompose
from .graph import BipartiteGraph, Graph, circulant_graph, complete_bipartite, complete_graph, load_graph, min_degree
from .models import sample_coupled, sample_kout, sample_kout_bipartite, sample_kout_hat, sample_left_kout
from .seeding import Seed
from .verify import are_edge_disjoint, has_perfect_matching, is_connected, is_hamiltonian, is_rainbow

EXPERIMENTS = (
    "walkup-pm",
    "fenner-ham",
    "pm-packing",
    "ham-packing",
    "dirac-ham",
    "coupling-tv",
    "multiplicity-conc",
)

CSV_COLUMNS = (
    "trial",
    "seed",
    "experiment",
    "n",
    "p",
    "k",
    "c",
    "eps",
    "t_target",
    "t_achieved",
    "property",
    "holds",
    "runtime_ms",
    "failure_reason",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int
    trials: int
    seed: int = 0
    p: float = 1.0
    k: int = 2
    c: Optional[int] = None
    eps: float = 0.5
    k_eps: int = 23
    delta_fraction: Optional[float] = None
    alpha: float = 0.5
    budget: Optional[int] = None
    variant: str = "left"
    host: Optional[str] = None
    timing: bool = False

    @classmethod
    def from_dict(cls, data: Dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
        missing = [name for name in ("experiment", "n", "trials") if name not in data]
        if missing:
            raise ConfigError(f"missing config field(s): {', '.join(missing)}")
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError("n must be a positive integer")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("p must lie in [0, 1]")
        if not 0.0 < self.eps < 1.0:
            raise ConfigError("eps must lie in (0, 1)")
        if self.k < 1:
            raise ConfigError("k must be positive")
        exp = self.experiment
        if exp == "walkup-pm":
            if self.variant not in ("left", "two-sided"):
                raise ConfigError("walkup-pm variant must be 'left' or 'two-sided'")
            if self.k > self.n:
                raise ConfigError("k cannot exceed n")
        if exp in ("fenner-ham", "ham-packing", "dirac-ham") and self.n < 3:
            raise ConfigError("Hamiltonicity experiments need n >= 3")
        if exp == "fenner-ham" and self.k > self.n - 1:
            raise ConfigError("k cannot exceed n - 1")
        if exp == "dirac-ham":
            if self.k_eps < 2:
                raise ConfigError("k_eps must be at least 2")
            if self.delta_fraction is not None and not 0 < self.delta_fraction < 1:
                raise ConfigError("delta_fraction must lie in (0, 1)")
        if exp == "multiplicity-conc":
            if self.k < 2:
                raise ConfigError("multiplicity-conc needs k >= 2")
            if self.alpha <= 0 or round(self.alpha * self.n) < 1:
                raise ConfigError("alpha * n must be at least 1")
        if exp == "coupling-tv" and self.n < 2:
            raise ConfigError("coupling-tv needs n >= 2")
        if self.c is not None:
            palette = self.palette()
            if palette is not None and self.c != palette:
                raise ConfigError(f"c={self.c} does not match the palette k*|V| = {palette} used by the split")

    def palette(self) -> Optional[int]:
        """Palette size used by the experiment, or ``None`` if it draws no colors."""
        if self.experiment == "pm-packing":
            return 3 * 2 * self.n
        if self.experiment == "ham-packing":
            return 23 * self.n
        if self.experiment == "dirac-ham":
            return self.k_eps * self.n
        if self.experiment == "multiplicity-conc":
            return self.k * self.n
        return None


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    experiment: str
    n: int
    p: float
    k: int
    c: Optional[int]
    eps: float
    t_target: Optional[int]
    t_achieved: Optional[int]
    property: str
    holds: Optional[bool]
    runtime_ms: Optional[float] = None
    failure_reason: Optional[str] = None
    extra: Dict = field(default_factory=dict, compare=False)

    def row(self) -> List[str]:
        vals = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            if v is None:
                vals.append("unknown" if name == "holds" else "")
            elif isinstance(v, bool):
                vals.append("true" if v else "false")
            elif isinstance(v, float):
                vals.append(repr(v))
            else:
                vals.append(str(v))
        return vals


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> Tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


# -- per-trial bodies ------------------------------------------------------------


def _record(cfg: ExperimentConfig, idx: int, seed: int, prop: str, holds, **kw) -> TrialRecord:
    return TrialRecord(
        trial=idx,
        seed=seed,
        experiment=cfg.experiment,
        n=cfg.n,
        p=cfg.p,
        k=kw.pop("k", cfg.k),
        c=kw.pop("c", cfg.palette()),
        eps=cfg.eps,
        t_target=kw.pop("t_target", None),
        t_achieved=kw.pop("t_achieved", None),
        property=prop,
        holds=holds,
        failure_reason=kw.pop("failure_reason", None),
        extra=kw.pop("extra", {}),
    )


def _trial_walkup(cfg, idx, seed):
    if cfg.variant == "left":
        b = sample_left_kout(cfg.n, cfg.n, cfg.k, seed)
    else:
        b = sample_kout_bipartite(cfg.n, cfg.k, seed)
    v = has_perfect_matching(b)
    return _record(cfg, idx, seed, "perfect-matching", v.holds, failure_reason=v.detail or None)


def _trial_fenner(cfg, idx, seed):
    g = sample_kout(complete_graph(cfg.n), cfg.k, seed).result
    v = is_hamiltonian(g, cfg.budget, Seed(seed).child("ham"))
    return _record(cfg, idx, seed, "hamiltonian", v.holds, failure_reason=v.detail or None)


def _packing_trial(cfg, idx, seed, host: Graph, k: int, prop: str, check: Callable) -> TrialRecord:
    res = decompose(host, cfg.p, k, cfg.eps, seed) if cfg.p > 0 else None
    if res is None:
        return _record(cfg, idx, seed, prop, True, k=k, t_target=0, t_achieved=0, extra={"count": 0})
    disjoint = are_edge_disjoint(res.parts + [res.remainder])
    if not disjoint.holds:
        raise AssertionError(f"trial {idx}: parts overlap at {disjoint.witness}")
    count = 0
    for i, part in enumerate(res.parts):
        if not is_rainbow(res.h, part.edge_list()).holds:
            raise AssertionError(f"trial {idx}: part {i} is not rainbow")
        if check(part, Seed(seed).child("check", i)):
            count += 1
    t_target = res.t_target
    return _record(
        cfg,
        idx,
        seed,
        prop,
        count >= t_target,
        k=k,
        t_target=t_target,
        t_achieved=res.t_achieved,
        failure_reason=res.failure_reason,
        extra={"count": count},
    )


def _has_pm(n: int):
    def check(part: Graph, _seed) -> bool:
        return bool(has_perfect_matching(BipartiteGraph.from_graph(part, n)))

    return check


def _has_ham(budget):
    def check(part: Graph, seed) -> bool:
        return is_hamiltonian(part, budget, seed).holds is True

    return check


def _trial_pm_packing(cfg, idx, seed):
    host = complete_bipartite(cfg.n, cfg.n).to_graph()
    return _packing_trial(cfg, idx, seed, host, 3, "rainbow-perfect-matchings", _has_pm(cfg.n))


def _trial_ham_packing(cfg, idx, seed):
    return _packing_trial(
        cfg, idx, seed, complete_graph(cfg.n), 23, "rainbow-hamilton-cycles", _has_ham(cfg.budget)
    )


def dirac_host(cfg: ExperimentConfig) -> Graph:
    """Host for ``dirac-ham``: loaded from ``cfg.host`` or a regular circulant."""
    bound = (1 + cfg.eps) * cfg.n / 2
    if cfg.host:
        g = load_graph(cfg.host)
        if g.n != cfg.n:
            raise ConfigError(f"host graph has {g.n} vertices, config says n={cfg.n}")
    else:
        frac = cfg.delta_fraction
        degree = math.ceil(bound) if frac is None else math.ceil(frac * cfg.n)
        if degree % 2 and cfg.n % 2:
            degree += 1
        if degree >= cfg.n:
            raise ConfigError(f"degree {degree} impossible on {cfg.n} vertices")
        g = circulant_graph(cfg.n, degree)
    if min_degree(g) < bound:
        raise ConfigError(f"host minimum degree {min_degree(g)} is below (1+eps)n/2 = {bound}")
    return g


def _trial_dirac(cfg, idx, seed):
    return _packing_trial(
        cfg, idx, seed, dirac_host(cfg), cfg.k_eps, "rainbow-hamilton-cycles", _has_ham(cfg.budget)
    )


def _edge_key(g: Graph) -> str:
    return ";".join(f"{u}-{v}" for u, v in g.edge_list())


def _trial_coupling(cfg, idx, seed):
    g = complete_graph(cfg.n)
    sd = Seed(seed)
    hat = sample_kout_hat(g, cfg.k, sd.child("hat"))
    out = sample_coupled(g, cfg.k, sd.child("coupled"))
    extra = {}
    if cfg.n <= 6:
        extra = {"hat": _edge_key(hat), "star": _edge_key(out.h_star)}
    else:
        extra = {
            "hat_connected": bool(is_connected(hat)),
            "star_connected": bool(is_connected(out.h_star)),
        }
    return _record(cfg, idx, seed, "agreement", out.agreed, extra=extra)


def _conc_params(cfg) -> Tuple[int, int, List[float]]:
    alpha_n = round(cfg.alpha * cfg.n)
    r0 = choose_r0(cfg.eps, cfg.k, alpha_n / cfg.n)
    mu = [expected_m_r(cfg.k, cfg.n, alpha_n, r) for r in range(r0 + 1)]
    return alpha_n, r0, mu


def _trial_multiplicity(cfg, idx, seed):
    alpha_n, r0, mu = _conc_params(cfg)
    kn = cfg.k * cfg.n
    rng = Seed(seed).rng("multiset")
    draws = [1 + int(rng.random() * kn) for _ in range(alpha_n)]
    m = multiplicity_counts(draws, kn)
    devs = []
    for r in range(1, r0 + 1):
        got = m[r] if r < len(m) else 0
        devs.append(abs(got - mu[r]) / mu[r] if mu[r] > 0 else (0.0 if got == 0 else math.inf))
    worst = max(devs)
    return _record(
        cfg,
        idx,
        seed,
        "multiplicity-within-eps",
        worst <= cfg.eps,
        extra={"max_rel_dev": worst, "m": m[1 : r0 + 1]},
    )


TRIALS: Dict[str, Callable] = {
    "walkup-pm": _trial_walkup,
    "fenner-ham": _trial_fenner,
    "pm-packing": _trial_pm_packing,
    "ham-packing": _trial_ham_packing,
    "dirac-ham": _trial_dirac,
    "coupling-tv": _trial_coupling,
    "multiplicity-conc": _trial_multiplicity,
}


PROPERTIES = {
    "walkup-pm": "perfect-matching",
    "fenner-ham": "hamiltonian",
    "pm-packing": "rainbow-perfect-matchings",
    "ham-packing": "rainbow-hamilton-cycles",
    "dirac-ham": "rainbow-hamilton-cycles",
    "coupling-tv": "agreement",
    "multiplicity-conc": "multiplicity-within-eps",
}


def trial_seed(master: int, idx: int) -> int:
    return Seed(master).child("trial", idx).master


def run_trial(cfg: ExperimentConfig, idx: int) -> TrialRecord:
    seed = trial_seed(cfg.seed, idx)
    start = time.perf_counter()
    try:
        rec = TRIALS[cfg.experiment](cfg, idx, seed)
    except AssertionError as exc:
        # a failed certificate check counts against the claim, never for it
        rec = _record(cfg, idx, seed, PROPERTIES[cfg.experiment], False, failure_reason=f"validation error: {exc}")
    if cfg.timing:
        # wall time breaks byte-identical reruns, so it is opt-in
        ms = round((time.perf_counter() - start) * 1000, 3)
        rec = TrialRecord(**{**{f.name: getattr(rec, f.name) for f in fields(rec)}, "runtime_ms": ms})
    return rec


def _run_chunk(args) -> List[TrialRecord]:
    cfg, lo, hi = args
    return [run_trial(cfg, i) for i in range(lo, hi)]


def run_trials(cfg: ExperimentConfig, workers: int = 1) -> List[TrialRecord]:
    cfg.validate()
    if cfg.experiment == "dirac-ham":
        dirac_host(cfg)  # fail before any trial on a bad host
    if workers <= 1 or cfg.trials == 1:
        return [run_trial(cfg, i) for i in range(cfg.trials)]
    chunk = max(1, math.ceil(cfg.trials / (workers * 4)))
    jobs = [(cfg, lo, min(cfg.trials, lo + chunk)) for lo in range(0, cfg.trials, chunk)]
    records: List[TrialRecord] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, jobs):
            records.extend(part)
    records.sort(key=lambda r: r.trial)
    return records


# -- aggregation -------------------------------------------------------------


def _tv(a: Counter, b: Counter, na: int, nb: int) -> float:
    keys = set(a) | set(b)
    return 0.5 * math.fsum(abs(a[x] / na - b[x] / nb) for x in keys)


def asymptotic_target(cfg: ExperimentConfig) -> Optional[float]:
    if cfg.experiment == "pm-packing":
        return cfg.n * cfg.p / 6
    if cfg.experiment == "ham-packing":
        return cfg.n * cfg.p / 46
    return None


def aggregate(cfg: ExperimentConfig, records: List[TrialRecord]) -> Dict:
    records = sorted(records, key=lambda r: r.trial)
    n = len(records)
    succ = sum(1 for r in records if r.holds is True)
    fail = sum(1 for r in records if r.holds is False)
    unknown = n - succ - fail
    lo, hi = wilson_interval(succ, n)
    report: Dict = {
        "experiment": cfg.experiment,
        "config": {k: v for k, v in asdict(cfg).items() if k != "timing"},
        "trials": n,
        "property": records[0].property if records else None,
        "successes": succ,
        "failures": fail,
        "unknown": unknown,
        "rate": succ / n,
        "ci99": [lo, hi],
    }
    achieved = [r.t_achieved for r in records if r.t_achieved is not None]
    if achieved:
        targets = [r.t_target for r in records]
        counts = [r.extra.get("count", 0) for r in records]
        report["t_target"] = targets[0]
        report["t_achieved_mean"] = math.fsum(achieved) / len(achieved)
        report["t_achieved_min"] = min(achieved)
        report["t_achieved_max"] = max(achieved)
        report["property_count_mean"] = math.fsum(counts) / n
        report["at_least_one_rate"] = sum(1 for c in counts if c >= 1) / n
        report["property_count_hist"] = {str(k): v for k, v in sorted(Counter(counts).items())}
        report["split_failures"] = dict(
            sorted(Counter(_reason_kind(r.failure_reason) for r in records if r.failure_reason).items())
        )
        report["comparison"] = {
            "asymptotic_target": asymptotic_target(cfg),
            "eps_scaled_target": records[0].t_target,
            "mean_property_count": report["property_count_mean"],
        }
    if cfg.experiment == "coupling-tv":
        if cfg.n <= 6:
            hat = Counter(r.extra["hat"] for r in records)
            star = Counter(r.extra["star"] for r in records)
            report["tv_hat_vs_star"] = _tv(hat, star, n, n)
            report["outcomes"] = len(set(hat) | set(star))
        else:
            hc = sum(r.extra["hat_connected"] for r in records)
            sc = sum(r.extra["star_connected"] for r in records)
            report["connected_rate_hat"] = hc / n
            report["connected_rate_star"] = sc / n
            report["connected_gap"] = abs(hc - sc) / n
        report["agreement_rate"] = succ / n
    if cfg.experiment == "multiplicity-conc":
        alpha_n, r0, mu = _conc_params(cfg)
        devs = sorted(r.extra["max_rel_dev"] for r in records)
        report["r0"] = r0
        report["mu"] = mu[1:]
        report["exceedance_fraction"] = fail / n
        report["max_rel_dev_quantiles"] = {
            q: devs[min(n - 1, int(float(q) * n))] for q in ("0.5", "0.9", "0.99")
        }
        mass = math.fsum(r * mu[r] for r in range(1, r0 + 1))
        report["mass_upto_r0"] = mass
        report["mass_check"] = mass >= (1 - cfg.eps) * alpha_n
    return report


def _reason_kind(reason: str) -> str:
    if "exceeds sampled out-degree" in reason:
        return "out-degree"
    if "< d_" in reason:
        return "multiplicity"
    if "perfect" in reason:
        return "k-matching"
    return "other"


# -- files -------------------------------------------------------------------


def trials_csv(records: List[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(records, key=lambda r: r.trial):
        w.writerow(r.row())
    return buf.getvalue()


def write_outputs(cfg: ExperimentConfig, records: List[TrialRecord], out_dir: str) -> Dict:
    os.makedirs(out_dir, exist_ok=True)
    report = aggregate(cfg, records)
    with open(os.path.join(out_dir, "trials.csv"), "w", newline="") as fh:
        fh.write(trials_csv(records))
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None, workers: int = 1) -> Dict:
    records = run_trials(cfg, workers)
    if out_dir is None:
        return aggregate(cfg, records)
    return write_outputs(cfg, records, out_dir)


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return ExperimentConfig.from_dict(data)


def run(cfg_path: str, out_dir: str = "results", workers: int = 1) -> int:
    """Load, validate and run a config file; ``0`` on completion, ``2`` on config or IO errors."""
    try:
        cfg = load_config(cfg_path)
        run_experiment(cfg, out_dir, workers)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}")
        return 2
    return 0


PRESETS: Dict[str, Dict] = {
    "walkup-pm": dict(experiment="walkup-pm", n=50, k=3, trials=1000, seed=1),
    "walkup-pm-two-sided": dict(experiment="walkup-pm", n=50, k=3, trials=1000, seed=1, variant="two-sided"),
    "fenner-ham": dict(experiment="fenner-ham", n=40, k=3, trials=1000, seed=2),
    "fenner-ham-23": dict(experiment="fenner-ham", n=40, k=23, trials=1000, seed=2),
    "pm-packing": dict(experiment="pm-packing", n=50, p=0.8, eps=0.5, trials=200, seed=3),
    "ham-packing": dict(experiment="ham-packing", n=200, p=0.9, eps=0.5, trials=100, seed=4),
    "dirac-ham": dict(experiment="dirac-ham", n=200, p=0.9, eps=0.5, k_eps=23, delta_fraction=0.75, trials=50, seed=5),
    "coupling-tv": dict(experiment="coupling-tv", n=4, k=2, trials=100000, seed=6),
    "coupling-agreement": dict(experiment="coupling-tv", n=60, k=2, trials=10000, seed=6),
    "multiplicity-conc": dict(experiment="multiplicity-conc", n=10000, k=2, alpha=0.5, eps=0.1, trials=200, seed=7),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    return ExperimentConfig.from_dict({**PRESETS[name], **overrides})
