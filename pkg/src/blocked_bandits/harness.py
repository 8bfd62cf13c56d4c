"""Seeded experiment runner: configs, presets, CSV traces and summaries.

A run is one (policy, seed) pair. Every random stream is derived from
``(master_seed, *names)`` through a hash, so adding a policy or a seed never
shifts the streams of the others:

* ``("instance", seed)`` draws the instance (shared by all policies),
* ``("design", seed, key)`` draws the exploration design, shared by all
  policies that ask for the same design settings,
* ``("env", policy_id, seed)`` drives reward noise,
* ``("policy", policy_id, seed)`` drives the policy's own choices.
"""

import copy
import csv
import hashlib
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bandit import Environment
from .corral import CorralPolicy
from .design import DEFAULT_ENUMERATION_CAP, choose_u_hat
from .lasso import LassoConfig, default_lambda, lasso_fit, Regression
from .model import Instance, gen_hard_instance, gen_sparse_instance, gen_sparse_theta, gen_sphere_arms
from .policies import BSLB, ESTCRejection, RandomPolicy, RidgeETC

logger = logging.getLogger(__name__)

__all__ = [
    "ConfigError",
    "PolicySpec",
    "ExperimentConfig",
    "CSV_COLUMNS",
    "OUTPUT_DIR_ENV",
    "stream_seed",
    "build_instance",
    "run_experiment",
    "summarize_rows",
    "read_regret_csv",
    "preset_configs",
    "preset_config",
    "lasso_error_scaling",
]

CSV_COLUMNS = ("run_id", "policy", "seed", "t", "arm_index", "reward", "expected_reward", "cum_regret")
PROB_COLUMNS = ("run_id", "policy", "seed", "t", "base_index", "sparsity_k", "prob")
OUTPUT_DIR_ENV = "BLOCKED_BANDITS_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"

POLICY_KINDS = {
    "bslb": BSLB,
    "ridge_etc": RidgeETC,
    "estc_rejection": ESTCRejection,
    "random": RandomPolicy,
    "cbslb": CorralPolicy,
    "ridge_corral": CorralPolicy,
}
KIND_DEFAULTS = {"ridge_corral": {"base": "ridge"}}

GENERATORS = {
    "hard": (gen_hard_instance, {"M", "d", "l", "low_norm"}, {"k", "sigma"}),
    "sparse": (gen_sparse_instance, {"M", "d", "k", "beta"}, {"sigma"}),
}

DEFAULT_CONSTANTS = {"c_explore": 1.0, "c_u": 1.0, "enumeration_cap": DEFAULT_ENUMERATION_CAP}


class ConfigError(ValueError):
    """Invalid experiment configuration; ``errors`` lists (field, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"{f}: {m}" for f, m in self.errors)
        super().__init__(f"invalid config ({len(self.errors)} error(s)): {lines}")


@dataclass
class PolicySpec:
    id: str
    kind: str
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"id": self.id, "kind": self.kind, "params": copy.deepcopy(self.params)}


@dataclass
class ExperimentConfig:
    name: str
    instance: dict
    policies: list
    T: int
    seeds: list
    master_seed: int = 0
    output_dir: str = None
    constants: dict = field(default_factory=dict)
    log_probs: bool = True
    base_dir: str = None

    @classmethod
    def from_dict(cls, doc, base_dir=None):
        errors = []
        if not isinstance(doc, dict):
            raise ConfigError([("<root>", "config must be a JSON object")])
        known = {"name", "instance", "policies", "T", "seeds", "master_seed", "output_dir",
                 "constants", "log_probs"}
        for key in sorted(set(doc) - known):
            errors.append((key, "unknown field"))
        for key in ("instance", "policies", "T", "seeds"):
            if key not in doc:
                errors.append((key, "missing required field"))
        if errors:
            raise ConfigError(errors)
        policies = []
        raw = doc["policies"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError([("policies", "must be a nonempty list")])
        for i, p in enumerate(raw):
            if not isinstance(p, dict) or "kind" not in p:
                errors.append((f"policies[{i}]", "each policy needs a 'kind'"))
                continue
            extra = set(p) - {"id", "kind", "params"}
            if extra:
                errors.append((f"policies[{i}]", f"unknown keys {sorted(extra)}"))
            params = p.get("params", {})
            if not isinstance(params, dict):
                errors.append((f"policies[{i}].params", "must be an object"))
                params = {}
            policies.append(PolicySpec(str(p.get("id", p["kind"])), p["kind"], dict(params)))
        if errors:
            raise ConfigError(errors)
        cfg = cls(
            name=str(doc.get("name", "experiment")),
            instance=doc["instance"],
            policies=policies,
            T=doc["T"],
            seeds=doc["seeds"],
            master_seed=doc.get("master_seed", 0),
            output_dir=doc.get("output_dir"),
            constants={**DEFAULT_CONSTANTS, **doc.get("constants", {})},
            log_probs=doc.get("log_probs", True),
            base_dir=None if base_dir is None else str(base_dir),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError([("<file>", f"cannot read {path}: {exc.strerror}")]) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError([("<file>", f"not valid JSON: {exc}")]) from exc
        return cls.from_dict(doc, base_dir=path.parent)

    def to_dict(self):
        doc = {
            "name": self.name,
            "instance": copy.deepcopy(self.instance),
            "policies": [p.to_dict() for p in self.policies],
            "T": self.T,
            "seeds": list(self.seeds),
            "master_seed": self.master_seed,
            "constants": dict(self.constants),
            "log_probs": self.log_probs,
        }
        if self.output_dir is not None:
            doc["output_dir"] = self.output_dir
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def validate(self):
        errors = []
        if not _is_int(self.T) or self.T < 1:
            errors.append(("T", "must be a positive integer"))
        if not isinstance(self.seeds, list) or not self.seeds:
            errors.append(("seeds", "must be a nonempty list of integers"))
        elif not all(_is_int(s) and s >= 0 for s in self.seeds):
            errors.append(("seeds", "seeds must be nonnegative integers"))
        elif len(set(self.seeds)) != len(self.seeds):
            errors.append(("seeds", "seeds must be distinct"))
        if not _is_int(self.master_seed) or self.master_seed < 0:
            errors.append(("master_seed", "must be a nonnegative integer"))
        for key in sorted(set(self.constants) - set(DEFAULT_CONSTANTS)):
            errors.append((f"constants.{key}", "unknown constant"))
        for key in ("c_explore", "c_u"):
            v = self.constants.get(key)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                errors.append((f"constants.{key}", "must be a positive number"))
        if not _is_int(self.constants.get("enumeration_cap")) or self.constants["enumeration_cap"] < 1:
            errors.append(("constants.enumeration_cap", "must be a positive integer"))

        M, d = None, None
        try:
            M, d = self._instance_shape()
        except ConfigError as exc:
            errors.extend(exc.errors)
        if M is not None and d is not None and M < d:
            errors.append(("instance", f"M={M} < d={d}: every exploration subset is rank deficient"))
        if M is not None and _is_int(self.T) and self.T > M:
            errors.append(("T", f"horizon {self.T} exceeds the number of arms M={M}"))

        ids = [p.id for p in self.policies]
        for i, pid in enumerate(ids):
            if ids.index(pid) != i:
                errors.append((f"policies[{i}].id", f"duplicate policy id {pid!r}"))
        for i, spec in enumerate(self.policies):
            errors.extend(_check_policy(spec, i, d))
        if errors:
            raise ConfigError(errors)

    def _instance_shape(self):
        spec = self.instance
        if not isinstance(spec, dict):
            raise ConfigError([("instance", "must be an object")])
        if "path" in spec:
            extra = set(spec) - {"path"}
            if extra:
                raise ConfigError([("instance", f"unknown keys {sorted(extra)} next to 'path'")])
            try:
                inst = _load_instance(spec["path"], self.base_dir)
            except (OSError, ValueError, KeyError) as exc:
                raise ConfigError([("instance.path", f"cannot load instance: {exc}")]) from exc
            return inst.n_arms, inst.dim
        gen = spec.get("generator")
        if gen not in GENERATORS:
            raise ConfigError([("instance.generator", f"must be one of {sorted(GENERATORS)} or give 'path'")])
        _, required, optional = GENERATORS[gen]
        params = {k: v for k, v in spec.items() if k != "generator"}
        errors = [(f"instance.{k}", "missing") for k in sorted(required - set(params))]
        errors += [(f"instance.{k}", "unknown parameter") for k in sorted(set(params) - required - optional)]
        for key in ("M", "d"):
            if key in params and (not _is_int(params[key]) or params[key] < 1):
                errors.append((f"instance.{key}", "must be a positive integer"))
        if errors:
            raise ConfigError(errors)
        return params["M"], params["d"]


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _check_policy(spec, i, d):
    errors = []
    cls = POLICY_KINDS.get(spec.kind)
    if cls is None:
        return [(f"policies[{i}].kind", f"unknown kind {spec.kind!r}; expected one of {sorted(POLICY_KINDS)}")]
    allowed = set(cls().get_params()) - {"random_state"}
    for key in sorted(set(spec.params) - allowed):
        errors.append((f"policies[{i}].params.{key}", f"not a parameter of {spec.kind}"))
    k = spec.params.get("sparsity_k")
    if k is not None and d is not None and (not _is_int(k) or not 1 <= k <= d):
        errors.append((f"policies[{i}].params.sparsity_k", f"must be an integer in [1, {d}]"))
    u = spec.params.get("u_hat")
    if isinstance(u, dict):
        if set(u) - {"mode", "lambda_lower"} or "lambda_lower" not in u:
            errors.append((f"policies[{i}].params.u_hat", "rule needs 'lambda_lower' and optional 'mode'"))
    elif u is not None and (not _is_int(u) or u < 1):
        errors.append((f"policies[{i}].params.u_hat", "must be a positive integer or a rule object"))
    grid = spec.params.get("grid")
    if grid is not None and d is not None:
        if not isinstance(grid, list) or not all(_is_int(g) and 1 <= g <= d for g in grid):
            errors.append((f"policies[{i}].params.grid", f"must be a list of integers in [1, {d}]"))
    return errors


def _load_instance(path, base_dir=None):
    p = Path(path)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    return Instance.load(p)


def _name_word(name):
    return int.from_bytes(hashlib.sha256(str(name).encode()).digest()[:4], "little")


def stream_seed(master_seed, *names):
    """SeedSequence for the stream named by ``names`` under ``master_seed``."""
    return np.random.SeedSequence([int(master_seed)] + [_name_word(n) for n in names])


def stream_id(master_seed, *names):
    return "-".join([str(int(master_seed))] + [f"{_name_word(n):08x}" for n in names])


def build_instance(cfg, seed):
    spec = cfg.instance
    if "path" in spec:
        return _load_instance(spec["path"], cfg.base_dir)
    gen, _, _ = GENERATORS[spec["generator"]]
    params = {k: v for k, v in spec.items() if k != "generator"}
    rng = np.random.default_rng(stream_seed(cfg.master_seed, "instance", seed))
    return gen(rng=rng, **params)


def _make_policy(spec, cfg, instance, rng):
    cls = POLICY_KINDS[spec.kind]
    params = {**KIND_DEFAULTS.get(spec.kind, {}), **spec.params}
    allowed = cls().get_params()
    if "c_explore" in allowed and "c_explore" not in params:
        params["c_explore"] = cfg.constants["c_explore"]
    if "enumeration_cap" in allowed and "enumeration_cap" not in params:
        params["enumeration_cap"] = cfg.constants["enumeration_cap"]
    if isinstance(params.get("u_hat"), dict):
        rule = params["u_hat"]
        params["u_hat"] = choose_u_hat(instance.dim, rule["lambda_lower"], rule.get("mode", "quality"),
                                       cfg.constants["c_u"], instance.n_arms)
    return cls(**params, random_state=rng)


def _design_key(policy, instance):
    """Policies with equal keys get the same precomputed design."""
    if isinstance(policy, ESTCRejection):
        return ("relaxation", policy.max_iters)
    if isinstance(policy, (BSLB, CorralPolicy)):
        M, d = instance.n_arms, instance.dim
        u_hat = policy.u_hat if policy.u_hat is not None else min(2 * d, M)
        search = getattr(policy, "enable_search", False)
        cap = getattr(policy, "enumeration_cap", DEFAULT_ENUMERATION_CAP)
        return ("subset", int(min(u_hat, M)), policy.rounding_repeats, bool(search),
                policy.max_iters, int(cap) if search else None)
    return None


def _json_scalar(value):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (list, tuple)) and all(isinstance(v, (int, float, np.integer, np.floating)) for v in value):
        return [_json_scalar(v) for v in value]
    return None


def _run_seed(cfg, seed):
    instance = build_instance(cfg, seed)
    designs = {}
    runs = []
    for spec in cfg.policies:
        run_id = f"{spec.id}/s{seed:06d}"
        policy_rng = np.random.default_rng(stream_seed(cfg.master_seed, "policy", spec.id, seed))
        policy = _make_policy(spec, cfg, instance, policy_rng)
        key = _design_key(policy, instance)
        if key is not None and key not in designs:
            design_rng = np.random.default_rng(stream_seed(cfg.master_seed, "design", seed, repr(key)))
            designs[key] = policy.compute_design(instance.arms, design_rng)
        env_rng = np.random.default_rng(stream_seed(cfg.master_seed, "env", spec.id, seed))
        env = Environment(instance, env_rng)
        if isinstance(policy, RandomPolicy):
            trace = policy.run(env, cfg.T)
        else:
            trace = policy.run(env, cfg.T, designs.get(key))
        if len(trace) != cfg.T:
            raise RuntimeError(f"{run_id}: trace has {len(trace)} rounds, expected {cfg.T}")
        meta = {k: v for k, v in ((k, _json_scalar(v)) for k, v in trace.meta.items()) if v is not None}
        probs = trace.meta.get("probs") if cfg.log_probs else None
        runs.append({
            "run_id": run_id,
            "policy": spec.id,
            "seed": seed,
            "arm_indices": trace.arm_indices.tolist(),
            "rewards": trace.rewards.tolist(),
            "expected_rewards": trace.expected_rewards.tolist(),
            "cum_regret": trace.cum_regret.tolist(),
            "meta": meta,
            "probs": None if probs is None else np.asarray(probs).tolist(),
            "streams": {
                "env": stream_id(cfg.master_seed, "env", spec.id, seed),
                "policy": stream_id(cfg.master_seed, "policy", spec.id, seed),
                "design": None if key is None else stream_id(cfg.master_seed, "design", seed, repr(key)),
            },
        })
    return runs


def _trace_rows(run):
    return [
        (run["run_id"], run["policy"], run["seed"], t + 1, a, r, e, c)
        for t, (a, r, e, c) in enumerate(zip(run["arm_indices"], run["rewards"],
                                             run["expected_rewards"], run["cum_regret"]))
    ]


def _format_cell(v):
    return repr(float(v)) if isinstance(v, float) else str(v)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(v) for v in row])
    return buf.getvalue()


def read_regret_csv(path):
    """Parse a regret CSV back into typed row tuples."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header}")
        return [(r[0], r[1], int(r[2]), int(r[3]), int(r[4]), float(r[5]), float(r[6]), float(r[7]))
                for r in reader]


def summarize_rows(rows, policy_order=None):
    """Per-policy regret statistics from regret rows.

    Mean and sample standard deviation of cum_regret at each round across
    seeds, plus mean, standard deviation, standard error and quantiles of
    the final regret. Seeds are reduced in ascending order, so the result is
    identical whether rows come from memory or from the CSV.
    """
    by_policy = {}
    for run_id, policy, seed, t, _, _, _, c in rows:
        by_policy.setdefault(policy, {}).setdefault(seed, []).append((t, c))
    order = policy_order or sorted(by_policy)
    out = {}
    for policy in order:
        runs = by_policy[policy]
        seeds = sorted(runs)
        curves = np.array([[c for _, c in sorted(runs[s])] for s in seeds])
        n = len(seeds)
        final = curves[:, -1]
        std = curves.std(axis=0, ddof=1) if n > 1 else np.zeros(curves.shape[1])
        final_std = float(final.std(ddof=1)) if n > 1 else 0.0
        out[policy] = {
            "n_seeds": n,
            "seeds": seeds,
            "mean_cum_regret": curves.mean(axis=0).tolist(),
            "std_cum_regret": std.tolist(),
            "final_mean": float(final.mean()),
            "final_std": final_std,
            "final_se": final_std / math.sqrt(n),
            "final_quantiles": dict(zip(("q0", "q25", "q50", "q75", "q100"),
                                        np.quantile(final, [0.0, 0.25, 0.5, 0.75, 1.0]).tolist())),
        }
    return out


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def resolve_output_dir(cfg, output_dir=None):
    if output_dir is not None:
        return Path(output_dir)
    if cfg.output_dir is not None:
        return Path(cfg.output_dir)
    return Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)) / cfg.name


def run_experiment(cfg, output_dir=None, workers=None, write=True):
    """Run every (policy, seed) pair of ``cfg``.

    Writes ``regret.csv``, ``summary.json``, ``config.json`` and, when a
    corralling policy logged its probabilities, ``corral_probs.csv`` into
    the output directory. Returns the summary dict; the raw runs are under
    ``summary["_runs"]`` (not written to disk).
    """
    if not isinstance(cfg, ExperimentConfig):
        cfg = ExperimentConfig.from_dict(cfg)
    else:
        cfg.validate()
    if workers is None:
        workers = os.cpu_count() or 1
    seeds = list(cfg.seeds)
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
            per_seed = list(pool.map(_run_seed, [cfg] * len(seeds), seeds))
    else:
        per_seed = [_run_seed(cfg, s) for s in seeds]
    runs = sorted((r for batch in per_seed for r in batch), key=lambda r: r["run_id"])

    rows = [row for run in runs for row in _trace_rows(run)]
    policy_order = [p.id for p in cfg.policies]
    summary = {
        "name": cfg.name,
        "T": cfg.T,
        "master_seed": cfg.master_seed,
        "constants": dict(cfg.constants),
        "policies": summarize_rows(rows, policy_order),
        "runs": {r["run_id"]: {"meta": r["meta"], "streams": r["streams"]} for r in runs},
    }
    corral_rows = []
    for run in runs:
        if run["probs"] is None:
            continue
        grid = run["meta"].get("grid") or list(range(len(run["probs"][0])))
        for t, p in enumerate(run["probs"]):
            for i, prob in enumerate(p):
                corral_rows.append((run["run_id"], run["policy"], run["seed"], t + 1, i, grid[i], prob))

    if write:
        out = resolve_output_dir(cfg, output_dir)
        _write(out / "regret.csv", _csv_text(CSV_COLUMNS, rows))
        _write(out / "summary.json", json.dumps(summary, indent=2) + "\n")
        _write(out / "config.json", cfg.to_json() + "\n")
        if corral_rows:
            _write(out / "corral_probs.csv", _csv_text(PROB_COLUMNS, corral_rows))
        summary["output_dir"] = str(out)
        logger.info("wrote %d rows for %d runs to %s", len(rows), len(runs), out)
    summary["_runs"] = runs
    return summary


# ----------------------------------------------------------------------------
# presets


def _fig1():
    explore = {"sparsity_k": 5, "explore_budget": 40, "lam": 0.03}
    return {
        "name": "fig1",
        "instance": {"generator": "hard", "M": 500, "d": 100, "l": 5, "low_norm": 0.5,
                     "k": 5, "sigma": 0.1},
        "policies": [
            {"id": "bslb", "kind": "bslb", "params": {**explore, "u_hat": 200}},
            {"id": "estc_rejection", "kind": "estc_rejection", "params": dict(explore)},
            {"id": "random", "kind": "random", "params": {}},
        ],
        "T": 80,
        "seeds": list(range(20)),
        "master_seed": 2024,
    }


def _sim_appendix_scaled():
    d, T = 200, 150
    shared = {"lam": 0.1, "c_explore": 0.001}
    eta = math.sqrt((d.bit_length() - 1) / T)
    bases = [
        {"id": f"bslb_k{k}", "kind": "bslb", "params": {**shared, "sparsity_k": k}}
        for k in [2 ** i for i in range(d.bit_length())]
    ]
    return {
        "name": "sim-appendix-scaled",
        "instance": {"generator": "sparse", "M": 2000, "d": d, "k": 10, "beta": 3.0, "sigma": 0.1},
        "policies": [
            {"id": "cbslb", "kind": "cbslb", "params": {**shared, "eta": eta}},
            {"id": "ridge_corral", "kind": "ridge_corral", "params": {**shared, "eta": eta}},
            {"id": "random", "kind": "random", "params": {}},
        ] + bases,
        "T": T,
        "seeds": list(range(20)),
        "master_seed": 2024,
    }


def _unit_tiny():
    return {
        "name": "unit-tiny",
        "instance": {"generator": "sparse", "M": 12, "d": 3, "k": 1, "beta": 0.5, "sigma": 0.1},
        "policies": [
            {"id": "bslb", "kind": "bslb", "params": {"sparsity_k": 1, "u_hat": 6, "explore_budget": 4,
                                                      "enable_search": True}},
            {"id": "ridge_etc", "kind": "ridge_etc", "params": {"sparsity_k": 1, "u_hat": 6,
                                                                "explore_budget": 4}},
            {"id": "estc_rejection", "kind": "estc_rejection", "params": {"explore_budget": 4}},
            {"id": "cbslb", "kind": "cbslb", "params": {"u_hat": 6, "c_explore": 0.05}},
            {"id": "random", "kind": "random", "params": {}},
        ],
        "T": 8,
        "seeds": list(range(5)),
        "master_seed": 2024,
    }


_PRESETS = {"fig1": _fig1, "sim-appendix-scaled": _sim_appendix_scaled, "unit-tiny": _unit_tiny}


def preset_configs():
    """Name -> config document for every preset."""
    return {name: make() for name, make in _PRESETS.items()}


def preset_config(name):
    if name not in _PRESETS:
        raise ConfigError([("preset", f"unknown preset {name!r}; expected one of {sorted(_PRESETS)}")])
    return ExperimentConfig.from_dict(_PRESETS[name]())


# ----------------------------------------------------------------------------
# lasso error scaling


def lasso_error_scaling(d=200, k=5, beta=0.0, sigma=0.5, ns=(200, 800, 3200), n_seeds=50,
                        master_seed=0, lam_scale=1.0):
    """Median l1 error of the Lasso against sample size, and its log-log slope.

    For each seed a parameter with the given sparsity and tail is drawn,
    and for each n a design of n sphere-uniform rows with Gaussian noise.
    The penalty is ``lam_scale * default_lambda(n, d)``.
    """
    errors = {n: [] for n in ns}
    for s in range(n_seeds):
        theta = gen_sparse_theta(d, k, beta, np.random.default_rng(stream_seed(master_seed, "theta", s))).theta
        for n in ns:
            rng = np.random.default_rng(stream_seed(master_seed, "lasso", n, s))
            X = gen_sphere_arms(n, d, rng)
            r = X @ theta + sigma * rng.standard_normal(n)
            est, _ = lasso_fit(Regression(X, r), LassoConfig(lam_scale * default_lambda(n, d)))
            errors[n].append(float(np.abs(est - theta).sum()))
    medians = [float(np.median(errors[n])) for n in ns]
    slope = float(np.polyfit(np.log(ns), np.log(medians), 1)[0])
    return {"d": d, "k": k, "beta": beta, "sigma": sigma, "n": list(ns), "n_seeds": n_seeds,
            "median_l1_error": medians, "slope": slope}
