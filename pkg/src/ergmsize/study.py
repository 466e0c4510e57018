"""Scaling study and density-preservation demonstration.

The scaling study resamples a base ego sample to each requested size,
treats every resample as a census, fits the model with the offset for
that size, and summarises the coefficients per size.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .ego import EgoSample, SurveySchema, bootstrap_resample, census, implied_stats, read_survey
from .errors import ErgmError, InputError
from .fit import FitConfig, fit_mean_value
from .sampler import GibbsChain, mc_standard_error
from .synth import SynthSpec, synth_population
from .terms import ModelSpec, OffsetSpec, TermSpec, edges, ilogit, nhsls_model, offset_value

log = logging.getLogger(__name__)

FAILURE_WARN_FRACTION = 0.2
CSV_COLUMNS = ["size", "replicate", "seed", "replicate_seed", "config_hash", "term", "estimate",
               "mc_se", "offset", "converged", "status"]


@dataclass
class StudyConfig:
    """Inputs of a scaling study.

    The base sample is a survey file (``survey`` plus ``schema``) or a
    synthetic population (``synth``, a :class:`SynthSpec` dict, of
    ``synth_n`` actors).  ``model`` is a model dict, a path to a model
    file, or ``"nhsls"``.
    """

    sizes: list = field(default_factory=lambda: [300, 600, 1200])
    replicates: int = 10
    model: object = "nhsls"
    survey: str | None = None
    schema: str | None = None
    synth: dict | None = None
    synth_n: int = 2000
    fit: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    out_dir: str | None = None

    def __post_init__(self):
        self.sizes = [int(s) for s in self.sizes]
        if not self.sizes or min(self.sizes) < 2:
            raise InputError("sizes must be >= 2")
        if self.replicates < 1:
            raise InputError("replicates must be >= 1")
        if self.survey is not None and self.schema is None:
            raise InputError("a survey file needs a schema file")

    def model_spec(self) -> ModelSpec:
        if self.model == "nhsls":
            return nhsls_model()
        if self.model == "edges":
            return ModelSpec([edges()], offset=OffsetSpec("log_inverse_n"))
        if isinstance(self.model, dict):
            return ModelSpec.from_dict(self.model)
        from .terms import load_model

        return load_model(self.model)[0]

    def fit_config(self, seed) -> FitConfig:
        return FitConfig(**{**self.fit, "seed": seed})

    def to_dict(self):
        return asdict(self)

    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("threads")
        d.pop("out_dir")
        d["model"] = self.model_spec().to_dict()
        blob = json.dumps(d, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def base_sample(cfg: StudyConfig) -> EgoSample:
    if cfg.survey is not None:
        sample, report = read_survey(cfg.survey, SurveySchema.load(cfg.schema))
        log.info("survey ingestion: %s", report)
        return sample
    spec = SynthSpec.from_dict(cfg.synth or {})
    net, attrs = synth_population(spec, cfg.synth_n, seed=[cfg.seed, 0])
    return census(net, attrs)


def replicate_seed(seed: int, size: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, size, rep]).generate_state(1)[0])


_WORKER = {}


def _init_worker(sample, model, cfg):
    _WORKER.update(sample=sample, model=model, cfg=cfg)


def _run_replicate(task):
    size, rep = task
    sample, model, cfg = _WORKER["sample"], _WORKER["model"], _WORKER["cfg"]
    rseed = replicate_seed(cfg.seed, size, rep)
    rec = {"size": size, "replicate": rep, "replicate_seed": rseed,
           "offset": offset_value(model.offset, size)}
    try:
        res_sample = bootstrap_resample(sample, size, [rseed, 0])
        targets = implied_stats(res_sample, model)
        fit = fit_mean_value(targets, res_sample.ego_attributes(), model, cfg.fit_config([rseed, 1]))
    except ErgmError as err:
        rec.update(status=f"{type(err).__name__}: {err}", converged=False, theta=None, se=None)
        return rec
    rec.update(status="ok" if fit.converged else "not converged", converged=bool(fit.converged),
               theta=fit.theta_hat.tolist(), se=fit.mc_standard_errors.tolist())
    return rec


@dataclass
class StudyReport:
    sizes: list
    names: list
    offset: dict
    mean: dict
    sd: dict
    n_ok: dict
    failures: dict
    records: list
    seed: int
    config_hash: str
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def table(self) -> str:
        """Coefficient means with bootstrap SDs in parentheses, one column per size."""
        head = ["term", *(f"n={s}" for s in self.sizes)]
        rows = [["offset", *(f"{self.offset[s]:.2f} (fixed)" for s in self.sizes)]]
        for k, name in enumerate(self.names):
            cells = []
            for s in self.sizes:
                m, sd = self.mean[s][k], self.sd[s][k]
                cells.append("NA" if m is None else f"{m:.2f} ({sd:.2f})" if sd is not None else f"{m:.2f}")
            rows.append([name, *cells])
        rows.append(["failed fits", *(str(self.failures[s]) for s in self.sizes)])
        width = [max(len(r[c]) for r in [head, *rows]) for c in range(len(head))]
        fmt = lambda r: "  ".join(x.ljust(w) if c == 0 else x.rjust(w) for c, (x, w) in enumerate(zip(r, width)))
        return "\n".join([f"# seed={self.seed} config={self.config_hash}", fmt(head), *map(fmt, rows)]) + "\n"

    def long_rows(self):
        for r in self.records:
            for k, name in enumerate(self.names):
                yield {"size": r["size"], "replicate": r["replicate"], "seed": self.seed,
                       "replicate_seed": r["replicate_seed"], "config_hash": self.config_hash,
                       "term": name, "estimate": "" if r["theta"] is None else repr(r["theta"][k]),
                       "mc_se": "" if r["se"] is None else repr(r["se"][k]), "offset": repr(r["offset"]),
                       "converged": int(r["converged"]), "status": r["status"]}

    def write(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "study_report.json"), "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
        with open(os.path.join(out_dir, "study_table.txt"), "w") as fh:
            fh.write(self.table())
        with open(os.path.join(out_dir, "study_long.csv"), "w", newline="") as fh:
            w = csv.DictWriter(fh, CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            w.writerows(self.long_rows())


def _summarise(cfg, model, records, chash) -> StudyReport:
    K = len(model.terms)
    mean, sd, n_ok, failures, offs, warns = {}, {}, {}, {}, {}, []
    for s in cfg.sizes:
        recs = [r for r in records if r["size"] == s]
        ok = np.array([r["theta"] for r in recs if r["converged"]]).reshape(-1, K)
        n_ok[s] = len(ok)
        failures[s] = len(recs) - len(ok)
        offs[s] = offset_value(model.offset, s)
        mean[s] = ok.mean(axis=0).tolist() if len(ok) else [None] * K
        sd[s] = ok.std(axis=0, ddof=1).tolist() if len(ok) > 1 else [None] * K
        if failures[s] > FAILURE_WARN_FRACTION * len(recs):
            msg = f"size {s}: {failures[s]} of {len(recs)} replicate fits failed"
            log.warning(msg)
            warns.append(msg)
    return StudyReport(cfg.sizes, model.names, offs, mean, sd, n_ok, failures, records, cfg.seed, chash, warns)


def run_scaling_study(cfg: StudyConfig, sample: EgoSample | None = None) -> StudyReport:
    """Resample, fit and summarise at every (size, replicate).

    Results are keyed by (size, replicate) and do not depend on worker
    count or completion order.
    """
    model = cfg.model_spec()
    sample = sample if sample is not None else base_sample(cfg)
    tasks = [(s, r) for s in cfg.sizes for r in range(cfg.replicates)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(cfg.threads, initializer=_init_worker, initargs=(sample, model, cfg)) as ex:
            records = list(ex.map(_run_replicate, tasks))
    else:
        _init_worker(sample, model, cfg)
        records = [_run_replicate(t) for t in tasks]
    records.sort(key=lambda r: (r["size"], r["replicate"]))
    report = _summarise(cfg, model, records, cfg.config_hash())
    if cfg.out_dir:
        report.write(cfg.out_dir)
    return report


# --------------------------------------------------------------------------
# Density preservation
# --------------------------------------------------------------------------

def run_invariance_demo(theta: float, sizes, offset: bool = True, n_networks: int = 100, seed=0,
                        model: ModelSpec | None = None, attrs_for=None, interval: float = 1.0,
                        burn_in: float = 20.0) -> dict:
    """Simulate at a fixed theta across sizes; report density and mean degree.

    Without a model an edges-only model is used, with or without the
    ``log(1/n)`` offset.  ``attrs_for(n)`` supplies node attributes for
    models that need them.  Intervals and burn-in are in sweeps.
    """
    if model is None:
        model = ModelSpec([edges()], theta=[theta],
                          offset=OffsetSpec("log_inverse_n" if offset else "none"))
    rows = []
    for s in sizes:
        attrs = attrs_for(s) if attrs_for else None
        chain = GibbsChain(attrs, model, n=s, seed=[seed, s])
        D = chain.dyads
        chain.run(int(burn_in * D))
        step = max(1, int(interval * D))
        ties = np.empty(n_networks)
        for k in range(n_networks):
            chain.run(step)
            ties[k] = chain.deg.sum() / 2
        dens, md = ties / D, 2 * ties / s
        row = {"size": s, "density": float(dens.mean()), "density_se": float(mc_standard_error(dens)),
               "mean_degree": float(md.mean()), "mean_degree_se": float(mc_standard_error(md))}
        if model.dyad_independent and len(model.terms) == 1 and model.terms[0].kind == "edge_count":
            p = float(ilogit(offset_value(model.offset, s) + model.require_theta()[0]))
            row.update(expected_density=p, expected_mean_degree=p * (s - 1))
        rows.append(row)
    return {"theta": float(theta) if theta is not None else None, "offset": model.offset.to_dict(),
            "seed": seed, "rows": rows}
