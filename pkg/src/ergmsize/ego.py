"""Egocentric survey data: ingestion, implied network statistics, resampling.

Ties are reported by both endpoints in a census, so a statistic that
sums ``f(x_i, x_j)`` over edges is recovered as half the sum of
``f(x_ego, x_alter)`` over all nominations.  Degree counts are
properties of single egos and are summed directly.  In a sample the
half-sum averages the two sides' reports; fractional results are kept
as mean-value targets.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InputError, NotEgocentricError
from .network import AttributeTable, Network
from .terms import CompiledModel, ModelSpec, StatVector, pair_values

log = logging.getLogger(__name__)

EDGE_SUM_KINDS = {
    "edge_count", "activity_by_category", "within_category_ties", "between_category_ties",
    "same_category_ties", "numeric_activity", "numeric_difference", "ordered_asymmetry",
}
ACTOR_SUM_KINDS = {"degree_count"}


# --------------------------------------------------------------------------
# Schema
# --------------------------------------------------------------------------

@dataclass
class AttributeDecl:
    name: str
    type: str = "categorical"
    levels: list = field(default_factory=list)
    recode: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.type not in ("categorical", "numeric"):
            raise InputError(f"attribute {self.name!r}: unknown type {self.type!r}")
        if self.type == "categorical" and not self.levels:
            raise InputError(f"categorical attribute {self.name!r} needs levels")
        self.levels = [str(x) for x in self.levels]
        self.recode = {str(k): str(v) for k, v in self.recode.items()}

    def parse(self, raw):
        """Parsed value, or ``None`` when missing or invalid."""
        if raw is None:
            return None
        raw = str(raw).strip()
        if raw == "" or raw.upper() in ("NA", "NAN"):
            return None
        if self.type == "numeric":
            try:
                v = float(raw)
            except ValueError:
                return None
            return v if math.isfinite(v) else None
        raw = self.recode.get(raw, raw)
        return self.levels.index(raw) if raw in self.levels else None


@dataclass
class SurveySchema:
    """Attribute declarations plus ingestion rules.

    ``ego_filter`` drops whole egos whose numeric attribute falls outside
    ``[lo, hi]``; ``alter_filter`` drops only the offending alters.
    """

    attributes: list
    ego_filter: dict = field(default_factory=dict)
    alter_filter: dict = field(default_factory=dict)

    def __post_init__(self):
        self.attributes = [a if isinstance(a, AttributeDecl) else AttributeDecl(**a) for a in self.attributes]
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise InputError("duplicate attribute names in schema")
        for rule in (self.ego_filter, self.alter_filter):
            for name, bounds in rule.items():
                if name not in self.numeric or len(bounds) != 2:
                    raise InputError(f"filter on {name!r} needs a numeric attribute and [lo, hi]")

    @property
    def levels(self) -> dict:
        return {a.name: list(a.levels) for a in self.attributes if a.type == "categorical"}

    @property
    def numeric(self) -> list:
        return [a.name for a in self.attributes if a.type == "numeric"]

    @property
    def names(self) -> list:
        return [a.name for a in self.attributes]

    def to_dict(self):
        return {
            "attributes": [{"name": a.name, "type": a.type, **({"levels": a.levels} if a.levels else {}),
                            **({"recode": a.recode} if a.recode else {})} for a in self.attributes],
            "ego_filter": {k: list(v) for k, v in self.ego_filter.items()},
            "alter_filter": {k: list(v) for k, v in self.alter_filter.items()},
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["attributes"], dict(d.get("ego_filter", {})), dict(d.get("alter_filter", {})))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def for_attrs(cls, attrs: AttributeTable) -> "SurveySchema":
        decls = [AttributeDecl(k, "categorical", attrs.levels[k]) for k in attrs.categorical]
        decls += [AttributeDecl(k, "numeric") for k in attrs.numeric]
        return cls(decls)


# --------------------------------------------------------------------------
# Sample containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EgoRecord:
    """One respondent: coded attributes, sampling weight and alters.

    Categorical values are level codes under the sample's schema.
    """

    ego: dict
    weight: float = 1.0
    alters: tuple = ()

    def __post_init__(self):
        if not self.weight > 0:
            raise InputError(f"ego weight must be positive, got {self.weight}")
        object.__setattr__(self, "alters", tuple(self.alters))


class EgoSample:
    """An immutable collection of :class:`EgoRecord` under one schema."""

    def __init__(self, records, schema: SurveySchema):
        self.records = tuple(records)
        self.schema = schema
        if not self.records:
            raise InputError("an ego sample needs at least one record")
        names = set(schema.names)
        for r in self.records:
            if set(r.ego) != names or any(set(a) != names for a in r.alters):
                raise InputError("ego/alter attributes do not match the schema")

    def __len__(self):
        return len(self.records)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([r.weight for r in self.records], dtype=np.float64)

    @cached_property
    def n_alters(self) -> np.ndarray:
        return np.array([len(r.alters) for r in self.records], dtype=np.int64)

    @cached_property
    def owner(self) -> np.ndarray:
        return np.repeat(np.arange(len(self)), self.n_alters)

    def _columns(self, rows):
        cat = {k: np.array([r[k] for r in rows], dtype=np.int64) for k in self.schema.levels}
        num = {k: np.array([r[k] for r in rows], dtype=np.float64) for k in self.schema.numeric}
        return cat, num

    @cached_property
    def ego_columns(self):
        return self._columns([r.ego for r in self.records])

    @cached_property
    def alter_columns(self):
        return self._columns([a for r in self.records for a in r.alters])

    def normalized_weights(self) -> np.ndarray:
        w = self.weights
        return w * (len(w) / w.sum())

    def ego_attributes(self) -> AttributeTable:
        """Attributes of the pseudo-population whose actors are the egos."""
        cat, num = self.ego_columns
        return AttributeTable(len(self), dict(cat), self.schema.levels, dict(num))


# --------------------------------------------------------------------------
# Implied statistics
# --------------------------------------------------------------------------

def implied_edge_stat(sample: EgoSample, f) -> float:
    """Half the weighted sum of ``f(ego, alter)`` over nominations."""
    w = sample.normalized_weights()
    return 0.5 * math.fsum(w[e] * math.fsum(f(r.ego, a) for a in r.alters) for e, r in enumerate(sample.records))


def implied_actor_stat(sample: EgoSample, f) -> float:
    """Weighted sum over egos of ``f(ego, alters)``."""
    w = sample.normalized_weights()
    return math.fsum(w[e] * f(r.ego, r.alters) for e, r in enumerate(sample.records))


@dataclass
class ImpliedStats:
    n: int
    targets: StatVector
    composition: dict
    names: list = field(default_factory=list)

    def to_dict(self):
        return {"n": self.n, "names": list(self.names), "targets": [float(x) for x in self.targets],
                "composition": self.composition}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["n"]), np.asarray(d["targets"], dtype=np.float64), d.get("composition", {}),
                   list(d.get("names", [])))


def implied_stats(sample: EgoSample, model: ModelSpec) -> ImpliedStats:
    """Network statistics implied by an egocentric sample treated as a census."""
    for t in model.terms:
        if t.kind not in EDGE_SUM_KINDS | ACTOR_SUM_KINDS:
            raise NotEgocentricError(f"{t.label} cannot be inferred from ego-alter reports")
    levels, numeric = sample.schema.levels, sample.schema.numeric
    cm = CompiledModel.bind(model, levels, numeric)
    m = len(sample)
    ecat, enum = cm.node_arrays(*sample.ego_columns, m)
    acat, anum = cm.node_arrays(*sample.alter_columns, int(sample.n_alters.sum()))
    w = sample.normalized_weights()
    own = sample.owner
    pv = pair_values(cm, ecat[:, own], enum[:, own], acat, anum)
    targets = np.zeros(len(model.terms))
    wn = w[own]
    for k, t in enumerate(model.terms):
        if t.kind in ACTOR_SUM_KINDS:
            hit = (ecat[k] == 1) & (sample.n_alters == t.d)
            targets[k] = math.fsum(w[hit])
        else:
            targets[k] = 0.5 * math.fsum(wn * pv[:, k])
    comp = {}
    cat, _ = sample.ego_columns
    for name, lv in levels.items():
        comp[name] = {lab: float(math.fsum(w[cat[name] == c])) for c, lab in enumerate(lv)}
    return ImpliedStats(m, targets, comp, model.names)


# --------------------------------------------------------------------------
# Resampling, census, file I/O
# --------------------------------------------------------------------------

def bootstrap_resample(sample: EgoSample, m: int, seed) -> EgoSample:
    """Draw ``m`` egos with replacement, probability proportional to weight."""
    if m < 1:
        raise InputError("resample size must be >= 1")
    rng = np.random.default_rng(seed)
    w = sample.weights
    idx = rng.choice(len(sample), size=m, replace=True, p=w / w.sum())
    recs = [EgoRecord(sample.records[i].ego, 1.0, sample.records[i].alters) for i in idx]
    return EgoSample(recs, sample.schema)


def _node_attrs(attrs: AttributeTable, i: int) -> dict:
    d = {k: int(v[i]) for k, v in attrs.categorical.items()}
    d.update({k: float(v[i]) for k, v in attrs.numeric.items()})
    return d


def census(net: Network, attrs: AttributeTable, egos=None, weights=None) -> EgoSample:
    """Egocentric view of ``net``: every node (or each of ``egos``) reports its neighbours."""
    schema = SurveySchema.for_attrs(attrs)
    rows = [_node_attrs(attrs, i) for i in range(net.n)]
    egos = range(net.n) if egos is None else egos
    recs = []
    for e, i in enumerate(egos):
        w = 1.0 if weights is None else float(weights[e])
        recs.append(EgoRecord(rows[i], w, [rows[j] for j in sorted(net.neighbors[i])]))
    return EgoSample(recs, schema)


def read_survey(path, schema: SurveySchema) -> tuple[EgoSample, dict]:
    """Read a long-format survey CSV.

    One row per ego-alter pair and one row with empty ``alter_index`` for
    each ego without alters.  Returns the sample and a count of dropped
    egos and alters.
    """
    names = schema.names
    decl = {a.name: a for a in schema.attributes}
    egos: dict = {}
    order = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"ego_id", "weight", "alter_index"} | {f"ego_{a}" for a in names} | {f"alter_{a}" for a in names}
        missing = need - set(reader.fieldnames or ())
        if missing:
            raise InputError(f"{path}: missing columns {sorted(missing)}")
        for row in reader:
            eid = row["ego_id"]
            if eid not in egos:
                order.append(eid)
                egos[eid] = {"raw": row, "alters": [], "bad": False}
            entry = egos[eid]
            if row["alter_index"].strip() == "":
                continue
            alter = {a: decl[a].parse(row[f"alter_{a}"]) for a in names}
            entry["alters"].append(alter)
    report = {"egos_read": len(order), "dropped_missing": 0, "dropped_ego_filter": 0, "dropped_alters": 0}
    recs = []
    for eid in order:
        entry = egos[eid]
        raw = entry["raw"]
        ego = {a: decl[a].parse(raw[f"ego_{a}"]) for a in names}
        try:
            weight = float(raw["weight"])
        except ValueError:
            weight = float("nan")
        if any(v is None for v in ego.values()) or any(v is None for a in entry["alters"] for v in a.values()) \
                or not weight > 0:
            report["dropped_missing"] += 1
            continue
        if any(not lo <= ego[k] <= hi for k, (lo, hi) in schema.ego_filter.items()):
            report["dropped_ego_filter"] += 1
            continue
        alters = [a for a in entry["alters"] if all(lo <= a[k] <= hi for k, (lo, hi) in schema.alter_filter.items())]
        report["dropped_alters"] += len(entry["alters"]) - len(alters)
        recs.append(EgoRecord(ego, weight, alters))
    log.info("survey %s: %s", path, report)
    return EgoSample(recs, schema), report


def write_survey(sample: EgoSample, path) -> None:
    names = sample.schema.names
    levels = sample.schema.levels

    def fmt(rec):
        return [levels[a][rec[a]] if a in levels else repr(float(rec[a])) for a in names]

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ego_id", "weight", *(f"ego_{a}" for a in names), "alter_index", *(f"alter_{a}" for a in names)])
        for e, r in enumerate(sample.records):
            if not r.alters:
                w.writerow([e, repr(r.weight), *fmt(r.ego), "", *([""] * len(names))])
            for k, a in enumerate(r.alters):
                w.writerow([e, repr(r.weight), *fmt(r.ego), k, *fmt(a)])


def synth_population(spec, n: int, seed=0, attrs: AttributeTable | None = None, **kw):
    """Synthetic network and attributes; see :func:`ergmsize.synth.synth_population`."""
    from .synth import synth_population as _synth

    return _synth(spec, n, seed, attrs, **kw)
