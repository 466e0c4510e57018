"""Sufficient statistics, change statistics and the size offset.

A model is an ordered tuple of :class:`TermSpec` plus an
:class:`OffsetSpec`.  Every term here is either dyad-independent (its
change statistic is a function of the two endpoint attributes only) or
a degree count, whose change statistic depends on the two endpoint
degrees.  Both kinds are local: toggling ``{i, j}`` never looks beyond
``i``, ``j`` and their current degrees.

Three evaluation routes exist and are cross-checked in the tests:

* :func:`global_stats` - direct evaluation from each term's definition;
* :func:`change_stats` - incremental evaluation for a single dyad;
* :class:`CompiledModel` - flat arrays consumed by the Gibbs kernel and
  by the vectorised pair evaluator used in enumeration, logistic
  fitting and egocentric inference.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError, InvalidOffsetError, ModelAttributeMismatch
from .network import AttributeTable, Network

StatVector = np.ndarray

DYAD_INDEPENDENT = "dyad_independent"
MARKOV = "markov"

# Kernel kind codes; keep in sync with _kernel.py.
EDGE_COUNT = 0
ACTIVITY = 1
WITHIN = 2
BETWEEN = 3
SAME = 4
NUM_ACTIVITY = 5
NUM_DIFFERENCE = 6
ASYMMETRY = 7
DEGREE = 8

KIND_CODES = {
    "edge_count": EDGE_COUNT,
    "activity_by_category": ACTIVITY,
    "within_category_ties": WITHIN,
    "between_category_ties": BETWEEN,
    "same_category_ties": SAME,
    "numeric_activity": NUM_ACTIVITY,
    "numeric_difference": NUM_DIFFERENCE,
    "ordered_asymmetry": ASYMMETRY,
    "degree_count": DEGREE,
}

TRANSFORMS = ("identity", "scaled", "sqrt_scaled", "sqrt")


def ilogit(x):
    return 1.0 / (1.0 + np.exp(-x))


def logit(p):
    return np.log(p) - np.log1p(-p)


# --------------------------------------------------------------------------
# Specs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OffsetSpec:
    """Fixed coefficient on the edge count ``|y|``.

    ``log_inverse_n`` gives ``log(1/n)``; ``logit_mu_over_n_minus_1``
    gives ``logit(mu / (n - 1))`` for a reference mean degree ``mu``.
    """

    variant: str = "none"
    mu: float | None = None

    def __post_init__(self):
        if self.variant not in ("none", "log_inverse_n", "logit_mu_over_n_minus_1"):
            raise InvalidOffsetError(f"unknown offset variant {self.variant!r}")
        if self.variant == "logit_mu_over_n_minus_1" and not (self.mu is not None and self.mu > 0):
            raise InvalidOffsetError("logit_mu_over_n_minus_1 needs mu > 0")

    def value(self, n: int) -> float:
        return offset_value(self, n)

    def to_dict(self):
        d = {"variant": self.variant}
        if self.mu is not None:
            d["mu"] = self.mu
        return d

    @classmethod
    def from_dict(cls, d):
        if d is None:
            return cls()
        if isinstance(d, str):
            return cls(d)
        return cls(d.get("variant", "none"), d.get("mu"))


def offset_value(spec: OffsetSpec, n: int) -> float:
    if n < 2:
        raise InvalidOffsetError(f"offset needs n >= 2, got {n}")
    if spec.variant == "none":
        return 0.0
    if spec.variant == "log_inverse_n":
        return math.log(1.0 / n)
    q = spec.mu / (n - 1)
    if q >= 1:
        raise InvalidOffsetError(f"mu/(n-1) = {q:g} must be < 1")
    return math.log(q) - math.log1p(-q)


@dataclass(frozen=True)
class TermSpec:
    """One sufficient statistic.

    ``levels`` carries the category level(s) a term refers to: one for
    activity/within, two for between, ``(older, younger)`` for
    ordered_asymmetry, and an optional filter level for degree_count.
    Numeric transforms map a raw value ``t`` to ``(t-lo)/(hi-lo) - 1/2``
    (``scaled``), ``sqrt((t-lo)/(hi-lo)) - 1/2`` (``sqrt_scaled``),
    ``sqrt((t-lo)/(hi-lo))`` (``sqrt``) or ``t`` itself.
    """

    kind: str
    attr: str | None = None
    levels: tuple = ()
    d: int | None = None
    transform: str = "identity"
    power: int = 1
    numeric_attr: str | None = None
    lo: float = 18.0
    hi: float = 60.0
    name: str | None = None

    def __post_init__(self):
        if self.kind not in KIND_CODES:
            raise InputError(f"unknown term kind {self.kind!r}")
        object.__setattr__(self, "levels", tuple(self.levels))
        k = self.kind
        need_attr = k != "edge_count" and not (k == "degree_count" and not self.levels)
        if need_attr and not self.attr:
            raise InputError(f"{k} needs an attribute")
        nlev = {"activity_by_category": 1, "within_category_ties": 1, "between_category_ties": 2,
                "ordered_asymmetry": 2}.get(k)
        if nlev is not None and len(self.levels) != nlev:
            raise InputError(f"{k} needs {nlev} level(s), got {self.levels}")
        if k == "degree_count":
            if self.d is None or self.d < 0:
                raise InputError("degree_count needs d >= 0")
            if len(self.levels) > 1:
                raise InputError("degree_count takes at most one filter level")
        if k == "numeric_difference" and self.power not in (1, 2):
            raise InputError("numeric_difference power must be 1 or 2")
        if k in ("numeric_activity", "numeric_difference"):
            if self.transform not in TRANSFORMS:
                raise InputError(f"unknown transform {self.transform!r}")
            if self.transform != "identity" and not self.hi > self.lo:
                raise InputError("transform needs hi > lo")
        if k == "ordered_asymmetry" and not self.numeric_attr:
            raise InputError("ordered_asymmetry needs numeric_attr")

    @property
    def locality(self) -> str:
        return MARKOV if self.kind == "degree_count" else DYAD_INDEPENDENT

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        parts = [self.kind]
        if self.kind == "degree_count":
            parts.append(str(self.d))
        if self.attr:
            parts.append(self.attr)
        parts += [str(x) for x in self.levels]
        if self.kind in ("numeric_activity", "numeric_difference") and self.transform != "identity":
            parts.append(self.transform)
        if self.kind == "numeric_difference":
            parts.append(f"p{self.power}")
        if self.numeric_attr:
            parts.append(self.numeric_attr)
        return ".".join(parts)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        for f in ("attr", "d", "numeric_attr", "name"):
            v = getattr(self, f)
            if v is not None:
                d[f] = v
        if self.levels:
            d["levels"] = list(self.levels)
        if self.kind in ("numeric_activity", "numeric_difference"):
            d["transform"] = self.transform
            d["lo"], d["hi"] = self.lo, self.hi
        if self.kind == "numeric_difference":
            d["power"] = self.power
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TermSpec":
        d = dict(d)
        if "level" in d:
            d["levels"] = [d.pop("level")]
        for alias in ("min_age", "max_age"):
            if alias in d:
                d["lo" if alias == "min_age" else "hi"] = d.pop(alias)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown term fields {sorted(unknown)}")
        return cls(**d)


# Short constructors.

def edges(name=None):
    return TermSpec("edge_count", name=name)


def activity(attr, level, name=None):
    return TermSpec("activity_by_category", attr, (level,), name=name)


def within(attr, level, name=None):
    return TermSpec("within_category_ties", attr, (level,), name=name)


def between(attr, level1, level2, name=None):
    return TermSpec("between_category_ties", attr, (level1, level2), name=name)


def same(attr, name=None):
    return TermSpec("same_category_ties", attr, name=name)


def degree(d, attr=None, level=None, name=None):
    return TermSpec("degree_count", attr, () if level is None else (level,), d=d, name=name)


def numeric_activity(attr, transform="identity", lo=18.0, hi=60.0, name=None):
    return TermSpec("numeric_activity", attr, transform=transform, lo=lo, hi=hi, name=name)


def numeric_difference(attr, transform="identity", power=1, lo=18.0, hi=60.0, name=None):
    return TermSpec("numeric_difference", attr, transform=transform, power=power, lo=lo, hi=hi, name=name)


def ordered_asymmetry(attr, older, younger, numeric_attr, name=None):
    return TermSpec("ordered_asymmetry", attr, (older, younger), numeric_attr=numeric_attr, name=name)


@dataclass(frozen=True)
class ModelSpec:
    terms: tuple
    theta: np.ndarray | None = None
    offset: OffsetSpec = field(default_factory=OffsetSpec)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.theta is not None:
            th = np.array(self.theta, dtype=np.float64).reshape(-1)
            if th.size != len(self.terms):
                raise InputError(f"theta has {th.size} entries for {len(self.terms)} terms")
            th.setflags(write=False)
            object.__setattr__(self, "theta", th)

    @property
    def names(self) -> list[str]:
        return [t.label for t in self.terms]

    @property
    def markov_mask(self) -> np.ndarray:
        return np.array([t.locality == MARKOV for t in self.terms], dtype=bool)

    @property
    def dyad_independent(self) -> bool:
        return not self.markov_mask.any()

    def with_theta(self, theta) -> "ModelSpec":
        return replace(self, theta=np.asarray(theta, dtype=np.float64))

    def with_offset(self, offset: OffsetSpec) -> "ModelSpec":
        return replace(self, offset=offset)

    def subset(self, mask) -> "ModelSpec":
        mask = np.asarray(mask, dtype=bool)
        terms = [t for t, m in zip(self.terms, mask) if m]
        theta = None if self.theta is None else self.theta[mask]
        return ModelSpec(terms, theta, self.offset)

    def require_theta(self) -> np.ndarray:
        if self.theta is None:
            raise InputError("model has no theta")
        return self.theta

    def to_dict(self) -> dict:
        d = {"terms": [t.to_dict() for t in self.terms], "offset": self.offset.to_dict()}
        if self.theta is not None:
            d["theta"] = [float(x) for x in self.theta]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        if "terms" not in d:
            raise InputError("model spec needs a 'terms' list")
        terms = [TermSpec.from_dict(t) for t in d["terms"]]
        return cls(terms, d.get("theta"), OffsetSpec.from_dict(d.get("offset")))


def load_model(path) -> tuple[ModelSpec, dict]:
    """Read a model-spec JSON file.

    Returns the model and the attribute declarations found alongside it:
    ``{"categorical": [...], "levels": {...}}``.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: {err}") from None
    decl = {"categorical": list(doc.get("categorical", [])), "levels": dict(doc.get("levels", {}))}
    return ModelSpec.from_dict(doc), decl


def save_model(model: ModelSpec, path, categorical=(), levels=None) -> None:
    doc = model.to_dict()
    if categorical:
        doc["categorical"] = list(categorical)
    if levels:
        doc["levels"] = levels
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def nhsls_model(offset: OffsetSpec | None = None, lo=18.0, hi=60.0) -> ModelSpec:
    """The 19-term sex/race/age/monogamy model of the NHSLS analysis.

    Expects categorical ``sex`` (F, M) and ``race`` (B, H, O, W) and
    numeric ``age``; race ``B`` is the activity baseline.
    """
    terms = [
        activity("sex", "F", name="activity.F"),
        activity("sex", "M", name="activity.M"),
        same("sex", name="same_sex"),
        degree(1, "sex", "F", name="monogamy.F"),
        degree(1, "sex", "M", name="monogamy.M"),
        activity("race", "H", name="activity.H"),
        activity("race", "O", name="activity.O"),
        activity("race", "W", name="activity.W"),
        within("race", "B", name="homophily.B"),
        within("race", "H", name="homophily.H"),
        within("race", "O", name="homophily.O"),
        within("race", "W", name="homophily.W"),
        numeric_activity("age", "sqrt_scaled", lo, hi, name="age.sqrt"),
        numeric_activity("age", "scaled", lo, hi, name="age"),
        numeric_difference("age", "sqrt", 1, lo, hi, name="agediff.sqrt"),
        numeric_difference("age", "scaled", 1, lo, hi, name="agediff"),
        numeric_difference("age", "sqrt", 2, lo, hi, name="agediff2.sqrt"),
        numeric_difference("age", "scaled", 2, lo, hi, name="agediff2"),
        ordered_asymmetry("sex", "M", "F", "age", name="age_sex_asymmetry"),
    ]
    return ModelSpec(terms, offset=offset or OffsetSpec("log_inverse_n"))


# --------------------------------------------------------------------------
# Attribute access shared by all routes
# --------------------------------------------------------------------------

def transform_values(term: TermSpec, t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if term.transform == "identity":
        return t.copy()
    u = (t - term.lo) / (term.hi - term.lo)
    if term.transform == "scaled":
        return u - 0.5
    if np.any(u < 0):
        raise ModelAttributeMismatch(f"{term.label}: values below lo={term.lo} under a sqrt transform")
    r = np.sqrt(u)
    return r - 0.5 if term.transform == "sqrt_scaled" else r


def _check_columns(term: TermSpec, levels: dict, numeric: set):
    if term.kind in ("numeric_activity", "numeric_difference"):
        if term.attr not in numeric:
            raise ModelAttributeMismatch(f"{term.label}: no numeric column {term.attr!r}")
        return
    if term.attr is not None and term.attr not in levels:
        raise ModelAttributeMismatch(f"{term.label}: no categorical column {term.attr!r}")
    if term.kind == "ordered_asymmetry" and term.numeric_attr not in numeric:
        raise ModelAttributeMismatch(f"{term.label}: no numeric column {term.numeric_attr!r}")


def _level_code(levels: dict, attr: str, level) -> int:
    lv = levels[attr]
    if str(level) in lv:
        return lv.index(str(level))
    if isinstance(level, (int, np.integer)) and 0 <= level < len(lv):
        return int(level)
    raise ModelAttributeMismatch(f"{attr!r} has no level {level!r}; levels are {lv}")


@dataclass
class CompiledModel:
    """Flat per-term arrays describing a model bound to a schema.

    ``kinds[k]`` is a kind code; ``p1``/``p2`` hold level codes (or ``d``
    for degree counts, ``power`` for differences).  Per-node data for a
    specific node set live in ``cat`` and ``num`` (shape ``K x n``):
    the categorical code (or the 0/1 filter mask for degree counts) and
    the transformed numeric value (raw value for ordered_asymmetry).
    """

    kinds: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    terms: tuple
    levels: dict
    cat: np.ndarray | None = None
    num: np.ndarray | None = None

    @classmethod
    def bind(cls, model: ModelSpec, levels: dict, numeric_names) -> "CompiledModel":
        numeric_names = set(numeric_names)
        K = len(model.terms)
        kinds = np.zeros(K, np.int64)
        p1 = np.full(K, -1, np.int64)
        p2 = np.full(K, -1, np.int64)
        for k, t in enumerate(model.terms):
            _check_columns(t, levels, numeric_names)
            kinds[k] = KIND_CODES[t.kind]
            if t.kind in ("activity_by_category", "within_category_ties", "between_category_ties",
                          "ordered_asymmetry"):
                p1[k] = _level_code(levels, t.attr, t.levels[0])
                if len(t.levels) > 1:
                    p2[k] = _level_code(levels, t.attr, t.levels[1])
            elif t.kind == "degree_count":
                p1[k] = t.d
                if t.levels:
                    p2[k] = _level_code(levels, t.attr, t.levels[0])
            elif t.kind == "numeric_difference":
                p1[k] = t.power
        return cls(kinds, p1, p2, tuple(model.terms), levels)

    def node_arrays(self, categorical: dict, numeric: dict, n: int):
        """Per-term node arrays for a node set given as column dicts."""
        K = len(self.terms)
        cat = np.zeros((K, n), np.int64)
        num = np.zeros((K, n), np.float64)
        for k, t in enumerate(self.terms):
            if t.kind == "degree_count":
                if t.levels:
                    cat[k] = (np.asarray(categorical[t.attr]) == self.p2[k]).astype(np.int64)
                else:
                    cat[k] = 1
                continue
            if t.kind in ("numeric_activity", "numeric_difference"):
                num[k] = transform_values(t, numeric[t.attr])
                continue
            if t.attr is not None:
                cat[k] = categorical[t.attr]
            if t.kind == "ordered_asymmetry":
                num[k] = numeric[t.numeric_attr]
        return cat, num

    @classmethod
    def for_attrs(cls, model: ModelSpec, attrs: AttributeTable) -> "CompiledModel":
        cm = cls.bind(model, attrs.levels, attrs.numeric.keys())
        cm.cat, cm.num = cm.node_arrays(attrs.categorical, attrs.numeric, attrs.n)
        return cm

    @property
    def markov(self) -> np.ndarray:
        return self.kinds == DEGREE


def pair_values(cm: CompiledModel, cat_a, num_a, cat_b, num_b) -> np.ndarray:
    """Vectorised change statistics of dyad-independent terms.

    ``cat_a`` etc. are ``K x m`` arrays for the two endpoints of ``m``
    dyads (or ego-alter pairs).  Degree-count columns are returned as 0;
    they are not functions of the endpoint attributes alone.
    """
    K = len(cm.kinds)
    m = cat_a.shape[1]
    out = np.zeros((m, K), np.float64)
    for k in range(K):
        kind, l1, l2 = cm.kinds[k], cm.p1[k], cm.p2[k]
        ca, cb, ta, tb = cat_a[k], cat_b[k], num_a[k], num_b[k]
        if kind == EDGE_COUNT:
            v = np.ones(m)
        elif kind == ACTIVITY:
            v = (ca == l1).astype(float) + (cb == l1)
        elif kind == WITHIN:
            v = ((ca == l1) & (cb == l1)).astype(float)
        elif kind == BETWEEN:
            v = (((ca == l1) & (cb == l2)) | ((ca == l2) & (cb == l1))).astype(float)
        elif kind == SAME:
            v = (ca == cb).astype(float)
        elif kind == NUM_ACTIVITY:
            v = ta + tb
        elif kind == NUM_DIFFERENCE:
            v = np.abs(ta - tb)
            if l1 == 2:
                v = v * v
        elif kind == ASYMMETRY:
            v = (((ca == l1) & (cb == l2) & (ta > tb)) | ((cb == l1) & (ca == l2) & (tb > ta))).astype(float)
        else:
            v = np.zeros(m)
        out[:, k] = v
    return out


# --------------------------------------------------------------------------
# Direct evaluation
# --------------------------------------------------------------------------

def _numeric(attrs: AttributeTable, term: TermSpec, name: str) -> np.ndarray:
    if name not in attrs.numeric:
        raise ModelAttributeMismatch(f"{term.label}: no numeric column {name!r}")
    return attrs.numeric[name]


def _codes(attrs: AttributeTable, term: TermSpec) -> np.ndarray:
    if term.attr not in attrs.categorical:
        raise ModelAttributeMismatch(f"{term.label}: no categorical column {term.attr!r}")
    return attrs.categorical[term.attr]


def _code(attrs, term, level):
    try:
        return attrs.code(term.attr, level)
    except (InputError, KeyError) as err:
        raise ModelAttributeMismatch(f"{term.label}: {err}") from None


def term_value(net: Network, attrs: AttributeTable, term: TermSpec) -> float:
    """Value of a single statistic, evaluated from its definition."""
    k = term.kind
    E = net.edge_list()
    if k == "edge_count":
        return float(len(E))
    if k == "degree_count":
        deg = net.degrees()
        keep = np.ones(net.n, bool)
        if term.levels:
            keep = _codes(attrs, term) == _code(attrs, term, term.levels[0])
        return float(np.sum((deg == term.d) & keep))
    if k in ("numeric_activity", "numeric_difference"):
        f = transform_values(term, _numeric(attrs, term, term.attr))
        if k == "numeric_activity":
            return math.fsum(f[i] + f[j] for i, j in E)
        if term.power == 1:
            return math.fsum(abs(f[i] - f[j]) for i, j in E)
        return math.fsum(abs(f[i] - f[j]) * abs(f[i] - f[j]) for i, j in E)
    c = _codes(attrs, term)
    if k == "activity_by_category":
        L = _code(attrs, term, term.levels[0])
        deg = net.degrees()
        return float(deg[c == L].sum())
    if k == "within_category_ties":
        L = _code(attrs, term, term.levels[0])
        return float(sum(1 for i, j in E if c[i] == L and c[j] == L))
    if k == "between_category_ties":
        a, b = (_code(attrs, term, x) for x in term.levels)
        return float(sum(1 for i, j in E if {c[i], c[j]} == {a, b}))
    if k == "same_category_ties":
        return float(sum(1 for i, j in E if c[i] == c[j]))
    if k == "ordered_asymmetry":
        old, young = (_code(attrs, term, x) for x in term.levels)
        t = _numeric(attrs, term, term.numeric_attr)
        count = 0
        for i, j in E:
            if c[i] == old and c[j] == young and t[i] > t[j]:
                count += 1
            elif c[j] == old and c[i] == young and t[j] > t[i]:
                count += 1
        return float(count)
    raise InputError(f"unsupported term {k}")  # pragma: no cover


def global_stats(net: Network, attrs: AttributeTable, model: ModelSpec) -> StatVector:
    """Exact statistic vector ``g(y, x)`` aligned with ``model.terms``."""
    if attrs is not None and attrs.n != net.n and attrs.columns:
        raise ModelAttributeMismatch(f"attributes cover {attrs.n} nodes, network has {net.n}")
    return np.array([term_value(net, attrs, t) for t in model.terms], dtype=np.float64)


def _term_change(net: Network, attrs: AttributeTable, term: TermSpec, i: int, j: int) -> float:
    k = term.kind
    if k == "edge_count":
        return 1.0
    if k == "degree_count":
        # Degrees with the dyad switched off, then compare on vs. off.
        on = net.has_edge(i, j)
        total = 0
        keep_level = _code(attrs, term, term.levels[0]) if term.levels else None
        for v in (i, j):
            if keep_level is not None and _codes(attrs, term)[v] != keep_level:
                continue
            base = net.degree(v) - on
            total += (base + 1 == term.d) - (base == term.d)
        return float(total)
    if k in ("numeric_activity", "numeric_difference"):
        t = _numeric(attrs, term, term.attr)
        fi, fj = transform_values(term, [t[i], t[j]])
        if k == "numeric_activity":
            return float(fi + fj)
        diff = abs(fi - fj)
        return float(diff if term.power == 1 else diff * diff)
    c = _codes(attrs, term)
    ci, cj = c[i], c[j]
    if k == "activity_by_category":
        L = _code(attrs, term, term.levels[0])
        return float(int(ci == L) + int(cj == L))
    if k == "within_category_ties":
        L = _code(attrs, term, term.levels[0])
        return float(ci == L and cj == L)
    if k == "between_category_ties":
        a, b = (_code(attrs, term, x) for x in term.levels)
        return float((ci == a and cj == b) or (ci == b and cj == a))
    if k == "same_category_ties":
        return float(ci == cj)
    if k == "ordered_asymmetry":
        old, young = (_code(attrs, term, x) for x in term.levels)
        t = _numeric(attrs, term, term.numeric_attr)
        return float((ci == old and cj == young and t[i] > t[j]) or (cj == old and ci == young and t[j] > t[i]))
    raise InputError(f"unsupported term {k}")  # pragma: no cover


def change_stats(net: Network, attrs: AttributeTable, model: ModelSpec, i: int, j: int) -> StatVector:
    """``g(y + (i,j)) - g(y - (i,j))`` without recomputing ``g``."""
    net._canon(i, j)
    return np.array([_term_change(net, attrs, t, i, j) for t in model.terms], dtype=np.float64)


def conditional_tie_logodds(net: Network, attrs: AttributeTable, model: ModelSpec, i: int, j: int) -> float:
    """Conditional log-odds of a tie at ``{i, j}`` given the rest of ``net``."""
    delta = change_stats(net, attrs, model, i, j)
    return offset_value(model.offset, net.n) + float(model.require_theta() @ delta)


def conditional_tie_prob(net, attrs, model, i, j) -> float:
    return float(ilogit(conditional_tie_logodds(net, attrs, model, i, j)))
