"""Synthetic sexual-partnership populations.

Stand-in for survey data that cannot be redistributed: node attributes
are drawn from a sex/race/age composition, target statistics are set
from degree distributions and mixing rates, and a network is simulated
from a model fitted to those targets.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import terms as T
from .errors import DegeneracyError, InputError, SeparationError
from .network import AttributeTable, Network
from .sampler import GibbsChain

log = logging.getLogger(__name__)


def _default_age_groups():
    return [[18, 19, 0.042], [20, 29, 0.276], [30, 39, 0.288], [40, 49, 0.242], [50, 59, 0.151]]


@dataclass
class SynthSpec:
    """Composition, degree and mixing targets for a synthetic population.

    ``degree`` gives each sex's distribution over 0, 1, 2, ... partners.
    ``race_ends`` is the share of tie ends held by each race and
    ``race_within`` the share of ties joining two actors of that race.
    ``mean_age_gap`` is the mean absolute age difference over ties in
    years; ``male_older`` the share of mixed-sex ties where the man is
    strictly older.
    """

    sex: dict = field(default_factory=lambda: {"F": 0.506, "M": 0.494})
    race: dict = field(default_factory=lambda: {"B": 0.119, "H": 0.092, "O": 0.039, "W": 0.750})
    age_groups: list = field(default_factory=_default_age_groups)
    degree: dict = field(default_factory=lambda: {"F": [0.296, 0.690, 0.014],
                                                  "M": [0.243, 0.710, 0.045, 0.002, 0.001]})
    same_sex: float = 0.014
    race_ends: dict = field(default_factory=lambda: {"B": 0.162, "H": 0.097, "O": 0.033, "W": 0.708})
    race_within: dict = field(default_factory=lambda: {"B": 0.152, "H": 0.060, "O": 0.025, "W": 0.676})
    mean_age_gap: float = 4.0
    male_older: float = 0.65
    age_lo: float = 18.0
    age_hi: float = 60.0

    def __post_init__(self):
        if set(self.sex) != {"F", "M"} or set(self.degree) != {"F", "M"}:
            raise InputError("sex and degree must be keyed by F and M")
        if set(self.race_ends) != set(self.race) or set(self.race_within) != set(self.race):
            raise InputError("race_ends and race_within must cover the race levels")
        for name in ("same_sex", "male_older"):
            if not 0 <= getattr(self, name) <= 1:
                raise InputError(f"{name} must be a fraction")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def mean_degree(self) -> float:
        return sum(p * _mean(self.degree[s]) for s, p in _norm(self.sex).items())


def _norm(d: dict) -> dict:
    tot = sum(d.values())
    return {k: v / tot for k, v in d.items()}


def _mean(pmf) -> float:
    pmf = np.asarray(pmf, dtype=np.float64)
    return float(np.arange(pmf.size) @ pmf / pmf.sum())


def synth_model(spec: SynthSpec) -> T.ModelSpec:
    races = list(spec.race)
    base = races[0]
    terms = [
        T.activity("sex", "F", name="activity.F"),
        T.activity("sex", "M", name="activity.M"),
        T.same("sex", name="same_sex"),
        T.degree(1, "sex", "F", name="monogamy.F"),
        T.degree(1, "sex", "M", name="monogamy.M"),
    ]
    terms += [T.activity("race", r, name=f"activity.{r}") for r in races if r != base]
    terms += [T.within("race", r, name=f"homophily.{r}") for r in races]
    terms += [
        T.numeric_difference("age", "scaled", 1, spec.age_lo, spec.age_hi, name="agediff"),
        T.ordered_asymmetry("sex", "M", "F", "age", name="age_sex_asymmetry"),
    ]
    return T.ModelSpec(terms, offset=T.OffsetSpec("log_inverse_n"))


def synth_attributes(spec: SynthSpec, n: int, rng) -> AttributeTable:
    sex_lv, race_lv = list(spec.sex), list(spec.race)
    sex = rng.choice(len(sex_lv), size=n, p=np.array(list(_norm(spec.sex).values())))
    race = rng.choice(len(race_lv), size=n, p=np.array(list(_norm(spec.race).values())))
    groups = np.asarray(spec.age_groups, dtype=np.float64)
    g = rng.choice(len(groups), size=n, p=groups[:, 2] / groups[:, 2].sum())
    age = rng.integers(groups[g, 0].astype(int), groups[g, 1].astype(int) + 1).astype(np.float64)
    return AttributeTable(n, {"sex": sex, "race": race}, {"sex": sex_lv, "race": race_lv}, {"age": age})


def synth_targets(spec: SynthSpec, attrs: AttributeTable, model: T.ModelSpec) -> np.ndarray:
    """Mean-value targets for ``synth_model(spec)`` at the realised composition.

    Tie counts come from the two sexes' degree reports averaged, as in
    an egocentric census.  Same-sex ties are split evenly between the
    sexes, which makes the two sex-activity targets equal.
    """
    n_sex = {lab: float(np.sum(attrs.categorical["sex"] == c)) for c, lab in enumerate(attrs.levels["sex"])}
    ties = 0.5 * sum(n_sex[s] * _mean(spec.degree[s]) for s in n_sex)
    out = []
    for t in model.terms:
        if t.name in ("activity.F", "activity.M"):
            out.append(ties)
        elif t.name == "same_sex":
            out.append(spec.same_sex * ties)
        elif t.kind == "degree_count":
            pmf = np.asarray(spec.degree[t.levels[0]], dtype=np.float64)
            out.append(n_sex[t.levels[0]] * pmf[1] / pmf.sum())
        elif t.kind == "activity_by_category":
            out.append(2 * ties * spec.race_ends[t.levels[0]])
        elif t.kind == "within_category_ties":
            out.append(ties * spec.race_within[t.levels[0]])
        elif t.name == "agediff":
            out.append(ties * spec.mean_age_gap / (spec.age_hi - spec.age_lo))
        elif t.name == "age_sex_asymmetry":
            out.append(ties * (1 - spec.same_sex) * spec.male_older)
        else:
            raise InputError(f"no synthetic target for {t.label}")
    return np.array(out)


def stub_matching(attrs: AttributeTable, spec: SynthSpec, rng) -> Network:
    """Greedy fallback: draw degrees, then pair stubs across sexes first."""
    n = attrs.n
    sex = attrs.categorical["sex"]
    lv = attrs.levels["sex"]
    deg = np.zeros(n, np.int64)
    for c, lab in enumerate(lv):
        pmf = np.asarray(spec.degree[lab], dtype=np.float64)
        idx = np.flatnonzero(sex == c)
        deg[idx] = rng.choice(pmf.size, size=idx.size, p=pmf / pmf.sum())
    net = Network(n)
    stubs = [np.repeat(np.flatnonzero(sex == c), deg[sex == c]) for c in range(len(lv))]
    for s in stubs:
        rng.shuffle(s)
    a, b = list(stubs[0]), list(stubs[1]) if len(stubs) > 1 else []
    while a and b:
        i, j = int(a.pop()), int(b.pop())
        if not net.has_edge(i, j):
            net.toggle(i, j)
    rest = a or b
    while len(rest) >= 2:
        i, j = int(rest.pop()), int(rest.pop())
        if i != j and not net.has_edge(i, j):
            net.toggle(i, j)
    return net


def synth_population(spec: SynthSpec, n: int, seed=0, attrs: AttributeTable | None = None,
                     fit_config=None, burn_in: float = 20.0) -> tuple[Network, AttributeTable]:
    """Draw attributes, fit the synthetic model to its targets, simulate a network.

    Targets on the boundary of what the node set can realise (tiny
    ``n``, zero rates) cannot be fitted; the network is then built by
    stub matching and a warning is logged.
    """
    from .fit import FitConfig, fit_mean_value

    if n < 2:
        raise InputError("a population needs at least 2 actors")
    attr_seed, fit_seed, sim_seed = np.random.SeedSequence(seed).spawn(3)
    rng = np.random.default_rng(attr_seed)
    attrs = attrs if attrs is not None else synth_attributes(spec, n, rng)
    if attrs.n != n:
        raise InputError(f"attributes cover {attrs.n} actors, n={n}")
    model = synth_model(spec)
    targets = synth_targets(spec, attrs, model)
    cfg = fit_config or FitConfig(seed=int(fit_seed.generate_state(1)[0]))
    try:
        res = fit_mean_value(targets, attrs, model, cfg)
    except (DegeneracyError, SeparationError) as err:
        log.warning("synthetic targets not fittable (%s); using stub matching", err)
        return stub_matching(attrs, spec, rng), attrs
    if not res.converged:
        log.warning("synthetic model fit did not converge; simulating at the last estimate")
    chain = GibbsChain(attrs, model, n=n, seed=sim_seed, theta=res.theta_hat)
    chain.run(int(burn_in * chain.dyads))
    return chain.network(), attrs
