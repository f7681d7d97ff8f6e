"""Compromise, diffusion, knowledge-gap and credibility functions.

All evaluators accept scalars or numpy arrays and broadcast like ufuncs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit

from .errors import ConfigError

LOGISTIC_CLAMP = 500.0

KERNEL_KINDS = ("unit", "constant", "bounded_confidence", "knowledge_gap", "product")


@dataclass(frozen=True)
class KernelSpec:
    """Tagged description of a compromise kernel with values in [0, 1].

    ``bounded_confidence`` is the indicator of ``|w - w*| < threshold``,
    ``knowledge_gap`` is the logistic ``1 / (1 + exp(a (x - x*)))`` and
    ``product`` multiplies an opinion part by a knowledge part.
    """

    kind: str = "unit"
    threshold: Optional[float] = None
    a: Optional[float] = None
    value: float = 1.0
    opinion_part: Optional["KernelSpec"] = None
    knowledge_part: Optional["KernelSpec"] = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ConfigError(f"kernel.kind: unknown kind {self.kind!r}")
        if self.kind == "bounded_confidence":
            if self.threshold is None or not 0.0 <= self.threshold <= 2.0:
                raise ConfigError("kernel.threshold: must lie in [0, 2]")
        if self.kind == "knowledge_gap":
            if self.a is None or not self.a > 1.0:
                raise ConfigError("kernel.a: must be > 1")
        if self.kind == "constant" and not 0.0 <= self.value <= 1.0:
            raise ConfigError("kernel.value: must lie in [0, 1]")
        if self.kind == "product":
            if self.opinion_part is None or self.knowledge_part is None:
                raise ConfigError("kernel: product needs opinion_part and knowledge_part")
            if self.opinion_part.uses_knowledge:
                raise ConfigError("kernel.opinion_part: may not depend on knowledge")

    @classmethod
    def unit(cls) -> "KernelSpec":
        return cls("unit")

    @classmethod
    def constant(cls, value: float) -> "KernelSpec":
        return cls("constant", value=float(value))

    @classmethod
    def bounded_confidence(cls, threshold: float) -> "KernelSpec":
        return cls("bounded_confidence", threshold=float(threshold))

    @classmethod
    def knowledge_gap(cls, a: float) -> "KernelSpec":
        return cls("knowledge_gap", a=float(a))

    @classmethod
    def product(cls, opinion_part: "KernelSpec", knowledge_part: "KernelSpec") -> "KernelSpec":
        return cls("product", opinion_part=opinion_part, knowledge_part=knowledge_part)

    @property
    def uses_knowledge(self) -> bool:
        if self.kind == "knowledge_gap":
            return True
        if self.kind == "product":
            return self.knowledge_part.uses_knowledge
        return False

    @property
    def is_symmetric(self) -> bool:
        """True when H(w, w*) = H(w*, w) for every pair of opinions."""
        return not self.uses_knowledge

    @property
    def opinion(self) -> "KernelSpec":
        """The opinion-only factor H of this kernel."""
        if self.kind == "product":
            return self.opinion_part
        if self.kind == "knowledge_gap":
            return KernelSpec.unit()
        return self

    @property
    def gap_sharpness(self) -> Optional[float]:
        if self.kind == "knowledge_gap":
            return self.a
        if self.kind == "product":
            return self.knowledge_part.gap_sharpness
        return None

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "bounded_confidence":
            d["threshold"] = self.threshold
        elif self.kind == "knowledge_gap":
            d["a"] = self.a
        elif self.kind == "constant":
            d["value"] = self.value
        elif self.kind == "product":
            d["opinion_part"] = self.opinion_part.to_dict()
            d["knowledge_part"] = self.knowledge_part.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        d = dict(d)
        kind = d.pop("kind", "unit")
        if kind == "product":
            return cls.product(cls.from_dict(d["opinion_part"]), cls.from_dict(d["knowledge_part"]))
        known = {"threshold", "a", "value"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"kernel: unexpected keys {sorted(extra)}")
        return cls(kind, **d)


@dataclass(frozen=True)
class CredibilitySpec:
    """Credibility Psi(d) = (varsigma + d)**(-gamma) of a leader group.

    ``anchor`` is the group's initial mean opinion and ``a`` the sharpness of
    the logistic that compares follower knowledge against credibility.
    """

    varsigma: float
    gamma: float
    anchor: float = 0.0
    a: float = 50.0

    def __post_init__(self):
        if not self.varsigma > 0:
            raise ConfigError("credibility.varsigma: must be > 0")
        if not self.gamma > 0:
            raise ConfigError("credibility.gamma: must be > 0")
        if not -1.0 <= self.anchor <= 1.0:
            raise ConfigError("credibility.anchor: must lie in [-1, 1]")
        if not self.a > 1.0:
            raise ConfigError("credibility.a: must be > 1")


@dataclass(frozen=True)
class DiffusionSpec:
    """Local diffusion D(w) on [-1, 1]; quadratic cap is 1 - w**2."""

    kind: str = "quadratic_cap"
    nodes: tuple = field(default=())
    values: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("quadratic_cap", "tabulated"):
            raise ConfigError(f"diffusion.kind: unknown kind {self.kind!r}")
        if self.kind == "tabulated":
            nodes = np.asarray(self.nodes, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 2:
                raise ConfigError("diffusion: nodes and values must be equal-length 1-D sequences")
            if nodes[0] > -1.0 or nodes[-1] < 1.0 or np.any(np.diff(nodes) <= 0):
                raise ConfigError("diffusion.nodes: must be increasing and cover [-1, 1]")
            if np.any(values < 0) or np.any(values > 1):
                raise ConfigError("diffusion.values: must lie in [0, 1]")

    @classmethod
    def tabulated(cls, nodes, values) -> "DiffusionSpec":
        return cls("tabulated", tuple(float(v) for v in nodes), tuple(float(v) for v in values))

    def to_dict(self) -> dict:
        if self.kind == "tabulated":
            return {"kind": self.kind, "nodes": list(self.nodes), "values": list(self.values)}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "DiffusionSpec":
        if d.get("kind", "quadratic_cap") == "tabulated":
            return cls.tabulated(d["nodes"], d["values"])
        return cls(d.get("kind", "quadratic_cap"))


def eval_K(x, x_star, a):
    """Knowledge-gap propensity 1 / (1 + exp(a (x - x*)))."""
    t = np.clip(a * (np.asarray(x, dtype=float) - x_star), -LOGISTIC_CLAMP, LOGISTIC_CLAMP)
    return expit(-t)


def _eval_opinion(w, w_star, spec: KernelSpec):
    w = np.asarray(w, dtype=float)
    if spec.kind == "unit":
        return np.ones(np.broadcast(w, w_star).shape)
    if spec.kind == "constant":
        return np.full(np.broadcast(w, w_star).shape, spec.value)
    if spec.kind == "bounded_confidence":
        return (np.abs(w - w_star) < spec.threshold).astype(float)
    raise ValueError(f"{spec.kind} is not an opinion kernel")


def eval_P(w, w_star, x=None, x_star=None, spec: KernelSpec = KernelSpec()):
    """Compromise propensity P = H(w, w*) K(x, x*).

    With ``x`` or ``x_star`` set to None (homogeneous mode) only the opinion
    factor H is returned.
    """
    if spec.kind in ("unit", "constant", "bounded_confidence"):
        return _eval_opinion(w, w_star, spec)
    h = _eval_opinion(w, w_star, spec.opinion)
    if x is None or x_star is None:
        return h
    return h * eval_K(x, x_star, spec.gap_sharpness)


def credibility(distance, varsigma: float, gamma: float):
    """Psi(d) = (varsigma + d)**(-gamma)."""
    return (varsigma + np.asarray(distance, dtype=float)) ** (-gamma)


def eval_R(w, v, x=None, cred: Optional[CredibilitySpec] = None,
           opinion_part: KernelSpec = KernelSpec()):
    """Follower-leader propensity H(w, v) K(x, Psi(|v - m_L(0)|)).

    Without a credibility spec or knowledge coordinate this is H(w, v).
    """
    h = _eval_opinion(w, v, opinion_part)
    if cred is None or x is None:
        return h
    psi = credibility(np.abs(np.asarray(v, dtype=float) - cred.anchor), cred.varsigma, cred.gamma)
    return h * eval_K(x, psi, cred.a)


def eval_D(w, spec: DiffusionSpec = DiffusionSpec()):
    w = np.asarray(w, dtype=float)
    if spec.kind == "quadratic_cap":
        return 1.0 - w * w
    return np.interp(w, spec.nodes, spec.values)


def admissible_noise_bounds(spec: DiffusionSpec, alpha: float, control_bound: float = 0.0,
                            rule: str = "follower", grid: int = 20001) -> tuple:
    """Noise interval for which a binary rule maps [-1, 1] into itself.

    ``rule`` is ``"follower"``, ``"follower_leader"`` or ``"leader"``;
    ``control_bound`` bounds ``|2 alpha sum(u)|`` and only enters the leader
    rule.  Raises ConfigError when the interval is empty.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha: must lie in (0, 1)")
    if rule not in ("follower", "follower_leader", "leader"):
        raise ValueError(f"unknown rule {rule!r}")
    shift = abs(control_bound) if rule == "leader" else 0.0

    if spec.kind == "quadratic_cap":
        if shift > 0.0:
            # D vanishes at +-1 where the control alone can leave the domain
            raise ConfigError("noise support incompatible with bound preservation")
        # min over w of (1 -+ w) / (1 - w**2) = min 1 / (1 +- w) = 1/2
        half = 0.5 * (1.0 - alpha)
        return (-half, half)

    w = np.union1d(np.linspace(-1.0, 1.0, grid), np.asarray(spec.nodes))
    d = eval_D(w, spec)
    room_up = (1.0 - alpha) * (1.0 - w) - shift
    room_down = (1.0 - alpha) * (1.0 + w) - shift
    flat = d <= 0.0
    if np.any(room_up[flat] < 0.0) or np.any(room_down[flat] < 0.0):
        raise ConfigError("noise support incompatible with bound preservation")
    if np.all(flat):
        return (-np.inf, np.inf)
    hi = float(np.min(room_up[~flat] / d[~flat]))
    lo = float(-np.min(room_down[~flat] / d[~flat]))
    if lo > hi:
        raise ConfigError("noise support incompatible with bound preservation")
    return (lo, hi)
