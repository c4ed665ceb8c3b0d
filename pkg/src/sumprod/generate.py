"""Deterministic instance generation and experiment configs."""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .exact import ExactSet
from .field import FpSet, PrimeCtx

SIZE_CAP = 5000


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Command id, input sets or generator specs, parameters, seed and output path.

    ``sets`` maps names (``A``, ``B``, ...) to generator descriptors.
    """

    command: str
    sets: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict) or "command" not in obj:
            raise ConfigError("config must be an object with a 'command' key")
        unknown = set(obj) - {"command", "sets", "params", "seed", "out"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            command=str(obj["command"]),
            sets=dict(obj.get("sets", {})),
            params=dict(obj.get("params", {})),
            seed=int(obj.get("seed", 0)),
            out=obj.get("out"),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def _size(spec: dict, key: str = "n", cap: int = SIZE_CAP) -> int:
    if key not in spec:
        raise ConfigError(f"generator {spec.get('kind')!r} needs {key!r}")
    n = int(spec[key])
    if n < 0:
        raise ConfigError(f"{key} must be >= 0")
    if n > cap:
        raise ConfigError(f"requested size {n} exceeds the cap {cap}")
    return n


def random_rationals(size: int, rng: random.Random, lo: int = -100, hi: int = 100, max_den: int = 1) -> ExactSet:
    """``size`` distinct rationals ``a/q`` with ``lo <= a <= hi``, ``1 <= q <= max_den``."""
    if max_den == 1:
        if hi - lo + 1 < size:
            raise ConfigError("range too small for the requested size")
        return ExactSet(rng.sample(range(lo, hi + 1), size))
    span = (hi - lo) * max_den
    if span < 4 * size:
        raise ConfigError("range too small for the requested size")
    seen: set = set()
    while len(seen) < size:
        q = rng.randint(1, max_den)
        seen.add(Fraction(rng.randint(lo * q, hi * q), q))
    return ExactSet(seen)


def generate(spec, seed: int = 0, cap: int = SIZE_CAP):
    """Build a set from a descriptor; a ``p`` key selects F_p.

    kinds: ``ap`` (n, start, step), ``geometric`` (n, base: {base, ..., base^n}),
    ``convex-squares`` (n: {1, 4, ..., n^2}), ``random`` (size, lo, hi,
    max_den; its own ``seed`` overrides the run seed), ``file`` (path to a JSON
    set), ``literal`` (elements).  A bare list is a literal.
    """
    if isinstance(spec, list):
        spec = {"kind": "literal", "elements": spec}
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"bad generator descriptor {spec!r}")
    kind = spec["kind"]
    p = spec.get("p")
    if kind == "ap":
        n = _size(spec, cap=cap)
        start, step = Fraction(spec.get("start", 0)), Fraction(spec.get("step", 1))
        vals = [start + i * step for i in range(n)]
    elif kind == "geometric":
        n = _size(spec, cap=cap)
        base = int(spec.get("base", 2))
        vals = [base**i for i in range(1, n + 1)]
    elif kind == "convex-squares":
        n = _size(spec, cap=cap)
        vals = [i * i for i in range(1, n + 1)]
    elif kind == "random":
        n = _size(spec, "size", cap)
        rng = random.Random(spec.get("seed", seed))
        if p is not None:
            ctx = PrimeCtx.of(int(p))
            if n > ctx.p:
                raise ConfigError("size exceeds p")
            return FpSet(ctx, rng.sample(range(ctx.p), n))
        return random_rationals(n, rng, int(spec.get("lo", -100)), int(spec.get("hi", 100)), int(spec.get("max_den", 1)))
    elif kind == "file":
        data = json.loads(Path(spec["path"]).read_text())
        return generate(data if isinstance(data, list) else {"kind": "literal", **data}, seed, cap)
    elif kind == "literal":
        vals = spec.get("elements", [])
        if len(vals) > cap:
            raise ConfigError(f"literal set of size {len(vals)} exceeds the cap {cap}")
        if p is None:
            return ExactSet.from_json(vals)
        vals = [int(v) for v in vals]
    else:
        raise ConfigError(f"unknown generator kind {kind!r}")
    if p is not None:
        ctx = PrimeCtx.of(int(p))
        if any(Fraction(v).denominator != 1 for v in vals):
            raise ConfigError("F_p sets need integer elements")
        return FpSet(ctx, (int(v) for v in vals))
    return ExactSet(vals)
