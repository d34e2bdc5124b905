import json
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from utils.rational import Rational, floor_mul, format_rational, parse_rational


class NoisePattern(BaseModel):
    """
    One adversarial choice for a single channel use: which registers survive
    (S), where each survivor lands (f, strictly increasing), and how many
    registers the adversary adds (q). Positions are 1-based.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(ge=0)
    delta: Rational
    survivors: Tuple[int, ...]
    landing: Tuple[int, ...]
    q: int = Field(ge=0)

    @model_validator(mode="after")
    def _check(self):
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if len(self.landing) != len(self.survivors):
            raise ValueError("landing must give one position per survivor")
        if any(b <= a for a, b in zip(self.survivors, self.survivors[1:])):
            raise ValueError("survivors must be strictly increasing")
        if self.survivors and not (1 <= self.survivors[0] and self.survivors[-1] <= self.n):
            raise ValueError(f"survivors must lie in 1..{self.n}")
        if any(b <= a for a, b in zip(self.landing, self.landing[1:])):
            raise ValueError("landing map must be strictly increasing")
        if self.landing and not (1 <= self.landing[0] and self.landing[-1] <= self.output_length):
            raise ValueError(f"landing positions must lie in 1..{self.output_length}")
        if self.p + self.q > self.budget:
            raise ValueError(f"p + q = {self.p + self.q} exceeds floor(n*delta) = {self.budget}")
        return self

    @property
    def p(self) -> int:
        return self.n - len(self.survivors)

    @property
    def output_length(self) -> int:
        return self.n - self.p + self.q

    @property
    def budget(self) -> int:
        return floor_mul(self.n, self.delta)

    @property
    def padded_length(self) -> int:
        """Channel output length after PAD: n + floor(n*delta)"""
        return self.n + self.budget

    def fill_slots(self) -> List[int]:
        """Output positions (1-based) not in the image of f, in order"""
        image = set(self.landing)
        return [t for t in range(1, self.output_length + 1) if t not in image]

    def deleted(self) -> List[int]:
        kept = set(self.survivors)
        return [i for i in range(1, self.n + 1) if i not in kept]

    def is_identity(self) -> bool:
        return self.p == 0 and self.q == 0

    @classmethod
    def from_slots(cls, n: int, delta: Fraction, survivors: Iterable[int],
                   fill_slots: Iterable[int]) -> "NoisePattern":
        """Build from the survivor set and the output slots the adversary fills"""
        survivors = tuple(sorted(survivors))
        fill = set(fill_slots)
        length = len(survivors) + len(fill)
        landing = tuple(t for t in range(1, length + 1) if t not in fill)
        return cls(n=n, delta=delta, survivors=survivors, landing=landing, q=len(fill))

    @classmethod
    def identity(cls, n: int, delta: Fraction = Fraction(0)) -> "NoisePattern":
        return cls.from_slots(n, delta, range(1, n + 1), ())

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "delta": format_rational(self.delta),
            "survivors": list(self.survivors),
            "landing": [[i, f] for i, f in zip(self.survivors, self.landing)],
            "q": self.q,
        }, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "NoisePattern":
        pairs = sorted((int(i), int(f)) for i, f in data.get("landing", []))
        survivors = tuple(int(i) for i in data.get("survivors", [i for i, _ in pairs]))
        if [i for i, _ in pairs] != list(survivors):
            raise ValueError("landing pairs must cover exactly the survivors")
        landing = tuple(f for _, f in pairs)
        q: Optional[int] = data.get("q")
        if q is None:
            # without q, trailing insertions are invisible; take the tightest reading
            q = (landing[-1] if landing else 0) - len(survivors)
        return cls(n=int(data["n"]), delta=parse_rational(data["delta"]),
                   survivors=survivors, landing=landing, q=int(q))

    @classmethod
    def from_json(cls, text: str) -> "NoisePattern":
        return cls.from_dict(json.loads(text))
