"""Family tags, parameter vectors and link metadata."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from ..errors import DomainError

TAU_CAP = 100.0


class Family(str, Enum):
    """The continuous four-parameter families plus the normal benchmark."""

    NORMAL = "NORMAL"
    JSU = "JSU"
    JSUO = "JSUO"
    SEP1 = "SEP1"
    SEP2 = "SEP2"
    ST1 = "ST1"
    ST2 = "ST2"
    ST5 = "ST5"

    @classmethod
    def from_string(cls, name: str) -> "Family":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise DomainError(f"unknown family tag {name!r}") from None


# Canonical ordering used for deterministic tie-breaking: the seven
# four-parameter families in table order, with the two-parameter normal
# benchmark appended last.
FAMILY_ORDER: tuple[Family, ...] = (
    Family.JSU,
    Family.JSUO,
    Family.SEP1,
    Family.SEP2,
    Family.ST1,
    Family.ST2,
    Family.ST5,
    Family.NORMAL,
)

# Link tags per distribution parameter k = 1..4 (mu, sigma, nu, tau).
LINKS: dict[Family, tuple[str, ...]] = {
    fam: ("identity", "log", "identity", "log") for fam in Family
}
LINKS[Family.NORMAL] = ("identity", "log")


def n_params(family: Family) -> int:
    """Number of modelled distribution parameters (2 for normal, else 4)."""
    return 2 if family is Family.NORMAL else 4


@dataclass(frozen=True)
class ParamVector:
    """One day's latent moments (mu, sigma, nu, tau) of a spread density.

    sigma and tau must be strictly positive.  For the normal family the
    nu/tau slots are inert and conventionally set to (0, 1).
    """

    mu: float
    sigma: float
    nu: float = 0.0
    tau: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mu", "sigma", "nu", "tau"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if self.sigma <= 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if self.tau <= 0:
            raise DomainError(f"tau must be > 0, got {self.tau}")

    def capped(self) -> "ParamVector":
        """Copy with tau capped at 100 (applied before expected values)."""
        if self.tau <= TAU_CAP:
            return self
        return ParamVector(self.mu, self.sigma, self.nu, TAU_CAP)


@dataclass(frozen=True)
class St5Shape:
    """Shape pair (a, b) of the two-shape skew-t, solved from (nu, tau).

    ``converged`` is False when the bracket held no sign change; in that
    case b is returned as 0 and downstream expected values fall back to 0.
    """

    a: float
    b: float
    converged: bool = True
