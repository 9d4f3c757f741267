"""Direct halfspace reference for nested-hull classification.

Shares ``polytope_contains`` with the compiler so boundary points land on the
same side; it never evaluates the chain.
"""

from __future__ import annotations

from typing import Sequence

from .errors import NotNested
from .geometry import ClassLabel, Polytope, polytope_contains


def _membership_profile(hulls: Sequence[Polytope], x: Sequence[float]) -> list[bool]:
    if not hulls:
        raise NotNested("hull sequence is empty")
    profile = [polytope_contains(hull, x) for hull in hulls]
    depth = sum(profile)
    if profile != [True] * depth + [False] * (len(profile) - depth):
        raise NotNested(f"membership of {tuple(x)} is not a prefix of the nesting: {profile}")
    return profile


def deepest_region(hulls: Sequence[Polytope], x: Sequence[float]) -> int:
    """Largest k with x in R_k, 0 outside R1."""
    return sum(_membership_profile(hulls, x))


def oracle_classify(hulls: Sequence[Polytope], x: Sequence[float]) -> ClassLabel:
    positive = hulls[0].generator_class if hulls else ClassLabel.POS
    return positive if deepest_region(hulls, x) % 2 == 1 else positive.opposite


def alternating_membership(hulls: Sequence[Polytope], x: Sequence[float]) -> bool:
    """Membership in R1 - (R2 - (R3 - ...)) by recursion over the regions."""
    _membership_profile(hulls, x)

    def member(k: int) -> bool:
        if k == len(hulls):
            return False
        return polytope_contains(hulls[k], x) and not member(k + 1)

    return member(0)
