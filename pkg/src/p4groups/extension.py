"""Cyclic extensions of the abelian kernels.

An extension type is a quadruple: kernel profile, cyclic quotient order n, an
automorphism tau of the kernel with tau^n = identity, and an element v of the
kernel fixed by tau.  Such a type determines a group on pairs (x, a^i) with

    (x, a^i) * (y, a^j) = (x + tau^i(y) + floor((i+j)/n) * v, a^((i+j) mod n))

written additively in the kernel.  This floor form of the product is the
single source of truth here; the build routine materializes the full Cayley
table from it.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .groups import FiniteGroup
from .residues import (
    AbelianElement,
    MixedModulusMatrix,
    ModulusProfile,
    mat_apply,
    mat_inverse,
    mat_mul,
    mat_order,
    mat_pow,
    norm_matrix,
)

DIAG_NOT_AUTOMORPHISM = "not-an-automorphism"
DIAG_TAU_POWER = "tau-power-not-identity"
DIAG_V_NOT_FIXED = "v-not-fixed"


@dataclass(frozen=True)
class ExtensionType:
    """Kernel profile, quotient order n, automorphism tau, and fixed element v."""

    profile: ModulusProfile
    n: int
    tau: MixedModulusMatrix
    v: AbelianElement

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("quotient order n must be positive")
        if self.tau.profile != self.profile or self.v.profile != self.profile:
            raise ValueError("profile mismatch between tau, v, and the type")

    @property
    def group_order(self) -> int:
        return self.profile.order * self.n

    def to_json_dict(self) -> dict:
        return {
            "p": self.profile.p,
            "shape": self.profile.shape,
            "n": self.n,
            "tau": self.tau.to_json_list(),
            "v": self.v.to_json_list(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExtensionType":
        try:
            profile = ModulusProfile(int(data["p"]), str(data["shape"]))
            n = int(data["n"])
            tau = MixedModulusMatrix(tuple(tuple(row) for row in data["tau"]), profile)
            v = AbelianElement(tuple(data["v"]), profile)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed extension type record: {exc}") from exc
        return cls(profile, n, tau, v)


@dataclass(frozen=True)
class ExtElement:
    """Pair (x, a^i) with x in the kernel and 0 <= i < n."""

    x: AbelianElement
    i: int

    def label(self) -> str:
        return "(" + ",".join(map(str, self.x.coords)) + f"|a^{self.i})"


def validate_type(t: ExtensionType) -> Optional[str]:
    """None when valid, else a diagnostic naming the failed condition."""
    if not t.tau.is_automorphism:
        return DIAG_NOT_AUTOMORPHISM
    if mat_pow(t.tau, t.n) != MixedModulusMatrix.identity(t.profile):
        return DIAG_TAU_POWER
    if mat_apply(t.tau, t.v) != t.v:
        return DIAG_V_NOT_FIXED
    return None


def require_valid(t: ExtensionType) -> None:
    diag = validate_type(t)
    if diag is not None:
        raise ValueError(f"invalid extension type: {diag}")


@lru_cache(maxsize=8192)
def _tau_power(tau: MixedModulusMatrix, i: int) -> MixedModulusMatrix:
    return mat_pow(tau, i)


def identity_element(t: ExtensionType) -> ExtElement:
    return ExtElement(t.profile.zero(), 0)


def multiply(t: ExtensionType, g: ExtElement, h: ExtElement) -> ExtElement:
    if g.x.profile != t.profile or h.x.profile != t.profile:
        raise ValueError("profile mismatch")
    if not (0 <= g.i < t.n and 0 <= h.i < t.n):
        raise ValueError("coset exponent out of range")
    wraps = (g.i + h.i) // t.n
    x = g.x + mat_apply(_tau_power(t.tau, g.i), h.x)
    if wraps:
        x = x + t.v.scale(wraps)
    return ExtElement(x, (g.i + h.i) % t.n)


def ext_inverse(t: ExtensionType, g: ExtElement) -> ExtElement:
    if g.i == 0:
        return ExtElement(-g.x, 0)
    k = t.n - g.i
    return ExtElement(mat_apply(_tau_power(t.tau, k), -(t.v + g.x)), k)


def ext_power(t: ExtensionType, g: ExtElement, k: int) -> ExtElement:
    result = identity_element(t)
    for _ in range(k):
        result = multiply(t, result, g)
    return result


def norm_apply(t: ExtensionType, x: AbelianElement) -> AbelianElement:
    """x + tau(x) + ... + tau^(n-1)(x); inside the built group,
    (x, a)^n = (norm(x) + v, a^0)."""
    return mat_apply(norm_matrix(t.tau, t.n), x)


def element_index(t: ExtensionType, g: ExtElement) -> int:
    return g.i * t.profile.order + g.x.rank()


def build_group(t: ExtensionType) -> FiniteGroup:
    """Materialize the group of order |kernel| * n on pairs (x, a^i).

    Element indices are ordered lexicographically by (i, coordinates of x);
    the table is filled from precomputed kernel-addition and tau-image lookup
    tables so construction stays fast for the sizes this project handles.
    """
    require_valid(t)
    profile = t.profile
    n = t.n
    nsize = profile.order
    size = nsize * n
    elements = list(profile.elements())

    add = [[0] * nsize for _ in range(nsize)]
    for rx, ex in enumerate(elements):
        row = add[rx]
        for ry, ey in enumerate(elements):
            row[ry] = (ex + ey).rank()

    tau_img: list[list[int]] = []
    power = MixedModulusMatrix.identity(profile)
    for _ in range(n):
        tau_img.append([mat_apply(power, e).rank() for e in elements])
        power = mat_mul(power, t.tau)

    vr = t.v.rank()
    addv = [add[z][vr] for z in range(nsize)]

    table = array("i", bytes(4 * size * size))
    for i in range(n):
        ti = tau_img[i]
        for j in range(n):
            wrap = i + j >= n
            kbase = ((i + j) % n) * nsize
            for rx in range(nsize):
                arow = add[rx]
                base = (i * nsize + rx) * size + j * nsize
                if wrap:
                    for ry in range(nsize):
                        table[base + ry] = kbase + addv[arow[ti[ry]]]
                else:
                    for ry in range(nsize):
                        table[base + ry] = kbase + arow[ti[ry]]

    payloads = [ExtElement(x, i) for i in range(n) for x in elements]
    labels = [g.label() for g in payloads]
    name = f"ext(p={profile.p},{profile.shape},n={n})"
    return FiniteGroup(table, size, identity_index=0, labels=labels,
                       payloads=payloads, name=name)


# ---------------------------------------------------------------------------
# Transformations that preserve the isomorphism class of the built group.


def shift_generator(t: ExtensionType, x: AbelianElement) -> ExtensionType:
    """Replace the coset representative a by x*a: v becomes norm(x) + v."""
    require_valid(t)
    if x.profile != t.profile:
        raise ValueError("profile mismatch")
    result = ExtensionType(t.profile, t.n, t.tau, norm_apply(t, x) + t.v)
    require_valid(result)
    return result


def power_substitute(t: ExtensionType, i: int) -> ExtensionType:
    """Replace a by a^i for i prime to n: (tau, v) becomes (tau^i, i*v)."""
    require_valid(t)
    if math.gcd(i, t.n) != 1:
        raise ValueError(f"exponent {i} is not prime to n={t.n}")
    k = i % mat_order(t.tau)
    result = ExtensionType(t.profile, t.n, mat_pow(t.tau, k), t.v.scale(i))
    require_valid(result)
    return result


def v_power(t: ExtensionType, i: int) -> ExtensionType:
    """Replace v by i*v for i prime to |kernel|; conjugation by y -> i*y."""
    require_valid(t)
    if math.gcd(i, t.profile.order) != 1:
        raise ValueError(f"exponent {i} is not prime to the kernel order")
    result = ExtensionType(t.profile, t.n, t.tau, t.v.scale(i))
    require_valid(result)
    return result


def conjugate_type(t: ExtensionType, phi: MixedModulusMatrix) -> ExtensionType:
    """Transport the type along an automorphism phi: (phi tau phi^-1, phi(v))."""
    require_valid(t)
    if phi.profile != t.profile:
        raise ValueError("profile mismatch")
    if not phi.is_automorphism:
        raise ValueError("phi is not an automorphism")
    new_tau = mat_mul(mat_mul(phi, t.tau), mat_inverse(phi))
    result = ExtensionType(t.profile, t.n, new_tau, mat_apply(phi, t.v))
    require_valid(result)
    return result
