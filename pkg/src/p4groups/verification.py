"""Deterministic property suite behind the ``verify`` CLI command.

Each check returns its name, a pass flag, and on failure a minimal
reproducing datum.  Exhaustive tiers run at p = 3; larger primes fall back to
full identity/inverse checks plus seeded random associativity triples.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass

from .classify import (
    ClassificationError,
    ClassifyConfig,
    candidate_types,
    census_closed_form,
    classify_p4,
    emit_table2,
    tau_catalog,
    verify_prop_abelian_subgroup,
    verify_prop_no_cyclic,
)
from .extension import (
    ExtElement,
    ExtensionType,
    build_group,
    conjugate_type,
    ext_power,
    norm_apply,
    power_substitute,
    shift_generator,
    v_power,
    validate_type,
)
from .groups import isomorphic, verify_group_axioms
from .residues import MixedModulusMatrix, mat_order

ASSOCIATIVITY_SAMPLES = 100_000


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def _oracle_check_pairs(cfg: ClassifyConfig) -> dict[str, ExtensionType]:
    p = cfg.p
    mixed = cfg.mixed_profile
    zero = mixed.zero()
    e2 = mixed.element((0, 1))
    scaling = MixedModulusMatrix(((1 + p, 0), (0, 1)), mixed)
    shear = MixedModulusMatrix(((1, 0), (1, 1)), mixed)
    twist = MixedModulusMatrix(((1, p), (1, 1)), mixed)
    twist_eps = MixedModulusMatrix(((1, cfg.epsilon * p), (1, 1)), mixed)
    return {
        "scaling-v-e2": ExtensionType(mixed, p, scaling, e2),
        "shear-v-e2": ExtensionType(mixed, p, shear, e2),
        "scaling-v0": ExtensionType(mixed, p, scaling, zero),
        "shear-v0": ExtensionType(mixed, p, shear, zero),
        "twist-v0": ExtensionType(mixed, p, twist, zero),
        "twist-eps-v0": ExtensionType(mixed, p, twist_eps, zero),
    }


def run_verification_suite(cfg: ClassifyConfig, seed: int = 0) -> list[CheckResult]:
    results: list[CheckResult] = []
    p = cfg.p
    exhaustive = p == 3

    catalog = tau_catalog(cfg)
    bad = [name for name, tau in catalog if mat_order(tau) != p]
    results.append(CheckResult(
        "tau-catalog-order",
        not bad,
        "" if not bad else f"catalog entries of wrong order: {bad}",
    ))

    cands = candidate_types(cfg)
    invalid = [(c.label, validate_type(c.ext)) for c in cands if validate_type(c.ext)]
    results.append(CheckResult(
        "candidate-validation",
        not invalid,
        "" if not invalid else f"invalid candidates: {invalid}",
    ))

    groups = {c.label: build_group(c.ext) for c in cands}

    failure = ""
    for label, group in groups.items():
        samples = None if exhaustive else ASSOCIATIVITY_SAMPLES
        report = verify_group_axioms(group, associativity_samples=samples,
                                     seed=seed ^ zlib.crc32(label.encode()))
        if not report.ok:
            failure = f"{label}: {report.failure}"
            break
    results.append(CheckResult("group-axioms", not failure, failure))

    failure = ""
    for c in cands:
        t = c.ext
        a1 = ExtElement(t.profile.zero(), 1)
        for x in t.profile.elements():
            lhs = ext_power(t, ExtElement(x, 1), t.n)
            rhs = ExtElement(norm_apply(t, x) + t.v, 0)
            if lhs != rhs:
                failure = f"{c.label}: x={x.coords}"
                break
        if failure:
            break
    results.append(CheckResult("power-norm-law", not failure, failure))

    failure = ""
    for c in cands:
        closed = census_closed_form(c.ext)
        group = groups[c.label]
        e = group.identity_index
        brute = sum(1 for i in range(group.size) if group.power(i, p) == e)
        if closed != brute:
            failure = f"{c.label}: closed={closed} brute={brute}"
            break
    results.append(CheckResult("census-closed-form", not failure, failure))

    failure = ""
    nsize = p ** 3
    for c in cands:
        group = groups[c.label]
        e = group.identity_index
        per_coset = [
            sum(1 for r in range(nsize) if group.power(i * nsize + r, p) == e)
            for i in range(p)
        ]
        if len(set(per_coset[1:])) > 1:
            failure = f"{c.label}: per-coset counts {per_coset}"
            break
    results.append(CheckResult("coset-census-balance", not failure, failure))

    try:
        emit_table2(cfg)
        results.append(CheckResult("table2-reverification", True))
    except ClassificationError as exc:
        results.append(CheckResult("table2-reverification", False, str(exc)))

    classification = None
    try:
        classification = classify_p4(cfg)
        ok = (classification.abelian_count, classification.nonabelian_count) == (5, 10)
        results.append(CheckResult(
            "classification-counts",
            ok,
            "" if ok else f"counts: {classification.abelian_count} abelian, "
                          f"{classification.nonabelian_count} nonabelian",
        ))
    except ClassificationError as exc:
        results.append(CheckResult("classification-counts", False, str(exc)))

    if classification is not None:
        failing = [
            cls.label
            for cls in classification.nonabelian_classes
            if not verify_prop_abelian_subgroup(cls.group)
        ]
        results.append(CheckResult(
            "abelian-subgroup-property",
            not failing,
            "" if not failing else f"classes without a large abelian subgroup: {failing}",
        ))
        failing = [
            cls.label
            for cls in classification.nonabelian_classes
            if not verify_prop_no_cyclic(cls.group)
        ]
        results.append(CheckResult(
            "order-p2xp-subgroup-property",
            not failing,
            "" if not failing else f"classes violating the subgroup property: {failing}",
        ))

    pairs = _oracle_check_pairs(cfg)
    checks = [
        ("iso-pair-shared-relations", "scaling-v-e2", "shear-v-e2", True),
        ("noniso-pair-split-v0", "scaling-v0", "shear-v0", False),
    ]
    if p > 3:
        checks.append(("noniso-pair-residue-twist", "twist-v0", "twist-eps-v0", False))
    for name, left, right, expected in checks:
        got, _ = isomorphic(build_group(pairs[left]), build_group(pairs[right]))
        results.append(CheckResult(
            name,
            got == expected,
            "" if got == expected else f"{left} vs {right}: got {got}, expected {expected}",
        ))

    results.append(_check_transforms(cfg, cands, groups, seed, exhaustive))
    return results


def _check_transforms(cfg, cands, groups, seed: int, exhaustive: bool) -> CheckResult:
    """Each equivalence transformation must produce an oracle-isomorphic group."""
    p = cfg.p
    rng = random.Random(seed)
    if exhaustive:
        selected = cands
        param_count = 5
    else:
        selected = cands[:3]
        param_count = 1

    for c in selected:
        t = c.ext
        base = groups[c.label]
        profile = t.profile
        elements = list(profile.elements())

        shift_args = elements[1 : 1 + param_count]
        coprime_n = [i for i in range(1, 5 * t.n) if _coprime(i, t.n)][:param_count]
        coprime_order = [i for i in range(1, 5 * p) if _coprime(i, profile.order)][:param_count]
        phis = _sample_automorphisms(cfg, profile, param_count, rng)

        trials = (
            [("shift_generator", lambda tt, x=x: shift_generator(tt, x)) for x in shift_args]
            + [("power_substitute", lambda tt, i=i: power_substitute(tt, i)) for i in coprime_n]
            + [("v_power", lambda tt, i=i: v_power(tt, i)) for i in coprime_order]
            + [("conjugate_type", lambda tt, m=m: conjugate_type(tt, m)) for m in phis]
        )
        for op_name, op in trials:
            try:
                transformed = op(t)
            except ValueError as exc:
                return CheckResult("transform-equivalence", False,
                                   f"{c.label} {op_name}: {exc}")
            ok, _ = isomorphic(base, build_group(transformed))
            if not ok:
                return CheckResult("transform-equivalence", False,
                                   f"{c.label} {op_name} produced a non-isomorphic group")
    return CheckResult("transform-equivalence", True)


def _coprime(a: int, b: int) -> bool:
    import math

    return math.gcd(a, b) == 1


def _sample_automorphisms(cfg, profile, count: int, rng: random.Random) -> list[MixedModulusMatrix]:
    p = cfg.p
    out = [MixedModulusMatrix.identity(profile)]
    if profile.rank == 2:
        pool = [
            ((1, 0), (1, 1)),
            ((1, p), (0, 1)),
            ((2, 0), (0, 1)),
            ((1 + p, p), (1, 2)),
        ]
    else:
        pool = [
            ((1, 0, 0), (1, 1, 0), (0, 0, 1)),
            ((0, 1, 0), (1, 0, 0), (0, 0, 1)),
            ((1, 1, 0), (0, 1, 1), (0, 0, 1)),
            ((2, 0, 0), (0, 1, 0), (0, 0, 1)),
        ]
    for rows in pool:
        m = MixedModulusMatrix(rows, profile)
        if m.is_automorphism:
            out.append(m)
    while len(out) < count:
        out.append(out[rng.randrange(len(out))])
    return out[:count]
