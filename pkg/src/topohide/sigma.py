"""Fiat-Shamir proofs of knowledge for systems of linear-exponent relations.

Each relation is a group homomorphism ``phi`` from a vector of secret
scalars to a group element, together with its public target. Relations
sharing a variable share its nonce, which is what links them.
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Sequence

from . import pairing as pg
from .pairing import P

Phi = Callable[[Mapping[str, int]], Any]


@dataclass(frozen=True)
class Relation:
    """phi(secrets) == target, phi linear in the listed variables."""

    name: str
    variables: tuple[str, ...]
    phi: Phi
    target: Any


class Transcript:
    """Labelled, length-prefixed hash input for the challenge."""

    def __init__(self, domain: bytes):
        self._h = hashlib.sha512()
        self.append(b"domain", domain)

    def append(self, label: bytes, data: bytes) -> None:
        self._h.update(struct.pack(">H", len(label)) + label)
        self._h.update(struct.pack(">I", len(data)) + data)

    def append_points(self, label: bytes, elems: Iterable) -> None:
        self.append(label, b"".join(pg.encode_point(e) for e in elems))

    def challenge(self) -> int:
        return pg.hash_to_scalar(b"challenge", self._h.digest())


def all_variables(relations: Sequence[Relation]) -> list[str]:
    seen: dict[str, None] = {}
    for rel in relations:
        for v in rel.variables:
            seen.setdefault(v, None)
    return list(seen)


def commit(relations: Sequence[Relation], rng: random.Random,
           variables: Sequence[str] | None = None) -> tuple[dict[str, int], list]:
    """Sample one nonce per variable and evaluate every relation on them."""
    names = all_variables(relations) if variables is None else variables
    nonces = {v: pg.random_scalar(rng) for v in names}
    return nonces, [rel.phi(nonces) for rel in relations]


def respond(nonces: Mapping[str, int], witness: Mapping[str, int], c: int) -> dict[str, int]:
    return {v: (nonces[v] + c * witness[v]) % P for v in nonces}


def check(rel: Relation, announcement, responses: Mapping[str, int], c: int) -> bool:
    return rel.phi(responses) == announcement * (rel.target ** c)
