"""Tensor chains over the operator algebra and their standard differentials.

A degree-k word is a (k+1)-tuple a0 (x) a1 (x) ... (x) ak of elements of
the n-variable operator algebra; a chain is a finite rational combination
of words (possibly of mixed degree).  Canonical form: each slot entry is
made monic by moving its leading coefficient into the chain coefficient,
words with a zero slot are dropped, and identical words are merged, so
equality of chains is exact and decidable.

Operators implemented here:

* hochschild_b   - sum of signed adjacent products plus the wrap-around
                   term (-1)^k (ak a0) (x) a1 (x) ... (x) a(k-1)
* bar_bprime     - the same sum without the wrap-around term
* cyclic_tau     - signed rotation, tau(w) = (-1)^k (ak, a0, ..., a(k-1))
                   on degree-k words
* norm_n         - the norm sum(tau^j, j = 0..k) degree by degree
* shuffle_product- signed interleavings of the interior slots after
                   embedding the two factors on disjoint variable blocks
* omega_cycle    - the canonical closed 2n-chain built by shuffling n
                   copies of 1 (x) d (x) z - 1 (x) z (x) d + 1 (x) 1 (x) 1
* normalize      - quotient by words with a scalar in an interior slot
* tsygan_d       - total differential of the (b, -b') bicomplex whose
                   even columns carry b and odd columns carry -b'

The bicomplex identities b(1-tau) = (1-tau) b' and b' N = N b make
tsygan_d square to zero; both are exercised on random chains in the
tests, as is d^2 itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Dict, Iterable, List, Sequence, Tuple

from .weyl import WeylElement, d_var, disjoint_embed, format_element, mul, parse_element, unit, z_var

Word = Tuple[WeylElement, ...]


def _canonical_terms(n: int, raw: Iterable[Tuple[Fraction, Word]]):
    # Multilinear expansion: every slot becomes a single monic monomial,
    # so all cancellations between algebraically equal chains are found.
    acc: Dict[tuple, Tuple[Fraction, Word]] = {}
    for coeff, word in raw:
        if not coeff:
            continue
        pieces: List[Tuple[Fraction, Tuple[WeylElement, ...]]] = [(coeff, ())]
        for el in word:
            if el.n != n:
                raise ValueError("word entry has wrong variable count")
            if el.is_zero():
                pieces = []
                break
            expanded = []
            for c, prefix in pieces:
                for mono, mc in el.terms:
                    expanded.append((c * mc, prefix + (WeylElement(n, ((mono, Fraction(1)),)),)))
            pieces = expanded
        for c, w in pieces:
            key = tuple(el.terms[0][0].sort_key for el in w)
            if key in acc:
                tot = acc[key][0] + c
                if tot:
                    acc[key] = (tot, w)
                else:
                    del acc[key]
            else:
                acc[key] = (c, w)
    return tuple(acc[k] for k in sorted(acc))


@dataclass(frozen=True)
class TensorChain:
    """Rational combination of tensor words over the n-variable algebra."""

    n: int
    terms: Tuple[Tuple[Fraction, Word], ...]

    @staticmethod
    def from_terms(n: int, raw: Iterable[Tuple[Fraction, Word]]) -> "TensorChain":
        return TensorChain(n, _canonical_terms(n, raw))

    @staticmethod
    def zero(n: int) -> "TensorChain":
        return TensorChain(n, ())

    @staticmethod
    def word(n: int, coeff, slots: Sequence[WeylElement]) -> "TensorChain":
        return TensorChain.from_terms(n, [(Fraction(coeff), tuple(slots))])

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {len(w) - 1 for _, w in self.terms}

    def __add__(self, other: "TensorChain") -> "TensorChain":
        if self.n != other.n:
            raise ValueError("cannot add chains over different algebras")
        return TensorChain.from_terms(self.n, list(self.terms) + list(other.terms))

    def __sub__(self, other: "TensorChain") -> "TensorChain":
        return self + (-1) * other

    def __rmul__(self, c) -> "TensorChain":
        c = Fraction(c)
        return TensorChain.from_terms(self.n, [(c * k, w) for k, w in self.terms])

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for coeff, word in self.terms:
            body = " (x) ".join(f"[{format_element(el)}]" for el in word)
            parts.append(f"({coeff}) {body}")
        return " + ".join(parts)


def hochschild_b(c: TensorChain) -> TensorChain:
    out = []
    for coeff, word in c.terms:
        k = len(word) - 1
        if k == 0:
            continue
        for i in range(k):
            sign = -1 if i % 2 else 1
            merged = word[:i] + (mul(word[i], word[i + 1]),) + word[i + 2:]
            out.append((coeff * sign, merged))
        wrap_sign = -1 if k % 2 else 1
        wrapped = (mul(word[k], word[0]),) + word[1:k]
        out.append((coeff * wrap_sign, wrapped))
    return TensorChain.from_terms(c.n, out)


def bar_bprime(c: TensorChain) -> TensorChain:
    out = []
    for coeff, word in c.terms:
        k = len(word) - 1
        for i in range(k):
            sign = -1 if i % 2 else 1
            merged = word[:i] + (mul(word[i], word[i + 1]),) + word[i + 2:]
            out.append((coeff * sign, merged))
    return TensorChain.from_terms(c.n, out)


def cyclic_tau(c: TensorChain) -> TensorChain:
    out = []
    for coeff, word in c.terms:
        k = len(word) - 1
        sign = -1 if k % 2 else 1
        out.append((coeff * sign, (word[k],) + word[:k]))
    return TensorChain.from_terms(c.n, out)


def norm_n(c: TensorChain) -> TensorChain:
    out: List[Tuple[Fraction, Word]] = []
    for coeff, word in c.terms:
        k = len(word) - 1
        piece = TensorChain.from_terms(c.n, [(coeff, word)])
        for _ in range(k + 1):
            out.extend(piece.terms)
            piece = cyclic_tau(piece)
    return TensorChain.from_terms(c.n, out)


def normalize(c: TensorChain) -> TensorChain:
    """Kill words with a scalar multiple of 1 in any slot other than slot 0."""
    unit_key = unit(c.n).sort_key
    kept = [
        (coeff, word)
        for coeff, word in c.terms
        if not any(el.sort_key == unit_key for el in word[1:])
    ]
    return TensorChain.from_terms(c.n, kept)


# ---------------------------------------------------------------------------
# shuffle product
# ---------------------------------------------------------------------------


def _shuffles(p: int, q: int):
    """Yield (positions_of_first_block, sign) over all (p, q)-interleavings."""
    for pos in combinations(range(p + q), p):
        inversions = sum(pos[i] - i for i in range(p))
        yield pos, (-1 if inversions % 2 else 1)


def shuffle_product(c1: TensorChain, c2: TensorChain) -> TensorChain:
    """Chain-level shuffle of chains over disjoint variable blocks.

    The second factor is re-indexed to variables n1+1..n1+n2; slot 0 of
    the result is the product of the two slot-0 entries and the interior
    slots are all signed interleavings.
    """
    n = c1.n + c2.n
    out = []
    for coeff1, word1 in c1.terms:
        a0 = disjoint_embed(word1[0], 0, n)
        rest1 = [disjoint_embed(el, 0, n) for el in word1[1:]]
        p = len(rest1)
        for coeff2, word2 in c2.terms:
            b0 = disjoint_embed(word2[0], c1.n, n)
            rest2 = [disjoint_embed(el, c1.n, n) for el in word2[1:]]
            q = len(rest2)
            head = mul(a0, b0)
            coeff = coeff1 * coeff2
            for pos, sign in _shuffles(p, q):
                slots: List[WeylElement | None] = [None] * (p + q)
                for i, s in enumerate(pos):
                    slots[s] = rest1[i]
                it = iter(rest2)
                for s in range(p + q):
                    if slots[s] is None:
                        slots[s] = next(it)
                out.append((coeff * sign, (head,) + tuple(slots)))  # type: ignore[arg-type]
    return TensorChain.from_terms(n, out)


def omega_cycle(n: int) -> TensorChain:
    """Shuffle n copies of the degree-2 cycle 1(x)d(x)z - 1(x)z(x)d + 1(x)1(x)1."""
    if n < 1:
        raise ValueError("need n >= 1")
    one = unit(1)
    base = (
        TensorChain.word(1, 1, [one, d_var(1, 1), z_var(1, 1)])
        + (-1) * TensorChain.word(1, 1, [one, z_var(1, 1), d_var(1, 1)])
        + TensorChain.word(1, 1, [one, one, one])
    )
    result = base
    for _ in range(n - 1):
        result = shuffle_product(result, base)
    return result


def normalized_omega_formula(n: int) -> TensorChain:
    """Independent closed form: sum over permutations sigma of the 2n interior
    slots of sgn(sigma) 1 (x) sigma(d1 (x) z1 (x) ... (x) dn (x) zn)."""
    letters = []
    for i in range(1, n + 1):
        letters.append(d_var(i, n))
        letters.append(z_var(i, n))
    out = []
    for perm in permutations(range(2 * n)):
        inv = sum(1 for i in range(2 * n) for j in range(i + 1, 2 * n) if perm[i] > perm[j])
        sign = -1 if inv % 2 else 1
        out.append((Fraction(sign), (unit(n),) + tuple(letters[p] for p in perm)))
    return TensorChain.from_terms(n, out)


# ---------------------------------------------------------------------------
# bicomplex of columns alternating between b and -b'
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TsyganColumnVector:
    """Finite family of chains indexed by column number >= 0.

    Even columns carry the cyclic-product differential b, odd columns the
    bar differential with a sign, -b'.  The horizontal arrow out of an odd
    column p is (1 - tau) into column p-1, and out of an even column p >= 1
    it is the norm N into column p-1; these orientations are the ones under
    which the two classical exchange identities make the total differential
    square to zero.
    """

    n: int
    entries: Tuple[Tuple[int, TensorChain], ...]

    @staticmethod
    def from_entries(n: int, raw: Iterable[Tuple[int, TensorChain]]) -> "TsyganColumnVector":
        acc: Dict[int, TensorChain] = {}
        for col, chain in raw:
            if col < 0:
                raise ValueError("column indices must be non-negative")
            if chain.n != n:
                raise ValueError("chain has wrong variable count")
            acc[col] = acc[col] + chain if col in acc else chain
        items = tuple((c, acc[c]) for c in sorted(acc) if not acc[c].is_zero())
        return TsyganColumnVector(n, items)

    def column(self, p: int) -> TensorChain:
        for col, chain in self.entries:
            if col == p:
                return chain
        return TensorChain.zero(self.n)

    def is_zero(self) -> bool:
        return not self.entries


def tsygan_d(v: TsyganColumnVector) -> TsyganColumnVector:
    out: List[Tuple[int, TensorChain]] = []
    for col, chain in v.entries:
        if col % 2 == 0:
            out.append((col, hochschild_b(chain)))
            if col >= 1:
                out.append((col - 1, norm_n(chain)))
        else:
            out.append((col, (-1) * bar_bprime(chain)))
            out.append((col - 1, chain + (-1) * cyclic_tau(chain)))
    return TsyganColumnVector.from_entries(v.n, out)


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------


def chain_to_json(c: TensorChain) -> str:
    payload = {
        "n": c.n,
        "terms": [
            {"coeff": str(coeff), "word": [format_element(el) for el in word]}
            for coeff, word in c.terms
        ],
    }
    return json.dumps(payload, indent=2)


def chain_from_json(text: str) -> TensorChain:
    payload = json.loads(text)
    n = int(payload["n"])
    raw = [
        (Fraction(t["coeff"]), tuple(parse_element(s, n) for s in t["word"]))
        for t in payload["terms"]
    ]
    return TensorChain.from_terms(n, raw)
