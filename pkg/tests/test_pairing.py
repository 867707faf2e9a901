from __future__ import annotations

import pytest

from topohide import pairing as pg
from topohide.errors import InputError, MalformedError
from topohide.pairing import G1, G2, GT, P


def test_group_order_and_widths():
    assert P.bit_length() >= 250
    assert int(G2.order()) == P and int(GT.order()) == P
    ctx = pg.context()
    assert len(pg.encode_point(ctx.g1)) == pg.G1_BYTES
    assert len(pg.encode_point(ctx.g2)) == pg.G2_BYTES
    assert len(pg.encode_point(ctx.gt)) == pg.GT_BYTES


def test_bilinearity(rng):
    ctx = pg.context()
    for _ in range(100):
        a, b = pg.random_scalar(rng), pg.random_scalar(rng)
        assert pg.pair(ctx.g1 ** a, ctx.g2 ** b) == ctx.gt ** (a * b % P)


def test_pairing_non_degenerate():
    ctx = pg.context()
    assert not ctx.gt.is_neutral_element()
    assert ctx.e(ctx.g1, ctx.g2) == ctx.gt


def test_pairing_product_matches_naive(rng):
    ctx = pg.context()
    shared = ctx.g2 ** pg.random_scalar(rng)
    pairs = [(ctx.g1 ** pg.random_scalar(rng), shared) for _ in range(3)]
    pairs += [(ctx.g1 ** pg.random_scalar(rng), ctx.g2 ** pg.random_scalar(rng)) for _ in range(3)]
    pairs.append((G1.neutral_element(), ctx.g2))
    naive = GT.neutral_element()
    for a, b in pairs:
        naive = naive * a.pair(b)
    assert pg.pairing_product(pairs) == naive


def test_pairing_product_rejects_empty():
    with pytest.raises(InputError):
        pg.pairing_product([])


def test_multiexp_matches_naive(rng):
    ctx = pg.context()
    bases1 = [ctx.g1 ** pg.random_scalar(rng) for _ in range(5)]
    bases2 = [ctx.g2 ** pg.random_scalar(rng) for _ in range(5)]
    exps = [pg.random_scalar(rng) for _ in range(4)] + [0]
    naive1, naive2 = G1.neutral_element(), G2.neutral_element()
    for b1, b2, e in zip(bases1, bases2, exps):
        naive1 = naive1 * b1 ** e
        naive2 = naive2 * b2 ** e
    assert pg.g1_multiexp(bases1, exps) == naive1
    assert pg.g2_multiexp(bases2, exps) == naive2
    assert pg.g1_multiexp([], []).is_neutral_element()


def test_hash_to_scalar_deterministic_and_separated():
    assert pg.hash_to_scalar(b"vertex", b"a") == pg.hash_to_scalar("vertex", "a")
    assert pg.hash_to_scalar(b"vertex", b"a") != pg.hash_to_scalar(b"label", b"a")
    assert pg.vertex_scalar("a") != pg.label_scalar("a")
    assert pg.counter_scalar(1) != pg.counter_scalar(2)
    # tag and payload boundaries cannot be shifted
    assert pg.hash_to_scalar(b"ab", b"c") != pg.hash_to_scalar(b"a", b"bc")


def test_hash_to_scalar_empty_tag():
    with pytest.raises(InputError):
        pg.hash_to_scalar(b"", b"payload")


def test_hash_corpus_collision_free():
    seen = set()
    for i in range(10_000):
        x = pg.vertex_scalar(f"node-{i}")
        assert 0 <= x < P
        seen.add(x)
    assert len(seen) == 10_000


def test_seeded_rng_reproducible():
    a = [pg.random_scalar(pg.seeded_rng(5)) for _ in range(3)]
    b = [pg.random_scalar(pg.seeded_rng(5)) for _ in range(3)]
    assert a == b
    assert all(1 <= x < P for x in a)


def test_scalar_encoding_round_trip(rng):
    for x in (0, 1, P - 1, pg.random_scalar(rng)):
        data = pg.encode_scalar(x)
        assert len(data) == pg.SCALAR_BYTES
        assert pg.decode_scalar(data) == x
    assert pg.encode_scalar(1) == b"\x01" + bytes(31)


def test_scalar_encoding_rejects():
    with pytest.raises(InputError):
        pg.encode_scalar(P)
    with pytest.raises(MalformedError):
        pg.decode_scalar(P.to_bytes(32, "little"))
    with pytest.raises(MalformedError):
        pg.decode_scalar(bytes(31))


@pytest.mark.parametrize("group,decode", [(G1, pg.decode_g1), (G2, pg.decode_g2), (GT, pg.decode_gt)])
def test_point_round_trip(group, decode, rng):
    elem = group.generator() ** pg.random_scalar(rng)
    assert decode(pg.encode_point(elem)) == elem
    ident = group.neutral_element()
    data = pg.encode_point(ident)
    assert data == bytes(len(data))
    assert decode(data).is_neutral_element()


@pytest.mark.parametrize("group,decode", [(G1, pg.decode_g1), (G2, pg.decode_g2), (GT, pg.decode_gt)])
def test_point_decoding_rejects_malformed(group, decode, rng):
    data = pg.encode_point(group.generator() ** pg.random_scalar(rng))
    with pytest.raises(MalformedError):
        decode(data[:-1])
    with pytest.raises(MalformedError):
        decode(data + b"\x00")
    rejected = 0
    for i in range(20):
        bad = bytearray(data)
        bad[1 + (i * 7) % (len(bad) - 1)] ^= 1 << (i % 8)
        try:
            elem = decode(bytes(bad))
        except MalformedError:
            rejected += 1
        else:
            # whatever decoded must re-encode to exactly these bytes
            assert pg.encode_point(elem) == bytes(bad)
    assert rejected > 0


def test_g1_garbage_rejected():
    with pytest.raises(MalformedError):
        pg.decode_g1(b"\x02" + b"\xff" * 48)


def test_point_digest_order_sensitive(rng):
    ctx = pg.context()
    a, b = ctx.g1, ctx.g1 ** 2
    assert pg.point_digest([a, b]) != pg.point_digest([b, a])
