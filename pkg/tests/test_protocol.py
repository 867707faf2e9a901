from __future__ import annotations

import json
from importlib import resources

import pytest

from helpers import secret_needles
from topohide import pairing as pg
from topohide.errors import NoPathError, RoutingError, StructureError
from topohide.multigraph import Edge, Multigraph, Vertex, load_graph
from topohide.protocol import (VARIANTS, ChannelFabric, SessionVerdict, agree_boundary, boundary_costs,
                               customer_check, make_roles, run_phase1, run_phase2, select_boundary, simulate)


def _fixture(name):
    with resources.as_file(resources.files("topohide") / "data" / name) as p:
        return load_graph(p)


@pytest.fixture(scope="module")
def topologies():
    return _fixture("provider_a.json"), _fixture("provider_b.json")


# fabric


def test_fabric_fifo_and_filters():
    f = ChannelFabric()
    for r in ("a", "b", "c"):
        f.register(r)
    f.send("a", "b", "x", 1, b"1")
    f.send("c", "b", "y", 2, b"2")
    f.send("a", "b", "x", 3, b"3")
    assert f.receive("b", "y").payload == 2
    assert f.receive("b", sender="a").payload == 1
    assert f.receive("b").payload == 3
    with pytest.raises(RoutingError):
        f.receive("b")
    assert [e.t for e in f.log] == [1, 2, 3]


def test_fabric_routing_errors():
    f = ChannelFabric()
    f.register("a")
    f.register("b")
    with pytest.raises(RoutingError):
        f.register("a")
    with pytest.raises(RoutingError):
        f.send("a", "z", "x", None, b"")
    with pytest.raises(RoutingError):
        f.send("z", "a", "x", None, b"")
    f.fail_link("a", "b")
    with pytest.raises(RoutingError, match="down"):
        f.send("b", "a", "x", None, b"")


def test_confidential_messages_not_fingerprinted():
    f = ChannelFabric()
    f.register("a")
    f.register("b")
    f.secure_send("a", "b", "secret", None, b"opening")
    f.send("a", "b", "public", None, b"hello")
    log = json.loads(f.transcript_json())
    assert log[0]["digest"] is None and log[0]["type"] == "secret"
    assert log[1]["digest"] is not None
    assert b"opening" in f.visible_bytes("b")
    assert b"opening" not in f.visible_bytes("a")


# boundary selection


def test_select_boundary_rules():
    assert select_boundary({"x": 2, "y": 1}, {"x": 1, "y": 3}) == "x"
    assert select_boundary({"x": 2, "y": 2}, {"x": 1, "y": 1}) == "x"   # tie: smaller id
    assert select_boundary({"x": 0, "y": 5}, {"x": 1, "y": 1}) == "y"   # zero cost skipped
    assert select_boundary({"x": 1}, {"y": 1}) is None


def test_boundary_costs_and_agreement(topologies):
    ga, gb = topologies
    assert boundary_costs(ga, "a-gateway") == {"bn-north": 3, "bn-south": 4}
    assert boundary_costs(gb, "b-exit") == {"bn-north": 3, "bn-south": 2}


def test_agree_boundary_unknown_endpoint(pp, issuer, issuer_b, topologies, rng):
    roles = make_roles(pp, issuer, issuer_b, *topologies, rng)
    _, _, a, b, _, fabric = roles
    with pytest.raises(NoPathError):
        agree_boundary(a, b, "a-gateway", "nowhere", fabric)
    assert agree_boundary(a, b, "a-gateway", "b-exit", fabric) == "bn-north"


# sessions


EXPECTED = {
    "honest": SessionVerdict.ACCEPT,
    "wrong-boundary": SessionVerdict.COMMITMENT_MISMATCH,
    "stale-signature": SessionVerdict.PROOF_INVALID,
    "mismatched-commitments": SessionVerdict.COMMITMENT_MISMATCH,
    "mismatched-length": SessionVerdict.STATEMENT_MISMATCH,
    "tampered-proof": SessionVerdict.PROOF_INVALID,
}


def test_every_variant_has_a_verdict():
    assert set(EXPECTED) == set(VARIANTS)


@pytest.mark.parametrize("variant", VARIANTS)
def test_session_variants(pp, issuer, issuer_b, topologies, variant, rng):
    record, fabric = simulate(pp, issuer, issuer_b, *topologies, "a-gateway", "b-exit", rng, variant)
    assert record.verdict == EXPECTED[variant], record.detail
    if variant == "stale-signature":
        assert "signature" in record.detail


def test_unknown_variant_rejected(pp, issuer, issuer_b, topologies, rng):
    with pytest.raises(ValueError):
        simulate(pp, issuer, issuer_b, *topologies, "a-gateway", "b-exit", rng, "sneaky")


def test_no_path(pp, issuer, issuer_b, topologies, rng):
    ga, gb = topologies
    island = Multigraph(gb.vertices + (Vertex("island"),), gb.edges, gb.boundary)
    # the island reaches no boundary node, so certification itself refuses
    with pytest.raises(StructureError, match="island"):
        simulate(pp, issuer, issuer_b, ga, island, "a-gateway", "island", rng)
    record, _ = simulate(pp, issuer, issuer_b, ga, gb, "a-gateway", "nowhere", rng)
    assert record.verdict == SessionVerdict.NO_PATH


def test_channel_failure(pp, issuer, issuer_b, topologies, rng):
    aud_a, aud_b, a, b, cust, fabric = make_roles(pp, issuer, issuer_b, *topologies, rng)
    run_phase1(a, aud_a, fabric, cust, rng)
    run_phase1(b, aud_b, fabric, cust, rng)
    fabric.fail_link(a.id, cust.id)
    record = run_phase2(a, b, cust, "a-gateway", "b-exit", fabric, rng)
    assert record.verdict == SessionVerdict.CHANNEL_FAILURE


def test_uncertified_provider(pp, issuer, issuer_b, topologies, rng):
    aud_a, aud_b, a, b, cust, fabric = make_roles(pp, issuer, issuer_b, *topologies, rng)
    run_phase1(a, aud_a, fabric, cust, rng)
    run_phase1(b, aud_b, fabric, None, rng)
    record = run_phase2(a, b, cust, "a-gateway", "b-exit", fabric, rng)
    assert record.verdict == SessionVerdict.STATEMENT_MISMATCH


def test_customer_rejects_garbage(pp, issuer, issuer_b, topologies, rng):
    _, _, _, _, cust, _ = make_roles(pp, issuer, issuer_b, *topologies, rng)
    verdict, detail = customer_check(cust, "a-gateway", "b-exit", "provider-a", "provider-b", b"junk", b"junk")
    assert verdict == SessionVerdict.PROOF_INVALID and "malformed" in detail


def test_recertification_keeps_previous_signature(pp, issuer, issuer_b, topologies, rng):
    aud_a, _, a, _, cust, fabric = make_roles(pp, issuer, issuer_b, *topologies, rng)
    first = run_phase1(a, aud_a, fabric, cust, rng)
    second = run_phase1(a, aud_a, fabric, cust, rng)
    assert a.previous_signature == first and a.signature == second


def test_seeded_sessions_are_reproducible(pp, issuer, issuer_b, topologies):
    runs = [simulate(pp, issuer, issuer_b, *topologies, "a-gateway", "b-exit", pg.seeded_rng(42))
            for _ in range(2)]
    assert runs[0][1].transcript_json() == runs[1][1].transcript_json()
    assert runs[0][0].proofs == runs[1][0].proofs


# leakage


def test_customer_view_leaks_nothing_internal(pp, issuer, issuer_b, topologies, rng):
    ga, gb = topologies
    aud_a, aud_b, a, b, cust, fabric = make_roles(pp, issuer, issuer_b, ga, gb, rng)
    run_phase1(a, aud_a, fabric, cust, rng)
    run_phase1(b, aud_b, fabric, cust, rng)
    record = run_phase2(a, b, cust, "a-gateway", "b-exit", fabric, rng)
    assert record.verdict == SessionVerdict.ACCEPT
    seen = fabric.visible_bytes(cust.id)
    internal = (set(ga.vertex_ids) | set(gb.vertex_ids)) - {"a-gateway", "b-exit"}
    for vid in sorted(internal):
        assert vid.encode() not in seen, vid
        assert pg.encode_scalar(pg.vertex_scalar(vid)) not in seen, vid
    for label in ("fiber", "free-space", "trusted-repeater"):
        assert label.encode() not in seen
    needles = secret_needles(holder=a.holder, commitment=a.commitment)
    needles += secret_needles(holder=b.holder, commitment=b.commitment, issuer=issuer)
    needles += secret_needles(issuer=issuer_b)
    assert not [n for n in needles if n in seen]
    # confidential traffic between providers is logged without digests
    confidential = [e for e in fabric.log if e.msg_type in ("opening", "boundary-costs", "sig-request")]
    assert confidential and all(e.digest is None for e in confidential)


def _random_pair(rng):
    """Two providers sharing boundary nodes bn-0 and bn-1."""
    def side(prefix, n):
        ids = [f"{prefix}-{i}" for i in range(n)] + ["bn-0", "bn-1"]
        edges = {frozenset((ids[i], ids[rng.randrange(i)])) for i in range(1, len(ids))}
        for _ in range(rng.randint(0, 3)):
            u, v = rng.sample(ids, 2)
            edges.add(frozenset((u, v)))
        return Multigraph(tuple(Vertex(i) for i in ids), tuple(Edge(*sorted(e)) for e in edges),
                          frozenset({"bn-0", "bn-1"}))
    return side("x", rng.randint(2, 6)), side("y", rng.randint(2, 6))


def test_randomized_end_to_end(pp, issuer, issuer_b, rng):
    done = 0
    while done < 4:
        ga, gb = _random_pair(rng)
        record, _ = simulate(pp, issuer, issuer_b, ga, gb, "x-0", "y-0", rng)
        costs_a = boundary_costs(ga, "x-0")
        costs_b = boundary_costs(gb, "y-0")
        if select_boundary(costs_a, costs_b) is None:
            assert record.verdict == SessionVerdict.NO_PATH
        else:
            assert record.verdict == SessionVerdict.ACCEPT, record.detail
            done += 1
