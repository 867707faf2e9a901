"""Command-line interface.

Human-readable summaries go to stdout, diagnostics to stderr, and machine
artifacts only to the files named by flags. Exit codes are the stable
``ExitCode`` enum.
"""

from __future__ import annotations

import argparse
import random
import sys
from enum import IntEnum
from pathlib import Path as FsPath

from . import pairing as pg
from .clsdh import GraphSignature, HolderKey, holder_keygen, issue_graph_signature, verify_graph_signature
from .commitments import CommitmentPair, EndpointCommitments, EndpointOpening, GraphCommitment, commit_endpoint, \
    commit_graph, verify_opening
from .connected import ConnectionProof, bind_shared_commitment, prove_connected, verify_connected
from .errors import (InputError, IssuanceRefused, MalformedError, NoPathError, ProofRefused, StructureError,
                     TopoHideError)
from .monipoly import (L_MAX_DEFAULT, N_MAX_DEFAULT, AuditorPublicKey, IssuerSecret, PublicParameters, new_auditor,
                       setup)
from .multigraph import augment, load_graph, pad_path, padding_target, save_graph, shortest_path
from .protocol import VARIANTS, SessionVerdict, simulate


class ExitCode(IntEnum):
    OK = 0
    REJECTED = 1
    USAGE = 2
    MALFORMED = 3
    IO = 4
    NO_PATH = 5
    BIND = 6
    INPUT = 7
    CHANNEL = 8
    STATEMENT = 9
    OPENING = 10
    REFUSED = 11
    STRUCTURE = 12


VERDICT_EXIT = {
    SessionVerdict.ACCEPT: ExitCode.OK,
    SessionVerdict.PROOF_INVALID: ExitCode.REJECTED,
    SessionVerdict.NO_PATH: ExitCode.NO_PATH,
    SessionVerdict.COMMITMENT_MISMATCH: ExitCode.BIND,
    SessionVerdict.CHANNEL_FAILURE: ExitCode.CHANNEL,
    SessionVerdict.STATEMENT_MISMATCH: ExitCode.STATEMENT,
    SessionVerdict.OPENING_INVALID: ExitCode.OPENING,
    SessionVerdict.PROVER_REFUSED: ExitCode.REFUSED,
}


class CliError(Exception):
    def __init__(self, code: ExitCode, msg: str):
        super().__init__(msg)
        self.code = code


def _rng(args) -> random.Random:
    if args.seed is not None:
        return pg.seeded_rng(args.seed)
    return pg.system_rng()


def _read(path: str) -> bytes:
    try:
        return FsPath(path).read_bytes()
    except OSError as exc:
        raise CliError(ExitCode.IO, f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes | str) -> None:
    try:
        p = FsPath(path)
        if isinstance(data, str):
            p.write_text(data)
        else:
            p.write_bytes(data)
    except OSError as exc:
        raise CliError(ExitCode.IO, f"cannot write {path}: {exc.strerror}") from None


def _load(kind, path: str):
    data = _read(path)
    try:
        return kind.from_bytes(data)
    except MalformedError as exc:
        raise CliError(ExitCode.MALFORMED, f"malformed {path}: {exc}") from None


def _graph(path: str):
    try:
        return load_graph(path)
    except OSError as exc:
        raise CliError(ExitCode.IO, f"cannot read {path}: {exc.strerror}") from None
    except MalformedError as exc:
        raise CliError(ExitCode.MALFORMED, f"{path}: {exc}") from None


def _pub_path(keys: str) -> str:
    return keys + ".pub"


# subcommands


def cmd_setup(args) -> ExitCode:
    try:
        pp, issuer = setup(args.n_max, args.l_max, _rng(args))
    except InputError as exc:
        raise CliError(ExitCode.INPUT, str(exc)) from None
    _write(args.out, pp.to_bytes())
    _write(args.auditor_keys, issuer.to_bytes())
    pub = args.auditor_pub or _pub_path(args.auditor_keys)
    _write(pub, issuer.public_key().to_bytes())
    print(f"parameters: n_max={pp.n_max} L_max={pp.L_max} digest={pp.digest().hex()[:16]}")
    print(f"auditor key id: {issuer.public_key().key_id.hex()[:16]}")
    return ExitCode.OK


def cmd_add_auditor(args) -> ExitCode:
    pp = _load(PublicParameters, args.params)
    issuer = _load(IssuerSecret, args.auditor_keys)
    fresh = new_auditor(pp, issuer, _rng(args))
    _write(args.out, fresh.to_bytes())
    _write(args.auditor_pub or _pub_path(args.out), fresh.public_key().to_bytes())
    print(f"auditor key id: {fresh.public_key().key_id.hex()[:16]}")
    return ExitCode.OK


def cmd_certify(args) -> ExitCode:
    rng = _rng(args)
    g = _graph(args.graph)
    pp = _load(PublicParameters, args.params)
    issuer = _load(IssuerSecret, args.auditor_keys)
    try:
        ell = padding_target(g)
        augmented = augment(g, ell)
    except (StructureError, InputError) as exc:
        raise CliError(ExitCode.STRUCTURE, str(exc)) from None
    holder = holder_keygen(pp, rng)
    try:
        gc = commit_graph(pp, augmented, rng)
        sig = issue_graph_signature(pp, issuer, holder, gc, augmented, rng)
    except (InputError, IssuanceRefused) as exc:
        raise CliError(ExitCode.INPUT, str(exc)) from None
    _write(args.holder_key, holder.to_bytes())
    _write(args.out, sig.to_bytes())
    _write(args.commitment_out or args.out + ".openings", gc.to_bytes())
    try:
        save_graph(augmented, args.augmented_out or args.graph + ".augmented.json")
    except OSError as exc:
        raise CliError(ExitCode.IO, f"cannot write augmented graph: {exc.strerror}") from None
    print(f"padding target: {ell}")
    print(f"augmented graph: {augmented.n} vertices, {augmented.m} edge instances")
    return ExitCode.OK


def cmd_verify_sig(args) -> ExitCode:
    pp = _load(PublicParameters, args.params)
    pk = _load(AuditorPublicKey, args.auditor_pub)
    sig = _load(GraphSignature, args.sig)
    holder = _load(HolderKey, args.holder_key)
    gc = _load(GraphCommitment, args.commitment)
    g = _graph(args.graph_augmented)
    v = verify_graph_signature(pp, pk, sig, holder.public, g, gc)
    if v:
        print("signature: accept")
        return ExitCode.OK
    print(f"signature: reject ({v.code})")
    return ExitCode.REJECTED


def cmd_commit(args) -> ExitCode:
    pp = _load(PublicParameters, args.params)
    ec = commit_endpoint(pp, args.vertex, _rng(args))
    _write(args.out, ec.pair.to_bytes())
    _write(args.opening_out, ec.opening.to_bytes())
    print("commitment written")
    return ExitCode.OK


def _endpoint(pp, public: str | None, commitment: str | None, opening: str | None, name: str):
    if (public is None) == (commitment is None):
        raise CliError(ExitCode.USAGE, f"give exactly one of --{name} or --{name}-commitment")
    if public is not None:
        return public, None
    if opening is None:
        raise CliError(ExitCode.USAGE, f"--{name}-commitment needs --{name}-opening")
    pair = _load(CommitmentPair, commitment)
    op = _load(EndpointOpening, opening)
    if not verify_opening(pp, pair, op):
        raise CliError(ExitCode.OPENING, f"{name} opening does not match its commitment")
    return op.vertex_id, EndpointCommitments(pair, op)


def cmd_prove(args) -> ExitCode:
    rng = _rng(args)
    pp = _load(PublicParameters, args.params)
    pk = _load(AuditorPublicKey, args.auditor_pub)
    sig = _load(GraphSignature, args.sig)
    holder = _load(HolderKey, args.holder_key)
    gc = _load(GraphCommitment, args.commitment)
    g = _graph(args.graph_augmented)
    src, src_ec = _endpoint(pp, args.source, args.source_commitment, args.source_opening, "source")
    dst, dst_ec = _endpoint(pp, args.dest, args.dest_commitment, args.dest_opening, "dest")
    if args.length < 1:
        raise CliError(ExitCode.INPUT, "--length must be at least 1")
    try:
        base = shortest_path(g, src, dst)
        if base is None or base.padded_length > args.length:
            raise NoPathError("no path within length bound")
        at = "source" if src_ec is not None and dst_ec is None else "terminal"
        path = pad_path(base, g, args.length, at=at)
    except NoPathError as exc:
        raise CliError(ExitCode.NO_PATH, str(exc)) from None
    except InputError as exc:
        raise CliError(ExitCode.INPUT, str(exc)) from None
    except StructureError as exc:
        raise CliError(ExitCode.NO_PATH, f"no path within length bound ({exc})") from None
    try:
        proof = prove_connected(pp, pk, sig, holder, g, gc, path, source=src_ec, terminal=dst_ec,
                                length=args.length, rng=rng)
    except ProofRefused as exc:
        raise CliError(ExitCode.REFUSED, f"prover refused: {exc}") from None
    _write(args.out, proof.to_bytes())
    print(f"proof written: length {args.length}")
    return ExitCode.OK


def cmd_verify(args) -> ExitCode:
    pp = _load(PublicParameters, args.params)
    pk = _load(AuditorPublicKey, args.auditor_pub)
    proof = _load(ConnectionProof, args.proof)
    if args.peer_proof is None:
        v = verify_connected(pp, pk, proof)
        if v:
            print("proof: accept")
            return ExitCode.OK
        print(f"proof: reject ({v.code})")
        return ExitCode.REJECTED
    peer = _load(ConnectionProof, args.peer_proof)
    peer_pk = _load(AuditorPublicKey, args.peer_auditor_pub) if args.peer_auditor_pub else pk
    v = bind_shared_commitment(pp, proof, pk, peer, peer_pk)
    if v:
        print("proof pair: accept")
        return ExitCode.OK
    print(f"proof pair: reject ({v.code})")
    return ExitCode.BIND if v.code == "bind" else ExitCode.REJECTED


def cmd_simulate(args) -> ExitCode:
    rng = _rng(args)
    ga, gb = _graph(args.topology_a), _graph(args.topology_b)
    try:
        pp, ia = setup(args.n_max, args.l_max, rng)
        ib = new_auditor(pp, ia, rng)
        record, fabric = simulate(pp, ia, ib, ga, gb, args.source, args.dest, rng, args.variant)
    except (StructureError, InputError) as exc:
        raise CliError(ExitCode.STRUCTURE, str(exc)) from None
    if args.transcript:
        _write(args.transcript, fabric.transcript_json())
    print(f"verdict: {record.verdict.value}")
    return VERDICT_EXIT[record.verdict]


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="deterministic randomness (needs --insecure-test-mode)")
    common.add_argument("--insecure-test-mode", action="store_true", help="allow --seed")

    p = argparse.ArgumentParser(prog="topohide", description="Topology-hiding path proofs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("setup", parents=[common], help="generate parameters and the first auditor key")
    s.add_argument("--n-max", type=int, default=N_MAX_DEFAULT)
    s.add_argument("--l-max", type=int, default=L_MAX_DEFAULT)
    s.add_argument("--out", required=True)
    s.add_argument("--auditor-keys", required=True)
    s.add_argument("--auditor-pub")
    s.set_defaults(func=cmd_setup)

    s = sub.add_parser("add-auditor", parents=[common], help="derive another auditor over the same parameters")
    s.add_argument("--params", required=True)
    s.add_argument("--auditor-keys", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--auditor-pub")
    s.set_defaults(func=cmd_add_auditor)

    s = sub.add_parser("certify", parents=[common], help="pad, commit and sign a provider graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--params", required=True)
    s.add_argument("--auditor-keys", required=True)
    s.add_argument("--holder-key", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--augmented-out")
    s.add_argument("--commitment-out")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("verify-sig", parents=[common], help="check a graph signature")
    s.add_argument("--sig", required=True)
    s.add_argument("--params", required=True)
    s.add_argument("--auditor-pub", required=True)
    s.add_argument("--holder-key", required=True)
    s.add_argument("--commitment", required=True)
    s.add_argument("--graph-augmented", required=True)
    s.set_defaults(func=cmd_verify_sig)

    s = sub.add_parser("commit", parents=[common], help="commit to an endpoint vertex")
    s.add_argument("--params", required=True)
    s.add_argument("--vertex", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--opening-out", required=True)
    s.set_defaults(func=cmd_commit)

    s = sub.add_parser("prove", parents=[common], help="prove a path of public length")
    s.add_argument("--params", required=True)
    s.add_argument("--auditor-pub", required=True)
    s.add_argument("--sig", required=True)
    s.add_argument("--holder-key", required=True)
    s.add_argument("--commitment", required=True)
    s.add_argument("--graph-augmented", required=True)
    s.add_argument("--source")
    s.add_argument("--source-commitment")
    s.add_argument("--source-opening")
    s.add_argument("--dest")
    s.add_argument("--dest-commitment")
    s.add_argument("--dest-opening")
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("verify", parents=[common], help="verify a proof, or a proof pair with --peer-proof")
    s.add_argument("--proof", required=True)
    s.add_argument("--params", required=True)
    s.add_argument("--auditor-pub", required=True)
    s.add_argument("--peer-proof")
    s.add_argument("--peer-auditor-pub")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", parents=[common], help="run both phases end to end")
    s.add_argument("--topology-a", required=True)
    s.add_argument("--topology-b", required=True)
    s.add_argument("--source", required=True)
    s.add_argument("--dest", required=True)
    s.add_argument("--variant", choices=VARIANTS, default="honest")
    s.add_argument("--transcript")
    s.add_argument("--n-max", type=int, default=N_MAX_DEFAULT)
    s.add_argument("--l-max", type=int, default=64)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and int(ExitCode.USAGE)
    if args.seed is not None and not args.insecure_test_mode:
        print("error: --seed is refused without --insecure-test-mode", file=sys.stderr)
        return int(ExitCode.USAGE)
    try:
        return int(args.func(args))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(exc.code)
    except TopoHideError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.INPUT)


if __name__ == "__main__":
    sys.exit(main())
