"""Command-line workbench: ``tdsharp verify|sharpen|generate|oracle``."""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .fields import FieldError
from .generators import GeneratorError, restrict_instance, split_instance, twisted_instance
from .instances import Instance, InstanceError, canonical_json, parse_instance, write_atomic
from .meataxe import NortonInconclusive, bruteforce_invariant_subspaces, is_invariant, norton_irreducible, \
    within_bruteforce_bounds
from .tdverify import CorruptionError, VerificationFailure, verify_td_system

EXIT_CODES = {"accepted": 0, "rejected": 2, "corrupted": 3, "inconclusive": 4, "error": 1}
# batch exit code: the most severe outcome wins
SEVERITY = ("accepted", "rejected", "inconclusive", "corrupted", "error")


@dataclass
class ReportEnvelope:
    command: str
    digest: str | None
    outcome: str
    payload: dict
    wall_time: float
    seed: int | None = None
    source: str | None = None

    def to_json(self) -> dict:
        return {"command": self.command, "digest": self.digest, "outcome": self.outcome,
                "payload": self.payload, "wall_time": round(self.wall_time, 6), "seed": self.seed,
                "source": self.source}


def run_verify(inst: Instance, seed: int = 0) -> tuple[str, dict]:
    import random

    try:
        rec = verify_td_system(inst.A, inst.Astar, rng=random.Random(seed))
    except VerificationFailure as exc:
        return "rejected", exc.to_json()
    except NortonInconclusive as exc:
        return "inconclusive", {"message": str(exc)}
    except CorruptionError as exc:
        return "corrupted", {"lemma": exc.lemma, "message": str(exc)}
    payload = rec.to_json()
    payload["ordering_counts"] = list(rec.ordering_counts)
    return "accepted", payload


def run_sharpen(inst: Instance, seed: int = 0) -> tuple[str, dict]:
    from .sharpen import sharpen_pipeline

    cert = sharpen_pipeline(inst.A, inst.Astar, seed=seed)
    return cert.outcome, cert.to_json()


def run_oracle(inst: Instance, seed: int = 0) -> tuple[str, dict]:
    import random

    if not within_bruteforce_bounds(inst.field, inst.n):
        raise InstanceError("oracle subspaces is limited to p^k <= 4 and n <= 4")
    gens = [inst.A, inst.Astar]
    subs = bruteforce_invariant_subspaces(gens)
    try:
        fast = norton_irreducible(gens, rng=random.Random(seed))
    except NortonInconclusive as exc:
        return "inconclusive", {"subspaces": len(subs), "message": str(exc)}
    F = inst.field
    agree = fast.irreducible == (not subs)
    witness_ok = fast.witness is None or is_invariant(gens, fast.witness)
    if not subs:
        summary = "no proper invariant subspace"
    else:
        summary = f"{len(subs)} proper invariant subspace(s)"
    summary += "; agrees with Norton" if agree and witness_ok else "; DISAGREES with Norton"
    payload = {
        "summary": summary,
        "subspaces": [[[F.encode(x) for x in row] for row in s] for s in subs],
        "norton_irreducible": fast.irreducible,
        "norton_witness": None if fast.witness is None else [[F.encode(x) for x in r] for r in fast.witness],
        "agree": agree and witness_ok,
    }
    return ("accepted" if agree and witness_ok else "corrupted"), payload


RUNNERS = {"verify": run_verify, "sharpen": run_sharpen, "oracle": run_oracle}


def _envelope(command: str, path, seed: int) -> ReportEnvelope:
    start = time.perf_counter()
    try:
        inst = parse_instance(Path(path))
    except (InstanceError, OSError) as exc:
        return ReportEnvelope(command, None, "error", {"message": str(exc)}, time.perf_counter() - start,
                              seed, str(path))
    try:
        outcome, payload = RUNNERS[command](inst, seed)
    except InstanceError as exc:
        outcome, payload = "error", {"message": str(exc)}
    return ReportEnvelope(command, inst.digest(), outcome, payload, time.perf_counter() - start, seed,
                          str(path))


def _batch_worker(args):
    command, path, seed = args
    return _envelope(command, path, seed)


def _summary_line(env: ReportEnvelope) -> str:
    p = env.payload
    bits = [f"{env.source}: {env.outcome}"]
    if env.command == "verify" and env.outcome == "accepted":
        bits.append(f"d={p['d']} shape={tuple(p['shape'])} sharp={str(p['sharp']).lower()}")
    elif env.command == "sharpen" and p.get("rho") is not None:
        bits.append(f"rho={p['rho']} T_dim={p['T_dim']}")
        if p.get("sharpened"):
            s = p["sharpened"]
            bits.append(f"rebased n={s['n']} shape={tuple(s['shape'])} sharp={str(s['sharp']).lower()}")
    elif env.command == "oracle" and "summary" in p:
        bits.append(p["summary"])
    if env.outcome == "rejected" and "tag" in p:
        bits.append(f"failed: {p['tag']}")
    if env.outcome in ("error", "corrupted", "inconclusive") and p.get("message"):
        bits.append(p["message"])
    return "  ".join(bits)


def _emit(envs: list[ReportEnvelope], json_out: str | None) -> int:
    for env in envs:
        print(_summary_line(env))
    doc = envs[0].to_json() if len(envs) == 1 else [e.to_json() for e in envs]
    if json_out:
        write_atomic(json_out, canonical_json(doc))
    worst = max((e.outcome for e in envs), key=SEVERITY.index)
    return EXIT_CODES[worst]


def cmd_instance(args) -> int:
    command = args.command
    seed = getattr(args, "seed", None) or 0
    target = Path(args.file)
    if getattr(args, "batch", False):
        if not target.is_dir():
            print(f"error: {target} is not a directory", file=sys.stderr)
            return 1
        files = sorted(target.glob("*.json"))
        jobs = [(command, f, seed) for f in files]
        if len(jobs) > 1:
            with ProcessPoolExecutor() as pool:
                envs = list(pool.map(_batch_worker, jobs))
        else:
            envs = [_batch_worker(j) for j in jobs]
        if not envs:
            print(f"error: no instance files in {target}", file=sys.stderr)
            return 1
    else:
        envs = [_envelope(command, target, seed)]
    return _emit(envs, getattr(args, "json", None))


def cmd_generate(args) -> int:
    try:
        if args.family == "split":
            inst = split_instance(args.p, args.d, args.seed, args.k, args.restrictable)
        elif args.family == "twisted":
            inst = twisted_instance(args.p, args.params)
        else:
            inst = restrict_instance(parse_instance(Path(args.file)))
    except (GeneratorError, FieldError, InstanceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VerificationFailure as exc:
        print(f"rejected: seed is not a TD pair ({exc})", file=sys.stderr)
        return 2
    text = inst.dumps()
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tdsharp", description="Verify and sharpen tridiagonal pairs exactly.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="certify an instance as a TD pair")
    v.add_argument("file", help="instance file, or a directory with --batch")
    v.add_argument("--batch", action="store_true", help="verify every *.json file in a directory")
    v.add_argument("--json", metavar="OUT", help="write the report envelope here")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_instance)

    s = sub.add_parser("sharpen", help="run the full sharpening pipeline")
    s.add_argument("file")
    s.add_argument("--json", metavar="OUT")
    s.add_argument("--seed", type=int, default=0, help="seed for random sampling and Norton trials")
    s.set_defaults(func=cmd_instance)

    g = sub.add_parser("generate", help="write a candidate instance")
    gsub = g.add_subparsers(dest="family", required=True)
    gs = gsub.add_parser("split", help="split-form pair over GF(p^k)")
    gs.add_argument("--p", type=int, required=True)
    gs.add_argument("--k", type=int, default=1)
    gs.add_argument("--d", type=int, required=True)
    gs.add_argument("--seed", type=int, required=True)
    gs.add_argument("--restrictable", action="store_true",
                    help="eigenvalues in GF(p) and a twisted split sequence, ready for 'generate restrict'")
    gt = gsub.add_parser("twisted", help="4x4 diameter-1 nonsharp pair over GF(p)")
    gt.add_argument("--p", type=int, required=True)
    gt.add_argument("--params", required=True, help="theta0,theta1,theta*0,theta*1,gamma (gamma like 1+i)")
    gr = gsub.add_parser("restrict", help="restrict a verified extension-field instance to GF(p)")
    gr.add_argument("file")
    for parser in (gs, gt, gr):
        parser.add_argument("--out", help="output path (default: stdout)")
    g.set_defaults(func=cmd_generate)

    o = sub.add_parser("oracle", help="exhaustive invariant-subspace search")
    osub = o.add_subparsers(dest="oracle_kind", required=True)
    os_ = osub.add_parser("subspaces")
    os_.add_argument("file")
    os_.add_argument("--json", metavar="OUT")
    os_.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_instance)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
