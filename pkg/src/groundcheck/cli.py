"""Command-line interface.

Commands: ingest, split, synth {c2d,d2c,c2d-simp,d2c-simp}, tune, check,
eval, report, annotate-serve.

Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.
Artifact-producing commands write a sibling <out>.manifest.json with the
command line, seeds, backend identity, and output digests.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import random
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .annotate import AnnotationStore, load_tokens, make_app
from .c2d import C2DPipeline, run_c2d_simp
from .checker import (
    ChunkPlan,
    LexicalStubChecker,
    LlmChecker,
    RemoteChecker,
    ThresholdPolicy,
    check_decomposed,
    decide,
    score_claim,
)
from .core import (
    VALIDATION,
    EvidenceDoc,
    SupportLabel,
    make_split,
    parse_ingest_record,
    read_jsonl,
    read_records,
    write_records,
)
from .d2c import D2CPipeline, run_d2c_simp
from .decomp import decontextualize
from .errors import BackendError, DataError, ToolkitError
from .gateway import Gateway, GatewayConfig, HttpBackend, MockBackend
from .manifest import utc_now, write_manifest
from .metrics import ConfusionCounts, bacc, paired_bootstrap
from .report import dump_report, human_table, load_report, ordered_datasets

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; our contract reserves 2 for data
    errors, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# shared builders
# ---------------------------------------------------------------------------


def _build_gateway(args) -> Gateway:
    config_path = getattr(args, "config", None)
    config = GatewayConfig.load(config_path) if config_path else GatewayConfig()
    fixtures = getattr(args, "fixtures", None)
    if fixtures:
        # Canned completions: no network, and no point sleeping between
        # scripted "retries".
        return Gateway(MockBackend.from_file(fixtures), config, sleep=None)
    if not config.api_key:
        config.api_key = os.environ.get("OPENAI_API_KEY", "")
    backend = HttpBackend(config.base_url, config.api_key, timeout=config.timeout)
    return Gateway(backend, config)


class _LazyGateway:
    """Builds the gateway on first use so stub-only runs never touch
    backend config."""

    def __init__(self, args):
        self._args = args
        self.gateway: Gateway | None = None

    def __call__(self) -> Gateway:
        if self.gateway is None:
            self.gateway = _build_gateway(self._args)
        return self.gateway


def _build_checker(spec: str, lazy_gateway: _LazyGateway):
    if spec == "stub":
        return LexicalStubChecker()
    if spec.startswith("remote:"):
        url = spec[len("remote:"):]
        if not url:
            raise DataError("remote checker needs a URL: remote:http://...")
        return RemoteChecker(url)
    if spec.startswith("llm:"):
        tag = spec[len("llm:"):]
        return LlmChecker(lazy_gateway(), model_tag=tag or None)
    raise DataError(
        f"unknown checker spec {spec!r} (expected stub, remote:URL, or llm:MODEL)"
    )


def _parse_policy(spec: str) -> ThresholdPolicy:
    if spec == "midpoint":
        return ThresholdPolicy("midpoint")
    mode, sep, value = spec.partition(":")
    if mode == "fixed" and sep:
        try:
            return ThresholdPolicy("fixed", float(value))
        except ValueError:
            raise DataError(f"fixed threshold must be a number, got {value!r}")
    if mode == "tuned" and sep:
        return ThresholdPolicy("tuned", None, source=value)
    raise DataError(
        f"unknown policy {spec!r} (expected fixed:T, midpoint, or tuned:FILE)"
    )


def _load_tuned_thresholds(policy: ThresholdPolicy, checker_spec: str,
                           plan: ChunkPlan) -> dict[str, float]:
    path = Path(policy.source)
    if not path.exists():
        raise DataError(
            f"tuned policy needs thresholds from a prior `tune` run; "
            f"{path} does not exist"
        )
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid thresholds file: {exc}")
    if obj.get("checker") != checker_spec:
        raise DataError(
            f"thresholds in {path} were tuned for checker "
            f"{obj.get('checker')!r}, not {checker_spec!r}"
        )
    if obj.get("plan") != str(plan):
        log.warning(
            "thresholds in %s were tuned with plan %s, evaluating with %s",
            path, obj.get("plan"), plan,
        )
    thresholds = obj.get("thresholds")
    if not isinstance(thresholds, dict):
        raise DataError(f"{path}: missing thresholds map")
    return {k: float(v) for k, v in thresholds.items()}


def _policy_for(dataset: str, policy: ThresholdPolicy,
                tuned: dict[str, float] | None) -> ThresholdPolicy:
    if policy.mode != "tuned":
        return policy
    assert tuned is not None
    if dataset not in tuned:
        raise DataError(
            f"no tuned threshold for dataset {dataset!r} in {policy.source}"
        )
    return ThresholdPolicy("tuned", tuned[dataset], source=policy.source)


# ---------------------------------------------------------------------------
# ingest / split
# ---------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    started = utc_now()
    records = []
    seen_ids: set[str] = set()
    for path in args.input:
        for line_no, obj in enumerate(read_jsonl(path), start=1):
            rec = parse_ingest_record(obj, line_no, dataset=args.dataset)
            if rec.grounded.id in seen_ids:
                raise DataError(f"{path}:{line_no}: duplicate record id {rec.grounded.id!r}")
            seen_ids.add(rec.grounded.id)
            records.append(rec)
    if not records:
        raise DataError("no records parsed from input")
    write_records(args.out, records)
    _print_dataset_stats(records)
    write_manifest(args.out, command=sys.argv[1:] or ["ingest"], started=started)
    return EXIT_OK


def _print_dataset_stats(records) -> None:
    print(f"{'Dataset':<20} {'Size':>6} {'DocWords':>9} {'ClaimWords':>11} {'%Neg':>6}")
    by_dataset: dict[str, list] = {}
    for rec in records:
        by_dataset.setdefault(rec.dataset, []).append(rec)
    for name in ordered_datasets(by_dataset.keys()):
        rows = by_dataset[name]
        doc_words = [len(d.text.split()) for r in rows for d in r.grounded.evidence]
        claim_words = [len(r.grounded.text.split()) for r in rows]
        neg = sum(1 for r in rows if r.gold == SupportLabel.UNSUPPORTED)
        print(
            f"{name:<20} {len(rows):>6} {statistics.mean(doc_words):>9.1f} "
            f"{statistics.mean(claim_words):>11.1f} {100 * neg / len(rows):>5.0f}%"
        )


def cmd_split(args) -> int:
    started = utc_now()
    records = read_records(args.records)
    assigned = make_split(records, seed=args.seed, fraction=args.fraction)
    write_records(args.out, assigned)
    n_val = sum(1 for r in assigned if r.split == VALIDATION)
    print(
        f"assigned {n_val} validation / {len(assigned) - n_val} test "
        f"records across {len({r.grounded.query_group for r in assigned})} query groups"
    )
    write_manifest(
        args.out, command=sys.argv[1:], started=started, seeds={"split": args.seed}
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def _read_claims_file(path: str) -> list[tuple[str, str]]:
    claims = []
    seen = set()
    for line_no, obj in enumerate(read_jsonl(path), start=1):
        try:
            cid, text = str(obj["id"]), str(obj["claim"])
        except KeyError as exc:
            raise DataError(f"{path}:{line_no}: claim record missing {exc}")
        if cid in seen:
            raise DataError(f"{path}:{line_no}: duplicate claim id {cid!r}")
        seen.add(cid)
        claims.append((cid, text))
    if not claims:
        raise DataError(f"no claims in {path}")
    return sorted(claims)


def _read_docs(path: str) -> list[EvidenceDoc]:
    p = Path(path)
    docs = []
    if p.is_dir():
        for f in sorted(p.glob("*.txt")):
            docs.append(EvidenceDoc(id=f.stem, text=f.read_text(encoding="utf-8")))
    else:
        for line_no, obj in enumerate(read_jsonl(p), start=1):
            try:
                docs.append(EvidenceDoc(id=str(obj["id"]), text=str(obj["text"])))
            except KeyError as exc:
                raise DataError(f"{path}:{line_no}: document record missing {exc}")
        docs.sort(key=lambda d: d.id)
    if not docs:
        raise DataError(f"no documents found at {path}")
    return docs


def _write_tuples(path: str, tuples, seed: int) -> None:
    # Internal order is deterministic; randomize only at export, under
    # the recorded seed, so training order is not construction order.
    shuffled = list(tuples)
    random.Random(seed).shuffle(shuffled)
    with open(path, "w", encoding="utf-8") as fh:
        for t in shuffled:
            fh.write(
                json.dumps(
                    {
                        "doc": {"id": t.document.id, "text": t.document.text},
                        "claim": t.claim,
                        "label": int(t.label),
                        "pipeline": t.pipeline,
                        "provenance": t.provenance,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def _finish_synth(args, gateway: Gateway, tuples, started: str,
                  extra: dict | None = None) -> int:
    if not tuples:
        raise DataError("synthesis produced no tuples (all datapoints dropped?)")
    _write_tuples(args.out, tuples, seed=args.seed)
    n_neg = sum(1 for t in tuples if int(t.label) == 0)
    print(f"wrote {len(tuples)} tuples ({100 * n_neg / len(tuples):.0f}% negative) to {args.out}")
    if extra:
        for key, value in extra.items():
            print(f"{key}: {value}")
    snapshot = gateway.ledger.snapshot(gateway.config.prices)
    print(f"llm usage: {json.dumps(snapshot['models'])}")
    write_manifest(
        args.out,
        command=sys.argv[1:],
        started=started,
        seeds={"export_shuffle": args.seed},
        backend=gateway.backend_identity(),
        config_path=getattr(args, "config", None),
    )
    return EXIT_OK


def cmd_synth_c2d(args) -> int:
    started = utc_now()
    gateway = _build_gateway(args)
    pipeline = C2DPipeline(gateway, attempts=args.attempts, atom_cap=args.atom_cap)
    tuples = []
    for cid, text in _read_claims_file(args.claims):
        tuples.extend(pipeline.run_claim(cid, text))
    return _finish_synth(
        args, gateway, tuples, started,
        extra={"rejection rates": json.dumps(pipeline.stats.rates())},
    )


def cmd_synth_c2d_simp(args) -> int:
    started = utc_now()
    gateway = _build_gateway(args)
    tuples = []
    for cid, text in _read_claims_file(args.claims):
        tuples.extend(run_c2d_simp(gateway, cid, text))
    return _finish_synth(args, gateway, tuples, started)


def cmd_synth_d2c(args) -> int:
    started = utc_now()
    gateway = _build_gateway(args)
    pipeline = D2CPipeline(gateway, atom_cap=args.atom_cap)
    tuples = []
    for doc in _read_docs(args.docs):
        tuples.extend(pipeline.run_document(doc).tuples)
    return _finish_synth(args, gateway, tuples, started)


def cmd_synth_d2c_simp(args) -> int:
    started = utc_now()
    gateway = _build_gateway(args)
    tuples = []
    for doc in _read_docs(args.docs):
        tuples.extend(run_d2c_simp(gateway, doc))
    return _finish_synth(args, gateway, tuples, started)


# ---------------------------------------------------------------------------
# scoring shared by tune/eval/check
# ---------------------------------------------------------------------------


def _score_records(records, workers: int, decide_fn,
                   decontextualize_with: Gateway | None = None):
    """Score records concurrently; results keyed by record id.

    decide_fn(record, claim_text) -> (score|None, verdict, range|None)
    handles the decompose/plain distinction. Any failure aborts the whole
    run, naming the record.
    """
    results: dict[str, tuple] = {}

    def run_one(rec):
        claim_text = rec.grounded.text
        changed = False
        if decontextualize_with is not None and rec.grounded.context:
            changed, claim_text = decontextualize(
                decontextualize_with, claim_text, rec.grounded.context
            )
        score, verdict, score_range = decide_fn(rec, claim_text)
        return rec.grounded.id, score, verdict, score_range, changed

    if workers <= 1:
        for rec in records:
            try:
                rid, *rest = run_one(rec)
            except ToolkitError as exc:
                raise type(exc)(f"record {rec.grounded.id}: {exc}")
            results[rid] = tuple(rest)
        return results

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(run_one, rec): rec for rec in records}
        for future, rec in futures.items():
            try:
                rid, *rest = future.result()
            except ToolkitError as exc:
                raise type(exc)(f"record {rec.grounded.id}: {exc}")
            results[rid] = tuple(rest)
    return results


def _filter_split(records, split: str):
    if split == "all":
        return records
    kept = [r for r in records if r.split == split]
    if not kept:
        raise DataError(
            f"no records in split {split!r}; run `split` first or pass --split all"
        )
    return kept


def cmd_tune(args) -> int:
    started = utc_now()
    lazy = _LazyGateway(args)
    checker = _build_checker(args.checker, lazy)
    plan = ChunkPlan.parse(args.plan)
    records = _filter_split(read_records(args.records), VALIDATION)

    def decide_fn(rec, claim_text):
        out = score_claim(checker, rec.grounded.evidence, claim_text, plan)
        return out.score, None, out.range

    results = _score_records(records, args.workers, decide_fn)
    by_dataset: dict[str, list] = {}
    for rec in records:
        by_dataset.setdefault(rec.dataset, []).append(rec)
    thresholds: dict[str, float] = {}
    from .metrics import tune_threshold  # local import: keep module deps one-way

    for dataset in sorted(by_dataset):
        rows = sorted(by_dataset[dataset], key=lambda r: r.grounded.id)
        scored = [(results[r.grounded.id][0], int(r.gold)) for r in rows]
        ranges = {results[r.grounded.id][2] for r in rows}
        if len(ranges) != 1:
            raise DataError(f"dataset {dataset!r}: inconsistent checker ranges {ranges}")
        try:
            thresholds[dataset] = tune_threshold(scored, ranges.pop())
        except DataError as exc:
            raise DataError(f"dataset {dataset!r}: {exc}")
        print(f"{dataset}: t={thresholds[dataset]:.6g} over {len(rows)} validation records")
    payload = {"checker": args.checker, "plan": str(plan), "thresholds": thresholds}
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dump_report(payload))
    write_manifest(
        args.out, command=sys.argv[1:], started=started,
        backend=lazy.gateway.backend_identity() if lazy.gateway else checker.name,
        config_path=getattr(args, "config", None),
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    started = utc_now()
    lazy = _LazyGateway(args)
    checker = _build_checker(args.checker, lazy)
    plan = ChunkPlan.parse(args.plan)
    policy = _parse_policy(args.policy)
    tuned = (
        _load_tuned_thresholds(policy, args.checker, plan)
        if policy.mode == "tuned"
        else None
    )
    records = _filter_split(read_records(args.records), args.split)

    def decide_fn(rec, claim_text):
        ds_policy = _policy_for(rec.dataset, policy, tuned)
        if args.decompose:
            verdict = check_decomposed(
                lazy(), checker, rec.grounded.evidence, claim_text, plan, ds_policy
            )
            return None, verdict, None
        out = score_claim(checker, rec.grounded.evidence, claim_text, plan)
        return out.score, decide(out, ds_policy), out.range

    decontext_gateway = lazy() if args.decontextualize else None
    results = _score_records(records, args.workers, decide_fn, decontext_gateway)

    champion_preds: dict[str, int] | None = None
    if args.champion:
        champion_report = load_report(args.champion)
        champion_preds = {
            k: int(v) for k, v in champion_report.get("predictions", {}).items()
        }

    by_dataset: dict[str, list] = {}
    for rec in records:
        by_dataset.setdefault(rec.dataset, []).append(rec)
    datasets: dict[str, dict] = {}
    for dataset in sorted(by_dataset):
        rows = sorted(by_dataset[dataset], key=lambda r: r.grounded.id)
        preds = [int(results[r.grounded.id][1]) for r in rows]
        gold = [int(r.gold) for r in rows]
        counts = ConfusionCounts.from_pairs(preds, gold)
        try:
            value = bacc(counts)
        except DataError as exc:
            raise DataError(f"dataset {dataset!r}: {exc}")
        entry: dict = {
            "n": len(rows),
            "bacc": value,
            "counts": counts.as_dict(),
            "threshold": None,
        }
        ranges = {results[r.grounded.id][2] for r in rows} - {None}
        if not args.decompose and len(ranges) == 1:
            entry["threshold"] = _policy_for(dataset, policy, tuned).resolve(ranges.pop())
        if args.decontextualize:
            entry["decontext_changed_fraction"] = sum(
                1 for r in rows if results[r.grounded.id][3]
            ) / len(rows)
        if champion_preds is not None:
            missing = [r.grounded.id for r in rows if r.grounded.id not in champion_preds]
            if missing:
                raise DataError(
                    f"champion report lacks predictions for {len(missing)} records "
                    f"in {dataset!r} (e.g. {missing[0]!r})"
                )
            result = paired_bootstrap(
                [champion_preds[r.grounded.id] for r in rows],
                preds,
                gold,
                runs=args.bootstrap_runs,
                seed=args.seed,
                alpha=args.alpha,
            )
            entry["champion_p_value"] = result.p_value
            entry["champion_significant"] = result.significant
        datasets[dataset] = entry

    report = {
        "records_file": args.records,
        "checker": args.checker,
        "plan": str(plan),
        "policy": {"mode": policy.mode, "value": policy.value,
                   "source": policy.source or None},
        "split": args.split,
        "decompose": bool(args.decompose),
        "decontextualize": bool(args.decontextualize),
        "seed": args.seed,
        "champion": args.champion or None,
        "bootstrap_runs": args.bootstrap_runs if args.champion else None,
        "alpha": args.alpha if args.champion else None,
        "datasets": datasets,
        "average_bacc": sum(d["bacc"] for d in datasets.values()) / len(datasets),
        "predictions": {rid: int(v[1]) for rid, v in sorted(results.items())},
        "scores": {rid: v[0] for rid, v in sorted(results.items())},
        "cost": (
            lazy.gateway.ledger.snapshot(lazy.gateway.config.prices)
            if lazy.gateway
            else None
        ),
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dump_report(report))
    print(human_table(report))
    write_manifest(
        args.out, command=sys.argv[1:], started=started,
        seeds={"bootstrap": args.seed} if args.champion else {},
        backend=lazy.gateway.backend_identity() if lazy.gateway else checker.name,
        config_path=getattr(args, "config", None),
    )
    return EXIT_OK


def cmd_check(args) -> int:
    lazy = _LazyGateway(args)
    checker = _build_checker(args.checker, lazy)
    plan = ChunkPlan.parse(args.plan)
    policy = _parse_policy(args.policy)
    if policy.mode == "tuned":
        tuned = _load_tuned_thresholds(policy, args.checker, plan)
        if not args.dataset:
            raise DataError("tuned policy needs --dataset to pick a threshold")
        policy = _policy_for(args.dataset, policy, tuned)
    evidence = []
    for path in args.doc:
        text = Path(path).read_text(encoding="utf-8")
        evidence.append(EvidenceDoc(id=path, text=text))
    if args.decompose:
        verdict = check_decomposed(
            lazy(), checker, evidence, args.claim, plan, policy
        )
        payload = {"claim": args.claim, "verdict": verdict.name.lower()}
    else:
        out = score_claim(checker, evidence, args.claim, plan)
        verdict = decide(out, policy)
        payload = {
            "claim": args.claim,
            "verdict": verdict.name.lower(),
            "score": out.score,
            "threshold": policy.resolve(out.range),
        }
    print(json.dumps(payload, ensure_ascii=False))
    return EXIT_OK


def cmd_report(args) -> int:
    print(human_table(load_report(args.report)))
    return EXIT_OK


def cmd_annotate_serve(args) -> int:
    tokens = load_tokens(args.tokens)
    annotators = sorted(i.name for i in tokens.values() if i.role == "annotator")
    store = AnnotationStore(args.log, annotators)
    if args.tasks:
        added = store.load_tasks(read_jsonl(args.tasks))
        print(f"loaded {added} new tasks ({len(store.tasks)} total)")
    ui_dir = args.ui
    if ui_dir is None:
        default_ui = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = str(default_ui) if default_ui.is_dir() else None
    app = make_app(store, tokens, ui_dir)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_backend_flags(p) -> None:
    p.add_argument("--fixtures", help="mock backend fixture JSON (offline runs)")
    p.add_argument("--config", help="gateway config JSON (base_url, api_key, routing, prices)")


def build_parser() -> _Parser:
    parser = _Parser(prog="groundcheck", description=__doc__)
    parser.add_argument("--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="normalize raw benchmark JSONL")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--dataset", help="override the per-record dataset id")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="assign validation/test splits by query group")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--fraction", type=float, default=0.5)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("synth", help="generate synthetic training tuples")
    synth_sub = p.add_subparsers(dest="pipeline", parser_class=_Parser)

    sp = synth_sub.add_parser("c2d", help="claim-to-document pipeline")
    sp.add_argument("--claims", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--attempts", type=int, default=3)
    sp.add_argument("--atom-cap", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    _add_backend_flags(sp)
    sp.set_defaults(func=cmd_synth_c2d)

    sp = synth_sub.add_parser("c2d-simp", help="simplified claim-to-document variant")
    sp.add_argument("--claims", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=0)
    _add_backend_flags(sp)
    sp.set_defaults(func=cmd_synth_c2d_simp)

    sp = synth_sub.add_parser("d2c", help="document-to-claim pipeline")
    sp.add_argument("--docs", required=True, help="JSONL file or directory of .txt files")
    sp.add_argument("--out", required=True)
    sp.add_argument("--atom-cap", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    _add_backend_flags(sp)
    sp.set_defaults(func=cmd_synth_d2c)

    sp = synth_sub.add_parser("d2c-simp", help="simplified document-to-claim variant")
    sp.add_argument("--docs", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=0)
    _add_backend_flags(sp)
    sp.set_defaults(func=cmd_synth_d2c_simp)

    p = sub.add_parser("tune", help="tune per-dataset thresholds on the validation split")
    p.add_argument("--records", required=True)
    p.add_argument("--checker", required=True)
    p.add_argument("--plan", default="whitespace:500")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=4)
    _add_backend_flags(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("eval", help="evaluate a checker on the benchmark")
    p.add_argument("--records", required=True)
    p.add_argument("--checker", required=True)
    p.add_argument("--plan", default="whitespace:500")
    p.add_argument("--policy", default="fixed:0.5")
    p.add_argument("--split", default="test", choices=["validation", "test", "all"])
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--champion", help="prior report to test against (paired bootstrap)")
    p.add_argument("--bootstrap-runs", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decompose", action="store_true",
                   help="check each claim's atomic facts and require all supported")
    p.add_argument("--decontextualize", action="store_true",
                   help="rewrite claims against their context before checking")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", help="check one claim against documents")
    p.add_argument("--checker", required=True)
    p.add_argument("--plan", default="whitespace:500")
    p.add_argument("--policy", default="fixed:0.5")
    p.add_argument("--doc", nargs="+", required=True, help="evidence text file(s)")
    p.add_argument("--claim", required=True)
    p.add_argument("--dataset", help="dataset name for tuned thresholds")
    p.add_argument("--decompose", action="store_true")
    _add_backend_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", help="render a report file as a table")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("annotate-serve", help="run the annotation service")
    p.add_argument("--tasks", help="task definitions JSONL")
    p.add_argument("--log", required=True, help="append-only event log path")
    p.add_argument("--tokens", required=True, help="token config JSON")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8010)
    p.add_argument("--ui", help="static UI bundle directory")
    p.set_defaults(func=cmd_annotate_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not getattr(args, "func", None):
        parser.error("a command is required")
    try:
        return args.func(args)
    except DataError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except BackendError as exc:
        sys.stderr.write(f"backend error: {exc}\n")
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
