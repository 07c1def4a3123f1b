"""Command-line surface.

Subcommands: validate, simulate, train, eval, ablation, chat, serve.
Exit codes: 0 success, 1 validation findings, 2 errors. Reports are written
as JSON and echoed as plain tables.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ablation import AblationConfig, dynamic_catalogue_ablation, run_ablation
from .dialogue import DialogueError, load_corpus, save_corpus, validate_dialogue
from .domains import BUNDLED_DOMAINS, load_bundled_corpus, load_bundled_schema
from .evaluate import evaluate_bundle
from .models import TrainConfig, load_bundle, save_bundle, train_models
from .models.bundle import BundleError
from .runtime import ApiExecutor, RuntimeConfig, SessionEnded, create_session, handle_utterance
from .schema import DomainSchema, SchemaError, load_domain
from .simulator import SimConfig, generate_dataset


def _load_schema(spec: str) -> DomainSchema:
    if spec in BUNDLED_DOMAINS:
        return load_bundled_schema(spec)
    return load_domain(spec)


def _load_seeds(spec: str, schema: DomainSchema):
    if spec in BUNDLED_DOMAINS:
        return load_bundled_corpus(spec, "seeds", schema)
    return load_corpus(spec, schema)


def _table(rows: list[tuple], header: tuple | None = None) -> str:
    data = ([header] if header else []) + [tuple(str(c) for c in r) for r in rows]
    if not data:
        return ""
    widths = [max(len(str(r[i])) for r in data) for i in range(len(data[0]))]
    lines = []
    for i, row in enumerate(data):
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))
        if header and i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def cmd_validate(args) -> int:
    schema = _load_schema(args.schema)
    print(f"schema ok: {len(schema.apis)} APIs, {len(schema.entity_types)} entity types, "
          f"{len(schema.nlg_responses)} NLG responses, {len(schema.user_templates)} user templates")
    findings = 0
    for path in args.dialogues:
        for li, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
            if not line.strip():
                continue
            from .dialogue import dialogue_from_json

            d = dialogue_from_json(json.loads(line))
            report = validate_dialogue(d, schema)
            for f in report.findings:
                findings += 1
                print(f"{path}:{li + 1} [event {f.event_index}] {f.code}: {f.message}")
    if args.dialogues:
        print(f"{findings} finding(s)")
    return 1 if findings else 0


def cmd_simulate(args) -> int:
    schema = _load_schema(args.schema)
    seeds = _load_seeds(args.seeds, schema)
    cfg = SimConfig(
        seed=args.seed, num_dialogues=args.num, mode=args.mode,
        p_correction=args.p_correction, p_over_cooperative=args.p_over,
        p_under_cooperative=args.p_under, p_proactive_offer=args.p_offer,
        p_api_failure=args.p_api_failure,
    )
    dialogues, stats = generate_dataset(seeds, schema, cfg)
    save_corpus(dialogues, args.out)
    stats_path = args.stats or str(Path(args.out).with_suffix("")) + ".stats.json"
    Path(stats_path).write_text(json.dumps(stats, indent=2, sort_keys=True), encoding="utf-8")
    print(f"wrote {len(dialogues)} dialogues to {args.out}")
    print(_table(sorted((k, v) for k, v in stats.items() if not isinstance(v, dict))))
    return 0


def cmd_train(args) -> int:
    schema = _load_schema(args.schema)
    corpus = load_corpus(args.corpus, schema if args.validate_corpus else None)
    cfg = TrainConfig(
        seed=args.seed, epochs=args.epochs, batch_size=args.batch_size, lr=args.lr,
        emb_dim=args.emb_dim, hidden=args.hidden, tagger_hidden=args.hidden,
        window=args.window, max_examples_per_epoch=args.max_examples,
        use_dynamic_catalogs=not args.no_dynamic_catalogs,
    )
    bundle, report = train_models(corpus, schema, cfg)
    save_bundle(bundle, args.out_bundle)
    report_path = Path(args.out_bundle) / "training_report.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
    print(f"bundle written to {args.out_bundle}")
    for model in ("ner", "ap", "af"):
        rows = [(e["epoch"], f"{e['loss']:.4f}",
                 f"{e.get('heldout_f1', e.get('heldout_acc', float('nan'))):.3f}")
                for e in report.get(model, [])]
        print(f"\n{model}:")
        print(_table(rows, header=("epoch", "loss", "heldout")))
    return 0


def cmd_eval(args) -> int:
    bundle = load_bundle(args.bundle)
    corpus = load_corpus(args.test, bundle.schema)
    res = evaluate_bundle(bundle, corpus)
    if args.report:
        Path(args.report).write_text(json.dumps(res, indent=2, sort_keys=True), encoding="utf-8")
    print(_table([
        ("NER span F1", f"{res['ner']['f1']:.4f}"),
        ("NER precision", f"{res['ner']['precision']:.4f}"),
        ("NER recall", f"{res['ner']['recall']:.4f}"),
        ("AP accuracy", f"{res['ap_accuracy']:.4f}"),
        ("ASP accuracy", f"{res['asp_accuracy']:.4f}"),
        ("turns", res["turns"]),
    ]))
    return 0


def cmd_ablation(args) -> int:
    schema = _load_schema(args.schema)
    seeds = _load_seeds(args.seeds, schema)
    if args.dynamic_catalogue:
        res = dynamic_catalogue_ablation(schema, seeds, entity_type=args.entity_type,
                                         num_dialogues=args.num, test_dialogues=args.test_num,
                                         seed=args.seed)
        print(_table([
            ("F1 with dynamic catalogues", f"{res['dynamic_on']['f1']:.4f}"),
            ("F1 without", f"{res['dynamic_off']['f1']:.4f}"),
            ("absolute delta", f"{res['f1_delta']:+.4f}"),
        ]))
    else:
        cfg = AblationConfig(runs=args.runs, num_dialogues=args.num,
                             test_dialogues=args.test_num, seed=args.seed)
        res = run_ablation(schema, seeds, cfg, workers=args.workers)
        rows = []
        for metric, stats in res["metrics"].items():
            rel = stats["relative_delta"]
            rows.append((metric, f"{stats['treatment']['mean']:.4f}",
                         f"{stats['baseline']['mean']:.4f}",
                         f"{stats['absolute_delta']['mean']:+.4f}",
                         f"{rel * 100:+.2f}%" if rel is not None else "n/a"))
        print(_table(rows, header=("metric", "full", "base", "abs delta", "rel delta")))
    if args.out:
        Path(args.out).write_text(json.dumps(res, indent=2, sort_keys=True), encoding="utf-8")
        print(f"report written to {args.out}")
    return 0


def cmd_chat(args) -> int:
    bundle = load_bundle(args.bundle)
    executor = ApiExecutor(bundle.schema, rng=np.random.default_rng([args.seed, 404]))
    session = create_session(bundle.schema, bundle, executor,
                             RuntimeConfig(debug=args.debug), seed=args.seed)
    transcript = []

    def emit_turn(utterance: str) -> bool:
        result = handle_utterance(session, utterance)
        record = {
            "utterance": utterance,
            "actions": [{"name": e["name"], "args": e["args"]} for e in result.executed],
            "agent_text": result.agent_text,
            "ended": result.ended,
        }
        if args.debug:
            record["entities"] = result.mentions
            record["steps"] = [
                {"chosen": s.chosen, "bin": s.bin,
                 "top": sorted(s.distribution.items(), key=lambda kv: -kv[1])[:3]}
                for s in result.steps
            ]
        transcript.append(record)
        if args.json:
            print(json.dumps(record, ensure_ascii=False))
        else:
            print(f"A: {result.agent_text}")
            if args.debug:
                for step in record.get("steps", []):
                    print(f"   [{step['bin']}] {step['chosen']}  {step['top']}")
        return result.ended

    if not args.json:
        print(f"A: {session.welcome_text}")
    if args.replay:
        for line in Path(args.replay).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            if not args.json:
                print(f"U: {line}")
            if emit_turn(line):
                break
        return 0
    try:
        while session.status == "active":
            line = input("U: ").strip()
            if not line:
                continue
            if emit_turn(line):
                break
    except (EOFError, KeyboardInterrupt):
        print()
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    bundle = load_bundle(args.bundle)
    server = serve(bundle, port=args.port, host=args.host, seed=args.seed,
                   log_dir=args.log_dir)
    print(f"serving on http://{args.host}:{server.server_port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown_gracefully()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dialogkit",
                                description="Goal-oriented dialogue agents from seed dialogues.")
    p.add_argument("--version", action="version", version=f"dialogkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a schema and dialogue files")
    v.add_argument("schema", help="schema JSON path or bundled domain name")
    v.add_argument("dialogues", nargs="*", help="dialogue JSONL files")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="generate a training corpus")
    s.add_argument("--schema", required=True)
    s.add_argument("--seeds", required=True, help="seed JSONL path or bundled domain name")
    s.add_argument("--out", required=True)
    s.add_argument("--num", type=int, default=1000)
    s.add_argument("--mode", choices=("full", "base"), default="full")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stats", default=None)
    s.add_argument("--p-correction", type=float, default=0.3)
    s.add_argument("--p-over", type=float, default=0.25)
    s.add_argument("--p-under", type=float, default=0.15)
    s.add_argument("--p-offer", type=float, default=0.3)
    s.add_argument("--p-api-failure", type=float, default=0.05)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("train", help="train the three models from a corpus")
    t.add_argument("--schema", required=True)
    t.add_argument("--corpus", required=True)
    t.add_argument("--out-bundle", required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--epochs", type=int, default=3)
    t.add_argument("--batch-size", type=int, default=64)
    t.add_argument("--lr", type=float, default=3e-3)
    t.add_argument("--emb-dim", type=int, default=32)
    t.add_argument("--hidden", type=int, default=64)
    t.add_argument("--window", type=int, default=8)
    t.add_argument("--max-examples", type=int, default=0)
    t.add_argument("--no-dynamic-catalogs", action="store_true")
    t.add_argument("--validate-corpus", action="store_true")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a bundle on a test corpus")
    e.add_argument("--bundle", required=True)
    e.add_argument("--test", required=True)
    e.add_argument("--report", default=None)
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("ablation", help="full-simulator vs base-sampler experiment")
    a.add_argument("--schema", required=True)
    a.add_argument("--seeds", required=True)
    a.add_argument("--runs", type=int, default=5)
    a.add_argument("--num", type=int, default=2000)
    a.add_argument("--test-num", type=int, default=300)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--workers", type=int, default=1)
    a.add_argument("--out", default=None)
    a.add_argument("--dynamic-catalogue", action="store_true",
                   help="run the NER dynamic-catalogue feature ablation instead")
    a.add_argument("--entity-type", default="Movie")
    a.set_defaults(func=cmd_ablation)

    c = sub.add_parser("chat", help="terminal REPL against a trained bundle")
    c.add_argument("--bundle", required=True)
    c.add_argument("--replay", default=None, help="file of utterances to replay")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--debug", action="store_true")
    c.add_argument("--json", action="store_true", help="one JSON object per turn")
    c.set_defaults(func=cmd_chat)

    r = sub.add_parser("serve", help="HTTP service for live sessions")
    r.add_argument("--bundle", required=True)
    r.add_argument("--port", type=int, default=8311)
    r.add_argument("--host", default="127.0.0.1")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--log-dir", default=None)
    r.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, DialogueError, BundleError, SessionEnded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
