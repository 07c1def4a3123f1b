"""Release gate: every criterion runs at its stated tolerance and prints one
pass/fail line. Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import itertools
import json
import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from dialogkit.ablation import AblationConfig, dynamic_catalogue_ablation, run_ablation
from dialogkit.cli import main as cli_main
from dialogkit.dialogue import validate_dialogue
from dialogkit.domains import pizzabot, ticketbot
from dialogkit.evaluate import build_turn_evals
from dialogkit.metrics import asp_accuracy
from dialogkit.models import TrainConfig, train_models
from dialogkit.nn import CrfLayer, ParamStore, crf_log_partition, crf_viterbi, finite_diff_check
from dialogkit.runtime import create_session, handle_utterance
from dialogkit.simulator import SimConfig, generate_dataset

pytestmark = pytest.mark.acceptance


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# 1. CRF oracle
# ---------------------------------------------------------------------------


def test_crf_oracle_against_enumeration():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        T = int(rng.integers(1, 5))
        L = int(rng.integers(1, 6))
        store = ParamStore(seed=0)
        crf = CrfLayer(store, "crf", T)
        crf.trans.value[...] = rng.normal(size=(T, T)) * 2
        crf.start.value[...] = rng.normal(size=T) * 2
        crf.stop.value[...] = rng.normal(size=T) * 2
        em = rng.normal(size=(L, T)) * 2

        scores = []
        for path in itertools.product(range(T), repeat=L):
            s = crf.start.value[path[0]] + em[0, path[0]]
            for i in range(1, L):
                s += crf.trans.value[path[i - 1], path[i]] + em[i, path[i]]
            s += crf.stop.value[path[-1]]
            scores.append((list(path), s))
        values = [s for _p, s in scores]
        m = max(values)
        brute_log_z = m + math.log(sum(math.exp(v - m) for v in values))
        best = max(values)
        brute_path = min((p for p, s in scores if abs(s - best) < 1e-12),
                         key=lambda p: tuple(reversed(p)))

        worst = max(worst, abs(crf_log_partition(crf, em) - brute_log_z))
        path, score = crf_viterbi(crf, em)
        assert path == brute_path, "Viterbi path deviates from exhaustive argmax"
        assert abs(score - best) < 1e-8
    elapsed = time.time() - t0
    _report("CRF oracle", worst < 1e-8 and elapsed < 10.0,
            f"200 instances, max |logZ - enumeration| = {worst:.2e}, exact paths, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 2. Gradient suite
# ---------------------------------------------------------------------------


def test_gradient_suite():
    from dialogkit.models import AfConfig, AfModel, ApConfig, ApModel, NerConfig, NerModel
    from dialogkit.models.train import af_examples, ap_examples, ner_examples
    from dialogkit.models.vocab import build_vocab
    from dialogkit.encoder import EncoderConfig
    from dialogkit.nn import BiLstm, Embedding, Linear, Lstm, softmax_xent
    from dialogkit.nn.crf import crf_nll_batch
    from dialogkit.nn.layers import mean_pool, mean_pool_backward

    t0 = time.time()
    errors: dict[str, float] = {}

    # individual layers
    store = ParamStore(seed=11)
    lin = Linear(store, "lin", 5, 4)
    x = np.random.default_rng(2).normal(size=(6, 5))
    gold = np.array([0, 1, 2, 3, 1, 0])

    def lin_loss(s):
        y, cache = lin.forward(x)
        l, dy, _ = softmax_xent(y, gold)
        lin.backward(cache, dy)
        return l

    errors["linear+softmax"] = finite_diff_check(lin_loss, store)

    store = ParamStore(seed=13)
    lstm = Lstm(store, "l", 3, 4)
    head = Linear(store, "h", 4, 2)
    xs = np.random.default_rng(3).normal(size=(3, 4, 3))
    mask = np.array([[1, 1, 1, 1], [1, 1, 0, 0], [1, 0, 0, 0]], dtype=np.float64)
    gold2 = np.array([0, 1, 0])

    def lstm_loss(s):
        hs, (h, c), cache = lstm.forward(xs, mask)
        y, hc = head.forward(h)
        l, dy, _ = softmax_xent(y, gold2)
        dh = head.backward(hc, dy)
        lstm.backward(cache, None, dh_final=dh)
        return l

    errors["lstm(masked)"] = finite_diff_check(lstm_loss, store)

    store = ParamStore(seed=17)
    emb = Embedding(store, "e", 7, 3)
    bi = BiLstm(store, "b", 3, 3)
    out = Linear(store, "o", 6, 2)
    ids = np.array([[1, 2, 3], [4, 5, 0]])
    bmask = np.array([[1, 1, 1], [1, 1, 0]], dtype=np.float64)

    def bi_loss(s):
        vecs, ec = emb.forward(ids)
        hs, _f, bc = bi.forward(vecs, bmask)
        pooled, mc = mean_pool(hs, bmask)
        y, oc = out.forward(pooled)
        l, dy, _ = softmax_xent(y, np.array([0, 1]))
        dp = out.backward(oc, dy)
        dhs = mean_pool_backward(mc, dp)
        dv = bi.backward(bc, dhs)
        emb.backward(ec, dv)
        return l

    errors["bilstm+embedding+pool"] = finite_diff_check(bi_loss, store)

    store = ParamStore(seed=19)
    crf = CrfLayer(store, "crf", 3)
    rng = np.random.default_rng(9)
    crf.trans.value[...] = rng.normal(size=(3, 3))
    crf.start.value[...] = rng.normal(size=3)
    crf.stop.value[...] = rng.normal(size=3)
    em_p = store.add("em", (2, 4, 3))
    em_p.value[...] = rng.normal(size=(2, 4, 3))
    tags = rng.integers(0, 3, size=(2, 4))

    def crf_loss(s):
        loss, dem = crf_nll_batch(crf, s["em"].value, tags)
        s["em"].grad += dem
        return loss

    errors["crf-nll"] = finite_diff_check(crf_loss, store, epsilon=1e-6)

    # full model losses on toy instances (5-token utterances, small dims)
    schema = ticketbot.schema()
    seeds = ticketbot.seeds(schema)
    corpus, _ = generate_dataset(seeds, schema, SimConfig(seed=5, num_dialogues=4))
    vocab = build_vocab(schema, [corpus])
    enc_cfg = dict(emb_dim=4, hidden=3, type_dim=2, source_dim=2, recency_dim=2,
                   action_dim=3, window=3)

    ner = NerModel(vocab, schema, NerConfig(encoder=EncoderConfig(**enc_cfg), tagger_hidden=3), seed=4)
    ner_exs = []
    for d in corpus[:2]:
        ner_exs.extend(ner_examples(d, schema, ner, window=3))
    by_len: dict[int, list] = {}
    for ex in ner_exs:
        by_len.setdefault(len(ex["tokens"]), []).append(ex)
    ner_batch = max(by_len.values(), key=len)[:3]
    errors["ner-full-loss"] = finite_diff_check(
        lambda s: ner.loss_batch(ner_batch), ner.store, max_coords_per_param=25)

    ap = ApModel(vocab, ApConfig(encoder=EncoderConfig(**enc_cfg)), seed=2)
    ap_exs = []
    for d in corpus[:2]:
        ap_exs.extend(ap_examples(d, schema, vocab, window=3))
    ap_exs = ap_exs[:4]
    ap_gold = np.array([ex["gold"] for ex in ap_exs])
    ap_ctx = [ex["context"] for ex in ap_exs]
    ap_packed = ap.encoder.encode_examples(ap_ctx)
    errors["ap-full-loss"] = finite_diff_check(
        lambda s: ap.loss_batch(ap_ctx, ap_gold, packed=ap_packed), ap.store,
        max_coords_per_param=30)

    af = AfModel(vocab, AfConfig(encoder=EncoderConfig(
        emb_dim=4, type_dim=2, source_dim=2, recency_dim=2, blocks=())), seed=3)
    af_exs = []
    for d in corpus:
        af_exs.extend(af_examples(d, schema, vocab, window=3))
    af_exs = af_exs[:5]
    af_ctx = [ex["context"] for ex in af_exs]
    af_packed = af.encoder.encode_examples(af_ctx)
    M = af_packed["men_ids"].shape[1]
    tmasks = np.zeros((len(af_exs), M + 1))
    for i, ex in enumerate(af_exs):
        tmasks[i] = af.type_mask(ex["context"], ex["entity_type"], M)
    errors["af-full-loss"] = finite_diff_check(
        lambda s: af.loss_batch(af_ctx,
                                np.array([ex["action_id"] for ex in af_exs]),
                                np.array([ex["arg_id"] for ex in af_exs]),
                                [ex["golds"] for ex in af_exs], tmasks, packed=af_packed),
        af.store, max_coords_per_param=30)

    elapsed = time.time() - t0
    worst = max(errors.values())
    detail = ", ".join(f"{k}={v:.1e}" for k, v in errors.items())
    _report("Gradient suite", worst < 1e-4 and elapsed < 120.0,
            f"max rel err {worst:.2e} ({detail}), {elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 3. Simulator validity
# ---------------------------------------------------------------------------


def test_simulator_validity_and_correction_rate():
    t0 = time.time()
    schema = pizzabot.schema()
    seeds = pizzabot.seeds(schema)
    probs = ["p_correction", "p_over_cooperative", "p_under_cooperative",
             "p_proactive_offer", "p_api_failure"]
    invalid = 0
    total = 0
    for pi, prob in enumerate(probs):
        for value in (0.0, 1.0):
            kw = {q: 0.0 for q in probs}
            kw[prob] = value
            cfg = SimConfig(seed=500 + 10 * pi + int(value), num_dialogues=1000, **kw)
            dialogues, _stats = generate_dataset(seeds, schema, cfg)
            # goal attainment is enforced inside generation (it raises on miss)
            for d in dialogues:
                total += 1
                if not validate_dialogue(d, schema).ok:
                    invalid += 1
    ds, stats = generate_dataset(seeds, schema, SimConfig(seed=641, num_dialogues=1000,
                                                          p_correction=0.3))
    for d in ds:
        total += 1
        if not validate_dialogue(d, schema).ok:
            invalid += 1
    rate = stats["dialogues_with_corrections"] / 1000
    elapsed = time.time() - t0
    _report("Simulator validity",
            invalid == 0 and 0.25 <= rate <= 0.35 and elapsed < 60.0,
            f"{total} dialogues across corners, {invalid} invalid, goals attained, "
            f"correction rate {rate:.3f} at p=0.3, {elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 4. Simulator-vs-base-sampler directional comparison
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_simulator_ablation_direction():
    t0 = time.time()
    schema = pizzabot.schema()
    seeds = pizzabot.seeds(schema)
    assert len(seeds) == 7
    cfg = AblationConfig(runs=5, num_dialogues=2000, test_dialogues=300, seed=0)
    report = run_ablation(schema, seeds, cfg, workers=1)
    m = report["metrics"]
    ner_delta = m["ner_f1"]["absolute_delta"]["mean"]
    ap_delta = m["ap_accuracy"]["absolute_delta"]["mean"]
    asp_delta = m["asp_accuracy"]["absolute_delta"]["mean"]
    elapsed = time.time() - t0
    rel = {k: m[k]["relative_delta"] for k in m}
    _report("Simulator ablation",
            ner_delta >= 0.05 and ap_delta >= 0.05 and asp_delta >= 0.10 and elapsed < 45 * 60,
            f"5 runs x 2000 dialogues: dNER {ner_delta * 100:+.1f}pt, dAP {ap_delta * 100:+.1f}pt, "
            f"dASP {asp_delta * 100:+.1f}pt (relative {rel['ner_f1'] * 100:+.1f}% / "
            f"{rel['ap_accuracy'] * 100:+.1f}% / {rel['asp_accuracy'] * 100:+.1f}%), "
            f"{elapsed / 60:.1f} min")


# ---------------------------------------------------------------------------
# 5. Dynamic catalogue ablation
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_dynamic_catalogue_ablation():
    t0 = time.time()
    schema = ticketbot.schema()
    seeds = ticketbot.seeds(schema)
    res = dynamic_catalogue_ablation(schema, seeds, entity_type="Movie",
                                     num_dialogues=800, test_dialogues=250, seed=0)
    elapsed = time.time() - t0
    _report("Dynamic catalogue ablation",
            res["f1_delta"] >= 0.05 and elapsed < 600.0,
            f"Movie-slot F1 {res['dynamic_on']['f1']:.3f} with vs "
            f"{res['dynamic_off']['f1']:.3f} without (+{res['f1_delta'] * 100:.1f}pt) on "
            f"{res['dynamic_on']['utterances']} API-return-derived turns, {elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 6. Scripted anaphora replay through the chat CLI
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_scripted_anaphora_replay(tmp_path, capsys):
    t0 = time.time()
    schema = ticketbot.schema()
    seeds = ticketbot.seeds(schema)
    corpus, _ = generate_dataset(seeds, schema,
                                 SimConfig(seed=42, num_dialogues=800, p_proactive_offer=0.0))
    from dialogkit.dialogue import save_corpus

    corpus_path = tmp_path / "ticket.jsonl"
    save_corpus(corpus, corpus_path)
    bundle_dir = tmp_path / "ticket_bundle"
    assert cli_main(["train", "--schema", "ticketbot", "--corpus", str(corpus_path),
                     "--out-bundle", str(bundle_dir), "--epochs", "4", "--emb-dim", "16",
                     "--hidden", "24", "--window", "4", "--batch-size", "48",
                     "--lr", "5e-3"]) == 0
    replay = tmp_path / "replay.txt"
    replay.write_text("how long is la la land\nwho stars in it\nexit\n", encoding="utf-8")
    capsys.readouterr()
    assert cli_main(["chat", "--bundle", str(bundle_dir), "--replay", str(replay),
                     "--seed", "7", "--json"]) == 0
    turns = [json.loads(l) for l in capsys.readouterr().out.splitlines() if l.strip()]
    got = [[a["name"] for a in t["actions"]] for t in turns]
    want = [["GetDuration", "inform_movie_duration", "EndTurn"],
            ["GetCast", "inform_movie_cast", "EndTurn"],
            ["stop", "EndDialogue"]]
    titles = {a["args"].get("movieTitle") for t in turns for a in t["actions"]
              if "movieTitle" in a.get("args", {})}
    elapsed = time.time() - t0
    _report("Scripted anaphora replay",
            got == want and titles == {"la la land"} and turns[-1]["ended"],
            f"actions {got}, movieTitle bindings {sorted(titles)}, {elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 7. Overfit sanity
# ---------------------------------------------------------------------------


def test_overfit_single_dialogue():
    t0 = time.time()
    schema = pizzabot.schema()
    single = [pizzabot.seeds(schema)[1]]  # correction + over-cooperation seed
    cfg = TrainConfig(seed=0, emb_dim=12, hidden=16, tagger_hidden=16, window=8,
                      epochs=200, batch_size=16, lr=5e-3, holdout_fraction=0.0)
    bundle, _train_report = train_models(single, schema, cfg)
    evals = build_turn_evals(bundle, single)
    ap, asp = asp_accuracy(evals)
    elapsed = time.time() - t0
    _report("Overfit sanity", asp == 1.0,
            f"200 epochs on one dialogue: turn-level ASP {asp:.3f} over {len(evals)} turns, {elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 8. Determinism of simulate / train / eval
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_cli_byte_reproducibility(tmp_path):
    t0 = time.time()
    outs = []
    for tag in ("a", "b"):
        corpus = tmp_path / f"corpus_{tag}.jsonl"
        assert cli_main(["simulate", "--schema", "pizzabot", "--seeds", "pizzabot",
                         "--out", str(corpus), "--num", "40", "--seed", "5"]) == 0
        bundle_dir = tmp_path / f"bundle_{tag}"
        assert cli_main(["train", "--schema", "pizzabot", "--corpus", str(corpus),
                         "--out-bundle", str(bundle_dir), "--epochs", "1",
                         "--emb-dim", "12", "--hidden", "12", "--window", "3",
                         "--batch-size", "32"]) == 0
        test_corpus = tmp_path / f"test_{tag}.jsonl"
        assert cli_main(["simulate", "--schema", "pizzabot", "--seeds", "pizzabot",
                         "--out", str(test_corpus), "--num", "10", "--seed", "99"]) == 0
        report = tmp_path / f"eval_{tag}.json"
        assert cli_main(["eval", "--bundle", str(bundle_dir), "--test", str(test_corpus),
                         "--report", str(report)]) == 0
        outs.append({
            "corpus": corpus.read_bytes(),
            "stats": (tmp_path / f"corpus_{tag}.stats.json").read_bytes(),
            "ner": (bundle_dir / "ner.ckpt").read_bytes(),
            "ap": (bundle_dir / "ap.ckpt").read_bytes(),
            "af": (bundle_dir / "af.ckpt").read_bytes(),
            "vocab": (bundle_dir / "vocab.json").read_bytes(),
            "eval": report.read_bytes(),
        })
    same = {k for k in outs[0] if outs[0][k] == outs[1][k]}
    diff = set(outs[0]) - same
    elapsed = time.time() - t0
    _report("Determinism", not diff,
            f"simulate/train/eval byte-identical across two runs "
            f"({', '.join(sorted(same))}), {elapsed:.0f}s"
            + (f"; DIFFERING: {sorted(diff)}" if diff else ""))
