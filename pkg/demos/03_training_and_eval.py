# Train the three models on simulated data and evaluate per-turn: NER span
# F1, action-prediction accuracy, and full action-signature accuracy.

from dialogkit.domains import load_bundled_corpus, load_bundled_schema
from dialogkit.evaluate import evaluate_bundle
from dialogkit.models import TrainConfig, train_models
from dialogkit.simulator import SimConfig, generate_dataset

schema = load_bundled_schema("pizzabot")
seeds = load_bundled_corpus("pizzabot", "seeds", schema)

corpus, _ = generate_dataset(seeds, schema, SimConfig(seed=11, num_dialogues=600))
print(f"training corpus: {len(corpus)} dialogues")

cfg = TrainConfig(seed=0, emb_dim=16, hidden=24, tagger_hidden=24, window=4,
                  epochs=3, batch_size=48, lr=5e-3)
bundle, report = train_models(corpus, schema, cfg)
print("example counts:", report["examples"])
for model in ("ner", "ap", "af"):
    last = report[model][-1]
    held = last.get("heldout_f1", last.get("heldout_acc"))
    print(f"  {model}: final loss {last['loss']:.3f}, heldout {held:.3f}")

# held-out full-simulator test split (disjoint seed)
test, _ = generate_dataset(seeds, schema, SimConfig(seed=999, num_dialogues=60))
res = evaluate_bundle(bundle, test)
print(f"\nheld-out eval over {res['turns']} turns:")
print(f"  NER span F1 {res['ner']['f1']:.3f}  AP {res['ap_accuracy']:.3f}  ASP {res['asp_accuracy']:.3f}")

# the hand-written challenge set stresses corrections, anaphora, cooperation
challenge = load_bundled_corpus("pizzabot", "challenge", schema)
res = evaluate_bundle(bundle, challenge)
print(f"challenge set ({len(challenge)} dialogues):")
print(f"  NER span F1 {res['ner']['f1']:.3f}  AP {res['ap_accuracy']:.3f}  ASP {res['asp_accuracy']:.3f}")
