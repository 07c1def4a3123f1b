# Reproduce the two headline experiments at demo scale: the full-simulator
# vs base-sampler comparison, and the dynamic catalogue NER ablation.
# (The release-gate versions with full sizes live in tests/test_acceptance.py.)

from dialogkit.ablation import AblationConfig, dynamic_catalogue_ablation, run_ablation
from dialogkit.domains import load_bundled_corpus, load_bundled_schema

schema = load_bundled_schema("pizzabot")
seeds = load_bundled_corpus("pizzabot", "seeds", schema)

cfg = AblationConfig(runs=1, num_dialogues=500, test_dialogues=120, seed=0)
report = run_ablation(schema, seeds, cfg)
print("simulator ablation (1 demo run, 500 dialogues per arm):")
for metric, stats in report["metrics"].items():
    rel = stats["relative_delta"]
    print(f"  {metric:14s} full {stats['treatment']['mean']:.3f} "
          f"base {stats['baseline']['mean']:.3f} "
          f"delta {stats['absolute_delta']['mean'] * 100:+.1f}pt "
          f"({rel * 100:+.1f}% relative)" if rel is not None else "")

tschema = load_bundled_schema("ticketbot")
tseeds = load_bundled_corpus("ticketbot", "seeds", tschema)
res = dynamic_catalogue_ablation(tschema, tseeds, num_dialogues=700, test_dialogues=200, seed=0)
print("\ndynamic catalogue ablation (Movie slot, API-return-derived turns):")
print(f"  with feature    F1 {res['dynamic_on']['f1']:.3f}")
print(f"  without feature F1 {res['dynamic_off']['f1']:.3f}")
print(f"  delta {res['f1_delta'] * 100:+.1f}pt over {res['dynamic_on']['utterances']} turns")
