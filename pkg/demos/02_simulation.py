# Blow seven seed dialogues up into a corpus: goal sampling, self-play,
# corrections, offers, cooperative-user variation, and the base-sampler
# baseline for comparison.

import numpy as np

from dialogkit.dialogue import UserUtterance, validate_dialogue
from dialogkit.domains import load_bundled_corpus, load_bundled_schema
from dialogkit.simulator import SimConfig, generate_dataset
from dialogkit.simulator.generate import simulate_dialogue

schema = load_bundled_schema("pizzabot")
seeds = load_bundled_corpus("pizzabot", "seeds", schema)

# one dialogue with every variation source switched on
cfg = SimConfig(seed=7, p_correction=1.0, p_over_cooperative=1.0, p_proactive_offer=1.0)
dialogue, info = simulate_dialogue(seeds, schema, cfg, np.random.default_rng([7, 3]))
print(f"one simulated dialogue ({info}):\n")
for e in dialogue.events:
    if isinstance(e, UserUtterance):
        print(f"U: {e.text}")
    elif e.kind == "api":
        print(f"A: call {e.name} -> {e.return_var}")
    elif e.kind == "nlg":
        print(f"A: {e.name}")

# a corpus, with generation statistics
corpus, stats = generate_dataset(seeds, schema, SimConfig(seed=1, num_dialogues=500))
valid = sum(validate_dialogue(d, schema).ok for d in corpus)
print(f"\nfull simulator: {len(corpus)} dialogues, {valid} valid")
print({k: v for k, v in stats.items() if k != "cooperation"})
print("cooperation mix:", stats["cooperation"])

# the base sampler keeps seed structure and only varies surface values
base, base_stats = generate_dataset(seeds, schema, SimConfig(seed=1, num_dialogues=500, mode="base"))
seed_structures = {tuple(s.api_skeleton()) for s in seeds}
novel = sum(tuple(d.api_skeleton()) not in seed_structures for d in base)
print(f"\nbase sampler: {len(base)} dialogues, {novel} with novel call structure (must be 0)")
