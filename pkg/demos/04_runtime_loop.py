# Drive a trained agent through the live action loop: NER -> predict ->
# fill -> execute, with a correction mid-order, and inspect the debug trace.

from dialogkit.domains import load_bundled_corpus, load_bundled_schema
from dialogkit.models import TrainConfig, train_models
from dialogkit.runtime import RuntimeConfig, create_session, handle_utterance
from dialogkit.simulator import SimConfig, generate_dataset

schema = load_bundled_schema("pizzabot")
seeds = load_bundled_corpus("pizzabot", "seeds", schema)
corpus, _ = generate_dataset(seeds, schema, SimConfig(seed=11, num_dialogues=600))
bundle, _ = train_models(corpus, schema, TrainConfig(
    seed=0, emb_dim=16, hidden=24, tagger_hidden=24, window=4, epochs=4, batch_size=48, lr=5e-3))

session = create_session(schema, bundle, config=RuntimeConfig(debug=True), seed=3)
print(f"A: {session.welcome_text}")

script = [
    "i want to order a large pizza",
    "olives, tomatoes and green peppers with thin crust and extra cheese",
    "actually make it small",       # change of mind at the confirmation
    "yes",
    "exit",
]
for utterance in script:
    result = handle_utterance(session, utterance)
    print(f"\nU: {utterance}")
    if result.mentions:
        print("   entities:", [(m["value"], m["entity_type"]) for m in result.mentions])
    for step in result.steps:
        top = sorted(step.distribution.items(), key=lambda kv: -kv[1])[:2]
        top_str = ", ".join(f"{n} {p:.2f}" for n, p in top)
        print(f"   [{step.bin}] {step.chosen}   ({top_str})")
    print(f"A: {result.agent_text}")
    if result.ended:
        break

# the size in the final order reflects the correction
orders = [e for e in session.history.events if e.kind == "api" and e.name == "OrderPizza"]
if orders:
    size_binding = orders[-1].args.get("size")
    size_var = size_binding.var if size_binding else None
    print(f"\nOrderPizza executed with size = {session.history.variables[size_var].value!r}")
