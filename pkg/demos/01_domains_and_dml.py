# Walk through the developer inputs: a domain schema and annotated seed
# dialogues, plus validation and cross-turn reference resolution.

from dialogkit.dialogue import resolve_references, serialize_dialogue, validate_dialogue
from dialogkit.domains import load_bundled_corpus, load_bundled_schema
from dialogkit.schema import serialize_domain

schema = load_bundled_schema("ticketbot")
print(f"Ticketbot: {len(schema.apis)} APIs, {len(schema.entity_types)} entity types")
for api in schema.apis:
    args = ", ".join(f"{a.name}:{a.entity_type}{'?' if not a.required else ''}" for a in api.args)
    ret = f" -> {api.return_type}" if api.return_type else ""
    confirm = " [confirms]" if api.confirm_before_call else ""
    print(f"  {api.name}({args}){ret}{confirm}")

seeds = load_bundled_corpus("ticketbot", "seeds", schema)
print(f"\n{len(seeds)} seed dialogues. The first one (duration, then cast by anaphora):\n")
d = seeds[0]
for e in d.events:
    if e.kind == "user":
        spans = ", ".join(f"[{a.start},{a.end}) {a.entity_type}->{a.variable}" for a in e.annotations)
        print(f"U: {e.text!r}" + (f"   ({spans})" if spans else ""))
    elif e.kind == "api":
        args = {k: (v.var or v.vars or v.lit) for k, v in e.args.items()}
        print(f"A: call {e.name}({args}) -> {e.return_var}")
    elif e.kind == "nlg":
        args = {k: (v.var or v.vars or v.lit) for k, v in e.args.items()}
        print(f"A: nlg {e.name}({args})")
    else:
        print(f"A: <{e.kind}>")

report = validate_dialogue(d, schema)
print(f"\nvalidation findings: {len(report.findings)}")

# the variable environment grows monotonically; corrections shadow slots
envs = resolve_references(d)
print(f"environment before event 0: {sorted(envs[0]['variables'])}")
print(f"environment after GetDuration returns: {sorted(envs[4]['variables'])}")
print(f"slot view at the end: {envs[len(d.events)]['slots']}")

# everything round-trips through the JSON Lines format
line = serialize_dialogue(d)
print(f"\none dialogue serialized to {len(line)} bytes of JSON")
print(serialize_domain(schema)[:200] + " ...")
