"""Regenerate the bundled domain JSON artifacts from their builders.

Usage: python -m dialogkit.domains.export [output_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from ..dialogue import serialize_dialogue
from ..schema import serialize_domain
from . import pizzabot, ticketbot


def export(out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, mod in (("pizzabot", pizzabot), ("ticketbot", ticketbot)):
        schema = mod.schema()
        paths = {
            f"{name}_schema.json": serialize_domain(schema),
            f"{name}_seeds.jsonl": "".join(serialize_dialogue(d) + "\n" for d in mod.seeds(schema)),
            f"{name}_challenge.jsonl": "".join(serialize_dialogue(d) + "\n" for d in mod.challenge(schema)),
        }
        for fname, content in paths.items():
            p = out_dir / fname
            p.write_text(content, encoding="utf-8")
            written.append(p)
    return written


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent / "data"
    for p in export(target):
        print(p)
