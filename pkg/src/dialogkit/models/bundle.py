"""Model bundle: the deployable directory of trained models.

Layout: schema.json, vocab.json, ner.ckpt / ap.ckpt / af.ckpt, manifest.json
with the schema fingerprint and training configuration. Loading verifies the
fingerprint against the runtime schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..nn import load_params, save_params
from ..schema import DomainSchema, parse_domain, schema_fingerprint, serialize_domain
from .action import ApConfig, ApModel
from .argfill import AfConfig, AfModel
from .ner import NerConfig, NerModel
from .train import TrainConfig
from .vocab import Vocab


class BundleError(ValueError):
    pass


@dataclass
class ModelBundle:
    schema: DomainSchema
    vocab: Vocab
    ner: NerModel
    ap: ApModel
    af: AfModel
    train_config: TrainConfig

    @property
    def fingerprint(self) -> str:
        return schema_fingerprint(self.schema)


def save_bundle(bundle: ModelBundle, path) -> None:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    (out / "schema.json").write_text(serialize_domain(bundle.schema), encoding="utf-8")
    (out / "vocab.json").write_text(bundle.vocab.to_json(), encoding="utf-8")
    for name, model in (("ner", bundle.ner), ("ap", bundle.ap), ("af", bundle.af)):
        (out / f"{name}.ckpt").write_bytes(save_params(model.store, meta={"model": name}))
    manifest = {
        "fingerprint": bundle.fingerprint,
        "train_config": bundle.train_config.to_dict(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")


def _restore(store_target, blob: bytes) -> None:
    loaded, _meta = load_params(blob)
    for name, p in store_target.params.items():
        if name not in loaded.params:
            raise BundleError(f"checkpoint is missing parameter {name!r}")
        src = loaded[name].value
        if src.shape != p.value.shape:
            raise BundleError(f"parameter {name!r} has shape {src.shape}, expected {p.value.shape}")
        p.value[...] = src


def load_bundle(path, schema: DomainSchema | None = None) -> ModelBundle:
    src = Path(path)
    bundled_schema = parse_domain((src / "schema.json").read_text(encoding="utf-8"))
    manifest = json.loads((src / "manifest.json").read_text(encoding="utf-8"))
    if schema is not None:
        if schema_fingerprint(schema) != manifest["fingerprint"]:
            raise BundleError("bundle fingerprint does not match the provided schema")
        bundled_schema = schema
    if schema_fingerprint(bundled_schema) != manifest["fingerprint"]:
        raise BundleError("bundle fingerprint does not match its own schema.json")
    vocab = Vocab.from_json((src / "vocab.json").read_text(encoding="utf-8"))
    cfg = TrainConfig.from_dict(manifest["train_config"])
    ner = NerModel(vocab, bundled_schema,
                   NerConfig(encoder=cfg.encoder_config(), tagger_hidden=cfg.tagger_hidden,
                             use_dynamic=cfg.use_dynamic_catalogs),
                   seed=cfg.seed)
    ap = ApModel(vocab, ApConfig(encoder=cfg.encoder_config(), tau_high=cfg.tau_high,
                                 tau_low=cfg.tau_low), seed=cfg.seed + 1)
    af = AfModel(vocab, AfConfig(encoder=cfg.encoder_config(blocks=()),
                                 action_dim=cfg.action_dim, arg_dim=cfg.arg_dim),
                 seed=cfg.seed + 2)
    _restore(ner.store, (src / "ner.ckpt").read_bytes())
    _restore(ap.store, (src / "ap.ckpt").read_bytes())
    _restore(af.store, (src / "af.ckpt").read_bytes())
    return ModelBundle(schema=bundled_schema, vocab=vocab, ner=ner, ap=ap, af=af, train_config=cfg)
