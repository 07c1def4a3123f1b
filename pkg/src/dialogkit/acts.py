"""Dialogue acts: the semantic messages exchanged by the simulated agents."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class DialogueAct:
    """One semantic message.

    label       one of the fixed inventory (see schema.ACT_LABELS)
    slot        "Api.arg" for inform/correct and for system-side request
    action      API/NLG name for user-side request, confirm, offer, notify_result
    value       informed/corrected value: str, or list[str] for multi-valued slots
    bindings    arg -> value payload for confirm and notify_result
    success     False marks a failed API result (notify_result only)
    """

    label: str
    slot: str | None = None
    action: str | None = None
    value: object = None
    bindings: dict = field(default_factory=dict)
    success: bool = True

    def key(self) -> str:
        """Matching key used to pick templates/NLG responses."""
        if self.label in ("inform", "correct"):
            return f"{self.label}({self.slot})"
        if self.label == "request":
            return f"request({self.slot or self.action})"
        if self.label in ("confirm", "offer"):
            return f"{self.label}({self.action})"
        if self.label == "notify_result":
            face = "notify_result" if self.success else "no_result"
            return f"{face}({self.action})"
        return self.label


def inform(slot: str, value) -> DialogueAct:
    return DialogueAct("inform", slot=slot, value=value)


def request_slot(slot: str) -> DialogueAct:
    return DialogueAct("request", slot=slot)


def request_action(action: str) -> DialogueAct:
    return DialogueAct("request", action=action)


def confirm(action: str, bindings: dict) -> DialogueAct:
    return DialogueAct("confirm", action=action, bindings=dict(bindings))


def correct(slot: str, value) -> DialogueAct:
    return DialogueAct("correct", slot=slot, value=value)


def offer(action: str) -> DialogueAct:
    return DialogueAct("offer", action=action)


def notify_result(action: str, bindings: dict, success: bool = True) -> DialogueAct:
    return DialogueAct("notify_result", action=action, bindings=dict(bindings), success=success)


AFFIRM = "affirm"
DENY = "deny"
BYE = "bye"
ACCEPT_OFFER = "accept_offer"
DECLINE_OFFER = "decline_offer"
