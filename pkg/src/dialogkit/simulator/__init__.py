"""Dialogue simulation: goal sampling, dual-agent self-play, surface realization."""

from .goals import FromReturn, Goal, Revision, TargetCall, extract_goal, sample_goal
from .generate import SimConfig, generate_dataset, simulate_dialogue
from .policies import SystemAgentState, UserAgentState, simulate_api, system_step, user_step
from .realize import GenerationError, realize, realize_user_acts, render_nlg

__all__ = [
    "FromReturn", "Goal", "Revision", "TargetCall", "extract_goal", "sample_goal",
    "SimConfig", "generate_dataset", "simulate_dialogue",
    "SystemAgentState", "UserAgentState", "simulate_api", "system_step", "user_step",
    "GenerationError", "realize", "realize_user_acts", "render_nlg",
]
