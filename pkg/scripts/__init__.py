"""Discrete calculus, porous medium dynamics and estimate checks on weighted graphs."""
