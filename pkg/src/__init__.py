"""
Loader Cycle Simulator
======================

Simulation of a wheel loader driven through the short loading cycle by an
event-driven operator model.

Components:
- geom: V-pattern path synthesis and approach estimation
- interface: Control and feedback channels between operator and machine
- plant: Articulated loader model
- operator_model: Phase machine imitating an experienced operator
- cosim: Fixed-step co-simulation master
- metrics: Diagnostic series, KPIs and result files
- visualization: SVG plots
- pipeline: Scenario configuration, runs and experiments

Version: 1.0.0
"""

__version__ = "1.0.0"

__all__ = ["__version__"]
