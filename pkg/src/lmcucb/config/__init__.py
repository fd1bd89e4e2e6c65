"""Experiment configuration.

:mod:`experiment` turns flat JSON/YAML documents and CLI flags into a validated
:class:`ExperimentConfig`, which the harness resolves per budget into
stratum counts, confidence levels and LMC-UCB parameters.
"""

from .experiment import ExperimentConfig, config_from_mapping, default_output_dir, load_config

__all__ = ["ExperimentConfig", "config_from_mapping", "default_output_dir", "load_config"]
