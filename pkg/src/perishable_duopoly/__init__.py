"""Duopoly of perishable goods with freshness-coupled pricing.

Agent-based simulation, mean-field integration and closed-form phase
boundaries in the (temperature, greed) plane.
"""

__version__ = "0.1.0"

from .model import (ModelParams, choice_probabilities, freshness, log_choice_probabilities,  # noqa: E402
                    price, update_satisfaction)
from .series import TimeSeries  # noqa: E402

__all__ = ["ModelParams", "TimeSeries", "choice_probabilities", "freshness",
           "log_choice_probabilities", "price", "update_satisfaction", "__version__"]
