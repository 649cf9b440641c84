"""Statistical analysis of school-shooting incident data: cleaning, descriptive
statistics, hypothesis tests, linear and negative binomial models, and
incident-frequency trends."""

__version__ = "0.1.0"
