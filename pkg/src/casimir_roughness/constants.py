"""Physical constants and unit conversions used for unit restoration."""

HBAR_C = 3.16152677e-26
"""hbar * c in J m."""

NM = 1e-9
"""One nanometre in metres."""
