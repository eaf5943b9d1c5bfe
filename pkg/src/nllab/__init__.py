"""Desk-scale checks of quantum no-go arguments.

Library plus CLI covering singlet correlations and the Bell inequality,
triad-graph colorability, the two-spin parity contradiction, maximally
entangled perfect correlations, expectation-functional reconstruction,
and pilot-wave trajectories through a Stern-Gerlach magnet.
"""

__version__ = "0.1.0"
