"""Exact state-vector toolkit for iterative oscillating-field quantum optimization
(IST-SAT) on planted MAX-3-XORSAT instances, with TAQC and semi-greedy
classical baselines."""

__version__ = "0.1.0"
