"""Counting perfect matchings: exact oracles, Gallai-Edmonds recursion,
and Markov chains on perfect and near-perfect matchings."""

__version__ = "0.1.0"
