"""Knapsack polygon packing: greedy construction, clusters, conflict-graph IP and local search."""

__version__ = "0.1.0"
