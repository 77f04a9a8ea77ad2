"""
Reinforced Walk Lab - Main Package

Simulation and Monte Carlo verification of memory-reinforced random walks:
elephant random walks, three-color urns, percolated preferential attachment
trees and the strongly reinforced shark random swim.
"""

__version__ = "0.1.0"
