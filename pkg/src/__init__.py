"""Torus weights of toric syzygies and cap-centroid regions"""
__version__ = "1.0.0"
