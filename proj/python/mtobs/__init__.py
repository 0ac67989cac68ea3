"""Distributed observability analysis and simulation for mixed-traffic
vehicle networks: graph redundancy certificates, structural and numeric
observability tests, block-diagonal observer gain synthesis, and the
consensus observer simulation against car-following ground truth."""

from ._mtobs import *  # noqa: F401,F403
