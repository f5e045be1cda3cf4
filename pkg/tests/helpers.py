"""Shared builders for the test suite."""

from fractions import Fraction

from discretebm import FiniteMeasure, ProbabilityMeasure, as_point


def uniform(points):
    pts = [as_point(p) for p in points]
    return FiniteMeasure(len(pts[0]), [(p, 1) for p in pts]).normalize()


def dirac(point):
    p = as_point(point)
    return ProbabilityMeasure(len(p), [(p, 1)])


def measure(dim, entries):
    return FiniteMeasure(dim, entries)


def prob(dim, entries):
    return ProbabilityMeasure(dim, entries)


F = Fraction
