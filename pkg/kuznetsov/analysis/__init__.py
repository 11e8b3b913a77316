"""Numerical core: group coordinates, differential operators, integral transforms and the trace formula."""
