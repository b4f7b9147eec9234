"""
Quantum battery toolkit - numerical core.

Modules: hilbert (states and basis conventions), models (Hamiltonians),
evolution (propagation and circuits), stabilizer (two-qubit Cliffords and
tableaux), observables (work, ergotropy, SRE, averages), analysis (fits and
closed forms), oracles (closed-form self-checks).
"""

__version__ = "1.0.0"
