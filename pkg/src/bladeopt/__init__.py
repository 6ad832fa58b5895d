"""Turbofan-blade shape optimization with Hicks-Henne deformations.

Modules: :mod:`geometry` (sections, deformation, feasibility),
:mod:`optimizers` (CMA-ES, PSO), :mod:`evaluation` (fitness, external
solver, surrogates), :mod:`harness` (runs, sweeps, records),
:mod:`analysis` (tables, comparison, VTK) and :mod:`cli`.
"""

__version__ = "0.1.0"
