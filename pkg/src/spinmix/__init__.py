"""spinmix: exact desk-scale toolkit for anti-ferromagnetic two-spin systems.

Submodules
----------
model         graphs, systems, dense Gibbs distributions, pinnings, flips
uniqueness    tree recursion, fixed points, uniqueness thresholds, h/H bounds
dynamics      Glauber chains, mixing times, entropy functionals, tuned rates
independence  influence/correlation matrices and stability falsifiers
lifting       k-transforms, homogenization, down/up walks, entropy checks
saw           self-avoiding-walk trees and marginal-ratio equivalence
cli           the ``spinmix`` command line
"""

__version__ = "0.1.0"

from . import dynamics, independence, model, uniqueness  # noqa: F401

__all__ = ["model", "uniqueness", "dynamics", "independence", "__version__"]
