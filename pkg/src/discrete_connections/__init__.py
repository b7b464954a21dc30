"""Discrete connections on a trivialized principal bundle ``V x G`` with abelian ``G``."""

from .bundle import BasePatch, BundlePoint, DTypeRegion, act, kappa, phi_s, phi_s_inverse, projection, section
from .complex import Chain, Cochain, Region, Simplex, boundary, coboundary, integrate, is_small, pushforward
from .connection import (DiscreteConnection, LogDomains, connection_from_lift, from_expressions,
                         from_potential_expressions, from_zero_cochain, is_flat_on_samples,
                         is_symmetric_on_samples, omega_mu, region_from_expression)
from .errors import (BranchCutError, ConnectionValidationError, DescriptorMismatchError, DomainError,
                     FiberMismatchError, NotALoopError, NotSmallError)
from .expr import Expression, ExprDomainError, ExprSyntaxError, evaluate, parse, to_text
from .group import AlgebraElement, GroupDescriptor, GroupElement, compose, exp, inverse, log, mod2pi
from .transport import (DiscretePath, HolonomyReport, LoopSampler, curvature_product, fan_two_chain,
                        holonomy, holonomy_monoid_sample, holonomy_via_local_product,
                        interpolating_chain, lift_path, parallel_transport, verify_phase_theorems)

__all__ = [name for name in dir() if not name.startswith("_")]
