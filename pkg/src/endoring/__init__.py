"""Endomorphism rings of ordinary elliptic curves over small prime fields.

Subexponential-style machinery (class-group relations, CM-action isogeny
walks, lattice-of-orders ascent) with built-in brute-force oracles that
verify every probabilistic step at desk scale.
"""

from .backend import backend_name
from .curve import (
    Curve,
    FrobeniusData,
    Point,
    Subgroup,
    cardinality_ext,
    division_poly,
    is_ordinary,
    isomorphic,
    j_invariant,
    random_point,
    rational_subgroups,
    trace,
    velu,
)
from .endo import EndRingResult, ascend, oracle_endring, order_contains_endring, volcano_level
from .errors import (
    AlgorithmFailure,
    EmptyFactorBaseError,
    EndoringError,
    InternalInvariantError,
    InvalidInputError,
    MaxTrialsExceeded,
)
from .field import ExtField, FieldElem, Poly, PrimeField, ext_make, poly_roots, sqrt_in_field
from .isogeny import (
    FrobMatrix,
    TorsionBasis,
    apply_ideal,
    frobenius_matrix,
    holds_in_graph,
    kernel_for_ideal,
    torsion_basis,
)
from .quadorder import (
    FactorBase,
    PrimeIdealClass,
    QForm,
    QuadOrder,
    build_factor_base,
    class_group_structure,
    compose,
    enumerate_classes,
    factor_form_over_base,
    identity_form,
    order_from_frobenius,
    orders_directly_above,
    prime_ideal_above,
    sigma,
)
from .relations import (
    Relation,
    RelationParams,
    find_relation,
    holds_in_order,
    lattice_contains,
    lattice_index,
    relation_lattice_basis,
    subset_holding_probability_index,
)

__version__ = "0.1.0"
