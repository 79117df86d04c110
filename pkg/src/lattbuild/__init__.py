"""Exact local structure of the SL_n and Sp_n buildings over F_q((t))."""

from .errors import *  # noqa: F401,F403
from .gfq import (
    FieldTable,
    GramForm,
    QuotientSpace,
    Subspace,
    complete_flag_count,
    enumerate_complete_flags,
    enumerate_isotropic_flags,
    enumerate_subspaces,
    gaussian_binomial,
    gf_init,
    invariant_subspaces,
    isotropic_flag_count,
    kernel,
    rank,
    rref,
    span,
    standard_form,
)
from .lattice import (
    HomothetyClass,
    KMatrix,
    LatticeRep,
    RelPosition,
    TruncRing,
    adjacent_representative,
    apply_matrix,
    contains,
    diagonal_lattice,
    enumerate_intermediate_lattices,
    form_valuation,
    index,
    is_adjacent,
    is_primitive,
    is_special_lattice,
    lattice_from_columns,
    lattice_from_generators,
    lattice_intersect,
    lattice_sum,
    lift_from_reduction,
    ord_det,
    reduction_mod_pi,
    relative_position,
    standard_lattice,
    vertex_type,
)
from .sl_local import (
    ClosePair,
    chambers_containing_vertex,
    close_complex,
    close_vertices,
    count_galleries_from,
    gallery_multiplicity,
    interpolating_chain,
    make_close_pair,
    omega_formula,
    sl_thickness,
    verify_sl_relation,
)
from .sp_local import (
    ApartmentChamber,
    ApartmentVertex,
    GspElement,
    SymplecticBasis,
    coords_in_delta,
    coords_is_primitive,
    coords_is_special,
    coords_type,
    coset_count_sp,
    gsp_act,
    gsp_chamber_image,
    gsp_transport,
    lift_gallery,
    r_delta,
    sp_chambers_containing,
    sp_close_complex,
    sp_close_vertices,
    sp_gallery_multiplicity,
    verify_sp_relation,
)
from .spherical import Complex, VertexMap, build_A_building, build_C_building, verify_simplicial_iso

__version__ = "0.1.0"
