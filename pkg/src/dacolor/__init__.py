"""Divide-and-color percolation: Bernoulli bond clusters recolored by
i.i.d. coin flips, with exact rational gadget analysis, threshold
certificates for tree-like graphs, and lattice Monte Carlo tooling."""

from .dac import (
    CouplingSample,
    clusters,
    color,
    exploration_coupling,
    exploration_coupling_batch,
    sample_bond,
    sample_dac,
    stream,
    vertical_crossing,
)
from .exact import (
    BiPoly,
    CapExceeded,
    ColorEvent,
    EnumerationCaps,
    bk_enumeration,
    bk_probability,
    check_domination_exact,
    connection_poly,
    event_prob_direct,
    event_prob_poly,
    pivotality_poly,
    site_distribution,
)
from .mc import (
    duality_check,
    estimate_event,
    finite_size_criterion,
    psi_fit,
    rc_estimate,
    wilson_interval,
)
from .multigraph import (
    Gadget,
    LatticeBox,
    MultiGraph,
    complete_bipartite_dk,
    make_multigraph,
    parallel_gadget_dn,
    z2_box,
)
from .treecrit import (
    Certificate,
    CriticalCurve,
    bounded_degree_certificate,
    discontinuity_family_certificate,
    nonmonotonicity_certificate,
    pc_root,
    rc_root,
    rcbounds_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "BiPoly",
    "CapExceeded",
    "Certificate",
    "ColorEvent",
    "CouplingSample",
    "CriticalCurve",
    "EnumerationCaps",
    "Gadget",
    "LatticeBox",
    "MultiGraph",
    "bk_enumeration",
    "bk_probability",
    "bounded_degree_certificate",
    "check_domination_exact",
    "clusters",
    "color",
    "complete_bipartite_dk",
    "connection_poly",
    "discontinuity_family_certificate",
    "duality_check",
    "estimate_event",
    "event_prob_direct",
    "event_prob_poly",
    "exploration_coupling",
    "exploration_coupling_batch",
    "finite_size_criterion",
    "make_multigraph",
    "nonmonotonicity_certificate",
    "parallel_gadget_dn",
    "pc_root",
    "pivotality_poly",
    "psi_fit",
    "rc_estimate",
    "rc_root",
    "rcbounds_certificate",
    "sample_bond",
    "sample_dac",
    "site_distribution",
    "stream",
    "vertical_crossing",
    "wilson_interval",
    "z2_box",
]
