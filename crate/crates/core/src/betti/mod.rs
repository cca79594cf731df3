//! Period lattices, elliptic logarithms and Betti coordinates.

mod coords;
mod lattice;
mod scan;

pub use coords::{betti_coords, count_rational_points, detect_rational, BettiPoint, RationalHit};
pub use lattice::{
    cubic_roots, elliptic_log, exp_map, period_lattice, period_lattice_with_margin, weierstrass_p,
    PeriodLattice, DEFAULT_DISCRIMINANT_MARGIN,
};
pub use scan::{
    base_betti_scan, fiber_cardinality_check, jacobian_rank, rational_betti_search, BettiSample,
    CoverOptions, RationalBettiValue, Region, ScanOptions, ScanSample, SectionBetti,
};
