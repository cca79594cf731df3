//! Fiberwise translations on the doubly fibered surface and the orbit
//! experiments built on them.

mod bezout;
mod certificate;
mod conjugates;
mod orbit;
mod point;
mod search;

pub use certificate::{
    finite_orbit_certificate, numeric_order, replay_orbit, same_point_exact, screen_numeric,
    CertificateOutcome, FiniteOrbitCertificate, KnownOrders, NumericOrder, NumericScreen,
    ScreenVerdict,
};
pub use orbit::{orbit_grid, OrbitDomain, OrbitEntry, OrbitGuards, OrbitRecord, OrbitStatus};
pub use point::{
    intersection_quadratic, line_point, normalize, pencil_param, projective_distance,
    DoubleFibration, FiberParam, PointRecord, SurfacePoint, MEMBERSHIP_TOL,
};
pub use search::{
    chart_name, exact_intersection, fiber_intersection, finite_orbit_search, torsion_parameters, Catalog, CatalogEntry,
    ParamRecord, SearchOptions, TorsionParameter,
};
pub use bezout::{bezout_fiber_check, BezoutReport};
pub use conjugates::{conjugate_control_experiment, find_delta, ConjugateControl, DeltaSearch};
