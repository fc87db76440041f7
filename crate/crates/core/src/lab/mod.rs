//! Probe grids and the predicates evaluated on them, boundary curves of
//! squares under a map, lattice counts near curves, and small bi-Lipschitz
//! oracles.

mod curve;
mod heuristic;
mod oracle;
mod probe;

pub use curve::{boundary_curve, boundary_probes, delete_loops, lattice_near_curve_count, near_curve_bound, Curve, QPoint};
pub use heuristic::{heuristic_grid_map, hopcroft_karp, HeuristicMap, HeuristicOptions};
pub use oracle::{brute_force_min_bilip, BilipOptimum, ORACLE_MAX_POINTS};
pub use probe::{
    check_no_stretch, coarse_derivative_deviation, corner_count, expanding_pair_search, find_regular_square,
    probe_points, probe_steps, tau_for_epsilon, DensityGap, Deviation, GridSpec, Probe, ProbeStep,
    RegularSquareResult,
};
