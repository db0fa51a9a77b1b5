//! `S_N(theta) = sum over Omega_N of e(theta |gamma|)` and the circle-method
//! bookkeeping around it: Parseval, the Dirichlet arc cover, the `T`-grid
//! discretisation, the six-region split of the main arc integral, the
//! admissible `gamma` per region, and the subset-sum lemma used on minor arcs.

mod dirichlet;
mod quadrature;
mod regions;
mod spectrum;
mod subset;
mod thresholds;

pub use dirichlet::{dirichlet_decompose, isqrt, DiscretizedAngle, FareyPoint};
pub use quadrature::{
    arc_cover_check, default_density, farey_pairs, lipschitz_base_points, lipschitz_check,
    pairwise_sum, parseval_check, simpson, trapezoid_l2, ArcCover, LipschitzReport, ParsevalCheck,
    MAX_DOUBLINGS,
};
pub use regions::{
    classify_region, partition_grid, region_mass, region_ranges, GridCensus, Region, RegionEntry,
    RegionParams, RegionReport,
};
pub use spectrum::{e, l2_ratio_report, spectrum, L2Report, SpectrumHistogram};
pub use subset::{first_violation, subset_bound_verify, SubsetBound};
pub use thresholds::{
    balanced_nu, kloosterman_bound, middle_arc_bound, optimal_nu, scan_balanced_nu,
    short_arc_bound, threshold_arithmetic, GammaBounds, NuOptimum,
};
