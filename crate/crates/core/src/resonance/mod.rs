//! Resonance structure of the two dispersion relations.
//!
//! Family B collects the interactions of `v v_x` in the `u` equation, with
//! gap `|n³ - α n1³ - α n2³|`; family D those of `(u v)_x` in the `v`
//! equation, with gap `|α n³ - n1³ - α n2³|`. For rational `α` every gap is
//! decided in big-integer arithmetic.

mod coupling;
mod diophantine;
mod gaps;
mod roots;
mod scan;
mod surd;

pub use coupling::{parse_rational, rational_string, rational_to_f64, CouplingParam};
pub use diophantine::{estimate_type_index, DiophantineEstimate, DiophantineInput, TypeIndex};
pub use gaps::{dispersion_gap_b, dispersion_gap_d, enumerate_near_resonant, gap, Family, Gap, NearResonantTriple};
pub use roots::{compute_c_roots, compute_d_roots, ResonanceRoots, RootPair};
pub use scan::{
    comparability_onset, dyadic_blocks, multiplier_scan, root_estimates, verify_lower_bound, GapBlock, LowerBoundReport, Regime,
    ScanBlock, ScanReport, Trend, TYPE_INDEX_DEPTH,
};
pub use surd::{rational_continued_fraction, ContinuedFraction, Period, QuadSurd};
