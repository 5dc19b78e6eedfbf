//! Default numerical settings shared by the library and the CLI.

/// Nyström node count.
pub const NODES: usize = 512;
/// Symmetric truncation `[-T, T]` for unbounded curves, in arc-length units.
pub const TRUNCATION: f64 = 100.0;
/// Local refinement levels for the chord-arc search.
pub const REFINEMENT_LEVELS: usize = 6;
/// Initial grid size for the chord-arc search.
pub const CHORD_ARC_GRID: usize = 128;
/// Number of Birman-Schwinger eigenvalue branches tracked.
pub const TOP_K: usize = 4;
/// Points on the log-spaced kappa grid of an eigenvalue table.
pub const KAPPA_POINTS: usize = 64;

/// Pairs closer than `DIAGONAL_FLOOR * length` along the curve are left out of
/// the chord-arc search; the local limit is used instead.
pub const DIAGONAL_FLOOR: f64 = 1e-4;
/// Chord length below which two points are considered to coincide.
pub const POINT_MATCH_TOL: f64 = 1e-9;
/// Minimum geodesic separation, relative to length, for a coincidence to count
/// as a self-intersection.
pub const SELF_INTERSECTION_SEPARATION: f64 = 1e-2;
/// Raw-speed threshold for cusp detection.
pub const CUSP_SPEED_TOL: f64 = 1e-8;
/// Centered difference step used for raw velocities.
pub const CUSP_DIFF_STEP: f64 = 1e-6;
/// Extensions with a chord-arc constant at or below this are rejected.
pub const EXTENSION_C_FLOOR: f64 = 1e-6;
/// Default sector parameter for the asymptotic straightness diagnostic.
pub const A2_SECTOR_OMEGA: f64 = 0.5;

/// Root tolerance on `|mu - 1|` for bound-state search.
pub const ROOT_TOL: f64 = 1e-8;
/// Bracket width floor in kappa for bound-state search.
pub const BRACKET_FLOOR: f64 = 1e-10;
/// Two roots closer than this in kappa are reported as one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-7;
/// Slack applied when checking computed levels against the lower bounds.
pub const VERDICT_SLACK: f64 = 1e-6;
/// Chord-arc estimates this close to 1 are rounding noise on straight curves.
pub const STRAIGHT_SNAP: f64 = 1e-10;
