//! Closed-form lower bounds on the spectrum, essential-spectrum thresholds,
//! and reports that check computed bound states against them.

mod graph;
mod report;

use crate::curve::CurveKind;
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

pub use graph::{graph_bound, GraphEdge, LeakyGraph};
pub use report::{
    analyze_curve, analyze_graph, search_bracket, verify_curve, verify_graph, BoundKind, PieceReport, SolverSettings,
    SpectralReport, StateVerdict, Verification,
};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("coupling must be positive, got {alpha}")))
    }
}

/// `-alpha^2 / (4 c^2)`.
pub fn single_bound(alpha: f64, c: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(c > 0.0) {
        return Err(Error::BoundUndefined(format!("chord-arc constant {c} (cusp or self-intersection)")));
    }
    Ok(-alpha * alpha / (4.0 * c * c))
}

/// `-N sum_i alpha^2 / (4 c_i^2)` over the `N` extended pieces.
pub fn composite_bound(alpha: f64, cs: &[f64]) -> Result<f64> {
    check_alpha(alpha)?;
    if cs.is_empty() {
        return Err(domain("composite bound needs at least one piece"));
    }
    if let Some(c) = cs.iter().find(|&&c| !(c > 0.0)) {
        return Err(Error::BoundUndefined(format!("piece with chord-arc constant {c}")));
    }
    let n = cs.len() as f64;
    Ok(-n * cs.iter().map(|c| alpha * alpha / (4.0 * c * c)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssentialSpectrum {
    pub threshold: f64,
    /// Set for unbounded curves whose asymptotic straightness is not confirmed:
    /// the threshold is then the expected value rather than an established one.
    pub diagnostic_only: bool,
}

/// Bottom of the essential spectrum: `0` for bounded curves, `-alpha^2/4` for
/// asymptotically straight unbounded ones.
pub fn essential_spectrum(kind: CurveKind, alpha: f64, a2_ok: bool) -> EssentialSpectrum {
    match kind {
        CurveKind::Loop { .. } | CurveKind::Segment { .. } => {
            EssentialSpectrum { threshold: 0.0, diagnostic_only: false }
        }
        CurveKind::Infinite { .. } => {
            EssentialSpectrum { threshold: -alpha * alpha / 4.0, diagnostic_only: !a2_ok }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn single_bound_examples() {
        assert_eq!(single_bound(1.0, 1.0).unwrap(), -0.25);
        assert!((single_bound(1.0, FRAC_PI_4.sin()).unwrap() + 0.5).abs() < 1e-15);
        assert!((single_bound(2.0, 2.0 / PI).unwrap() + PI * PI / 4.0).abs() < 1e-14);
        assert!(matches!(single_bound(1.0, 0.0), Err(Error::BoundUndefined(_))));
    }

    #[test]
    fn composite_bound_examples() {
        assert_eq!(composite_bound(1.0, &[1.0, 1.0]).unwrap(), -1.0);
        assert_eq!(composite_bound(1.0, &[1.0, 1.0, 1.0]).unwrap(), -2.25);
        assert_eq!(composite_bound(1.3, &[0.7]).unwrap(), single_bound(1.3, 0.7).unwrap());
        assert!(composite_bound(1.0, &[]).is_err());
        assert!(composite_bound(1.0, &[1.0, -0.5]).is_err());
    }

    #[test]
    fn essential_thresholds() {
        let lp = essential_spectrum(CurveKind::Loop { length: 1.0 }, 3.0, false);
        assert_eq!(lp.threshold, 0.0);
        assert!(!lp.diagnostic_only);
        let line = essential_spectrum(CurveKind::Infinite { truncation: 100.0 }, 1.0, true);
        assert_eq!(line.threshold, -0.25);
        assert!(!line.diagnostic_only);
        let flagged = essential_spectrum(CurveKind::Infinite { truncation: 100.0 }, 1.0, false);
        assert_eq!(flagged.threshold, -0.25);
        assert!(flagged.diagnostic_only);
    }
}
