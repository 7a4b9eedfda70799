//! Equilibrium location, stability classification, bifurcation thresholds,
//! and parameter-regime reports for the scalar model.
//!
//! Equilibria come in six kinds, named by their position in the trapping
//! region: the indifferent infection-free point IIFE at (0, 0), the
//! indifferent endemic point IEE at (1 - delta/beta_bar, 0), opinionated
//! endemic points OEE+/OEE- at the roots of the nullcline gap, and
//! opinionated infection-free points OIFE+/OIFE- at the roots of the opinion
//! nullcline.
//!
//! All functions here are pure; grid scans are deterministic and results are
//! sorted by (x, p) regardless of internal evaluation order.

use std::fmt;

use num_complex::Complex64;

use crate::error::Error;
use crate::model::{
    analytic_jacobian, nullcline_gap_scaled, opinion_nullcline_scaled, vector_field, ModelParams,
    State, X_DOMAIN_MARGIN,
};
use crate::numerics::{bisect, grid_min, scan_roots};

/// Residual bound below which a point counts as an equilibrium.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Half-width of the marginal band on eigenvalue real parts.
pub const MARGINAL_BAND: f64 = 1e-9;
/// Points of the root-scan grid over the opinion interval.
const ROOT_GRID: usize = 4096;
/// Bisection interval width for root refinement.
const ROOT_REFINE_TOL: f64 = 1e-13;
/// Distinct equilibria closer than this merge into one.
const DEDUP_TOL: f64 = 1e-8;
/// Zero tolerance used when classifying a coordinate as "on the axis".
const CLASS_TOL: f64 = 1e-8;

/// Kind of equilibrium, by quadrant and branch.
///
/// When the nullcline gap has exactly two roots they are labelled by order:
/// the smaller root is `OeeMinus`, the larger `OeePlus`. In the bistable
/// range the two roots straddle zero, so the labels agree with the sign of
/// the opinion; between the fold and the secondary threshold both roots are
/// positive and the lower branch keeps the `OeeMinus` label it exchanges
/// with the IEE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EquilibriumClass {
    Iife,
    Iee,
    OeeMinus,
    OeePlus,
    OifeMinus,
    OifePlus,
}

impl fmt::Display for EquilibriumClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EquilibriumClass::Iife => "IIFE",
            EquilibriumClass::Iee => "IEE",
            EquilibriumClass::OeeMinus => "OEE_MINUS",
            EquilibriumClass::OeePlus => "OEE_PLUS",
            EquilibriumClass::OifeMinus => "OIFE_MINUS",
            EquilibriumClass::OifePlus => "OIFE_PLUS",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for EquilibriumClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "IIFE" => Ok(EquilibriumClass::Iife),
            "IEE" => Ok(EquilibriumClass::Iee),
            "OEE_MINUS" => Ok(EquilibriumClass::OeeMinus),
            "OEE_PLUS" => Ok(EquilibriumClass::OeePlus),
            "OIFE_MINUS" => Ok(EquilibriumClass::OifeMinus),
            "OIFE_PLUS" => Ok(EquilibriumClass::OifePlus),
            other => Err(format!("unknown equilibrium class {other:?}")),
        }
    }
}

/// Linearized stability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

/// A located fixed point with its classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub state: State,
    pub class: EquilibriumClass,
    /// Eigenvalues of the analytic Jacobian, sorted by (re, im).
    pub eigenvalues: [Complex64; 2],
    pub stability: Stability,
    /// Max-norm of the vector field at `state`.
    pub residual: f64,
}

/// Stability from eigenvalue real parts: stable iff both are below
/// `-MARGINAL_BAND`, unstable iff any exceeds `+MARGINAL_BAND`, marginal
/// otherwise.
fn stability_from(eigenvalues: &[Complex64; 2]) -> Stability {
    let max_re = eigenvalues[0].re.max(eigenvalues[1].re);
    if max_re < -MARGINAL_BAND {
        Stability::Stable
    } else if max_re > MARGINAL_BAND {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// Re-derive the stability verdict of a located equilibrium.
///
/// Refuses points whose residual exceeds [`RESIDUAL_TOL`]: they are not
/// equilibria and linearization at them says nothing.
pub fn classify_stability(eq: &Equilibrium) -> Result<Stability, Error> {
    if !(eq.residual < RESIDUAL_TOL) {
        return Err(Error::NotAnEquilibrium {
            residual: eq.residual,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(stability_from(&eq.eigenvalues))
}

/// The transmissibility `delta k_p / (k_p + u0 - 1)` at which the endemic
/// indifferent branch loses stability to the lower opinionated branch.
///
/// Undefined when `k_p + u0 <= 1`: the denominator is non-positive and no
/// such exchange happens inside the unit transmissibility range.
pub fn endemic_stability_threshold(params: &ModelParams) -> Result<f64, Error> {
    let denom = params.k_p() + params.u0() - 1.0;
    if denom <= 0.0 {
        return Err(Error::ThresholdUndefined {
            sum: params.k_p() + params.u0(),
        });
    }
    Ok(params.delta() * params.k_p() / denom)
}

fn build_equilibrium(p: f64, x: f64, class: EquilibriumClass, params: &ModelParams) -> Equilibrium {
    let state = State::new(p, x).expect("equilibrium coordinates inside the trapping region");
    let jac = analytic_jacobian(state, params);
    let eigenvalues = jac.eigenvalues();
    let stability = stability_from(&eigenvalues);
    let residual = vector_field(state, params).max_norm();
    Equilibrium {
        state,
        class,
        eigenvalues,
        stability,
        residual,
    }
}

/// Locate every equilibrium in the trapping region.
///
/// Always returns the IIFE; the IEE whenever `beta_bar > delta`; one
/// opinionated endemic point per root of the nullcline gap whose infected
/// fraction lands in [0, 1]; and one opinionated infection-free point per
/// root of the opinion nullcline. Roots come from a sign-change scan on a
/// 4096-point grid over the interior opinion interval refined by bisection;
/// coincident points are merged at tolerance 1e-8. Output is sorted by
/// (x, p).
pub fn find_equilibria(params: &ModelParams) -> Vec<Equilibrium> {
    let lo = -1.0 + X_DOMAIN_MARGIN;
    let hi = 1.0 - X_DOMAIN_MARGIN;

    let mut points: Vec<(f64, f64, EquilibriumClass)> = vec![(0.0, 0.0, EquilibriumClass::Iife)];

    if params.beta_bar() > params.delta() {
        let p_ee = 1.0 - params.delta() / params.beta_bar();
        points.push((p_ee, 0.0, EquilibriumClass::Iee));
    }

    // Infection-free opinionated points: roots of the opinion nullcline.
    let oife_roots = scan_roots(
        &|x| opinion_nullcline_scaled(x, params),
        lo,
        hi,
        ROOT_GRID,
        ROOT_REFINE_TOL,
        DEDUP_TOL,
    );
    for &x in &oife_roots {
        let class = if x > CLASS_TOL {
            EquilibriumClass::OifePlus
        } else if x < -CLASS_TOL {
            EquilibriumClass::OifeMinus
        } else {
            continue; // coincides with the IIFE
        };
        points.push((0.0, x, class));
    }

    // Endemic opinionated points: roots of the nullcline gap with a feasible
    // infected fraction.
    let gap_roots = scan_roots(
        &|x| nullcline_gap_scaled(x, params),
        lo,
        hi,
        ROOT_GRID,
        ROOT_REFINE_TOL,
        DEDUP_TOL,
    );
    let feasible: Vec<f64> = gap_roots
        .iter()
        .copied()
        .filter(|&x| {
            let p = 1.0 - params.delta() / (params.beta_bar() * (1.0 + x));
            p >= -1e-12
        })
        .collect();
    let n_oee = feasible.len();
    for (i, &x) in feasible.iter().enumerate() {
        let p = (1.0 - params.delta() / (params.beta_bar() * (1.0 + x))).clamp(0.0, 1.0);
        // With exactly two roots, label by order (lower branch = minus);
        // otherwise fall back to the sign of the opinion.
        let class = if n_oee == 2 {
            if i == 0 {
                EquilibriumClass::OeeMinus
            } else {
                EquilibriumClass::OeePlus
            }
        } else if x > CLASS_TOL {
            EquilibriumClass::OeePlus
        } else if x < -CLASS_TOL {
            EquilibriumClass::OeeMinus
        } else {
            continue; // coincides with the IEE
        };
        points.push((p, x, class));
    }

    // Merge coincident points, keeping the earliest (closed-form) entry.
    let mut kept: Vec<(f64, f64, EquilibriumClass)> = Vec::with_capacity(points.len());
    for cand in points {
        let dup = kept
            .iter()
            .any(|k| (k.0 - cand.0).abs() < DEDUP_TOL && (k.1 - cand.1).abs() < DEDUP_TOL);
        if !dup {
            kept.push(cand);
        }
    }

    let mut out: Vec<Equilibrium> = kept
        .into_iter()
        .map(|(p, x, class)| build_equilibrium(p, x, class, params))
        .collect();
    out.sort_by(|a, b| {
        a.state
            .x()
            .total_cmp(&b.state.x())
            .then(a.state.p().total_cmp(&b.state.p()))
    });
    out
}

/// Fold transmissibility: the value at which the nullcline gap first touches
/// zero and the pair of opinionated endemic branches is born.
///
/// Found by bisecting the minimum of the gap over transmissibility values
/// between `delta` and the endemic stability threshold (capped at 1).
/// Returns `None` when the minimum never crosses zero on that interval.
/// The transmissibility stored in `params` is ignored; it is the swept
/// variable. Requires weak peer pressure (`k_x < 1/3`) so the gap is convex
/// and "exactly one root" is the fold condition; refuses `u0 >= 1`.
pub fn fold_threshold(params: &ModelParams) -> Result<Option<f64>, Error> {
    if !params.weak_peer_pressure() {
        return Err(Error::RegimeMismatch(format!(
            "fold detection requires weak peer pressure k_x < 1/3 (k_x = {})",
            params.k_x()
        )));
    }
    if params.u0() >= 1.0 {
        return Err(Error::AssumptionViolated(format!(
            "fold detection requires u0 < 1 (u0 = {})",
            params.u0()
        )));
    }
    let lower = params.delta();
    let upper = match endemic_stability_threshold(params) {
        Ok(b_star) => b_star.min(1.0),
        // Below the urgency threshold the endemic branch never destabilizes;
        // scan the rest of the unit interval instead.
        Err(_) => 1.0,
    };
    if upper <= lower {
        return Ok(None);
    }

    let lo = -1.0 + X_DOMAIN_MARGIN;
    let hi = 1.0 - X_DOMAIN_MARGIN;
    let min_gap = |beta: f64| -> f64 {
        let pr = params
            .with_beta_bar(beta)
            .expect("beta grid values keep parameters valid");
        grid_min(&|x| nullcline_gap_scaled(x, &pr), lo, hi, ROOT_GRID, 1e-12).1
    };

    let g_lo = min_gap(lower);
    let g_hi = min_gap(upper);
    if g_lo <= 0.0 || g_hi >= 0.0 {
        return Ok(None);
    }
    Ok(Some(bisect(min_gap, lower, upper, 1e-10)))
}

/// Parameter regime, following the four regions of the bifurcation diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `beta_bar < delta`: only the infection-free point is stable.
    PreTranscritical,
    /// Endemic but no opinionated roots; steady states match plain SIS.
    SisLike,
    /// Opinionated endemic pair exists alongside a stable indifferent
    /// endemic point.
    Coexistence,
    /// Only the two opinionated endemic points are stable.
    BistableOpinionated,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::PreTranscritical => "PRE_TRANSCRITICAL",
            Regime::SisLike => "SIS_LIKE",
            Regime::Coexistence => "COEXISTENCE",
            Regime::BistableOpinionated => "BISTABLE_OPINIONATED",
        })
    }
}

/// Regime label with the thresholds and the full equilibrium list.
#[derive(Debug, Clone)]
pub struct RegimeReport {
    pub regime: Regime,
    /// First transcritical threshold (= recovery rate).
    pub delta: f64,
    /// Secondary transcritical threshold.
    pub beta_star: f64,
    /// Fold transmissibility, when one exists on the scanned interval.
    pub beta_0: Option<f64>,
    pub equilibria: Vec<Equilibrium>,
}

/// Classify the parameter regime.
///
/// Requires the urgency assumption (`u0 < 1`, `k_p + u0 > 1`) and weak peer
/// pressure; the region labels are only established there. Queries at the
/// exact bifurcation values are refused: an equilibrium inside the marginal
/// band means the report would be ill-defined.
pub fn regime(params: &ModelParams) -> Result<RegimeReport, Error> {
    if !params.assumption1_holds() {
        return Err(Error::AssumptionViolated(format!(
            "regime labels require u0 < 1 and k_p + u0 > 1 (u0 = {}, k_p = {})",
            params.u0(),
            params.k_p()
        )));
    }
    if !params.weak_peer_pressure() {
        return Err(Error::RegimeMismatch(format!(
            "regime labels require weak peer pressure k_x < 1/3 (k_x = {})",
            params.k_x()
        )));
    }
    let beta_star = endemic_stability_threshold(params)?;
    let equilibria = find_equilibria(params);
    if let Some(m) = equilibria
        .iter()
        .find(|e| e.stability == Stability::Marginal)
    {
        return Err(Error::NearBifurcation(format!(
            "{} at ({:.12}, {:.12}) has an eigenvalue within {MARGINAL_BAND:e} of zero",
            m.class,
            m.state.p(),
            m.state.x()
        )));
    }
    let oee_count = equilibria
        .iter()
        .filter(|e| matches!(e.class, EquilibriumClass::OeeMinus | EquilibriumClass::OeePlus))
        .count();
    let beta = params.beta_bar();
    let regime = if beta < params.delta() {
        Regime::PreTranscritical
    } else if oee_count == 0 {
        Regime::SisLike
    } else if oee_count == 2 && beta < beta_star {
        Regime::Coexistence
    } else if oee_count == 2 && beta > beta_star {
        Regime::BistableOpinionated
    } else {
        return Err(Error::NearBifurcation(format!(
            "found {oee_count} opinionated endemic points at beta_bar = {beta}; \
             parameters sit at a branch boundary"
        )));
    };
    let beta_0 = fold_threshold(params)?;
    Ok(RegimeReport {
        regime,
        delta: params.delta(),
        beta_star,
        beta_0,
        equilibria,
    })
}

/// The three endemic infected fractions in the bistable regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfectionOrdering {
    pub p_minus: f64,
    pub p_ee: f64,
    pub p_plus: f64,
}

/// Endemic infection levels ordered `p_minus <= p_ee <= p_plus`, with the
/// indifferent level `p_ee = 1 - delta/beta_bar` in the middle.
///
/// Only defined in the bistable regime. Also verifies the sign identity
/// `sign(p_pm - p_ee) = sign(x_pm)` between each opinionated level and its
/// opinion.
pub fn infection_ordering(params: &ModelParams) -> Result<InfectionOrdering, Error> {
    let report = regime(params)?;
    if report.regime != Regime::BistableOpinionated {
        return Err(Error::RegimeMismatch(format!(
            "infection ordering is defined in the bistable regime only (got {})",
            report.regime
        )));
    }
    let p_ee = 1.0 - params.delta() / params.beta_bar();
    let minus = report
        .equilibria
        .iter()
        .find(|e| e.class == EquilibriumClass::OeeMinus)
        .expect("bistable regime carries an OEE- point");
    let plus = report
        .equilibria
        .iter()
        .find(|e| e.class == EquilibriumClass::OeePlus)
        .expect("bistable regime carries an OEE+ point");
    for eq in [minus, plus] {
        let diff = eq.state.p() - p_ee;
        if diff * eq.state.x() < 0.0 && diff.abs() > 1e-12 {
            return Err(Error::RegimeMismatch(format!(
                "sign identity violated at {}: p - p_ee = {diff:e}, x = {}",
                eq.class,
                eq.state.x()
            )));
        }
    }
    let ordering = InfectionOrdering {
        p_minus: minus.state.p(),
        p_ee,
        p_plus: plus.state.p(),
    };
    if !(ordering.p_minus <= ordering.p_ee && ordering.p_ee <= ordering.p_plus) {
        return Err(Error::RegimeMismatch(format!(
            "infection levels out of order: {ordering:?}"
        )));
    }
    Ok(ordering)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64, delta: f64, k_p: f64, k_x: f64, u0: f64) -> ModelParams {
        ModelParams::new(beta, delta, k_p, k_x, u0, 1.0).unwrap()
    }

    fn fig1b(beta: f64) -> ModelParams {
        params(beta, 0.3, 0.7, 0.3, 0.7)
    }

    fn classes(eqs: &[Equilibrium]) -> Vec<EquilibriumClass> {
        let mut c: Vec<_> = eqs.iter().map(|e| e.class).collect();
        c.sort();
        c
    }

    #[test]
    fn endemic_stability_threshold_closed_form() {
        let b = endemic_stability_threshold(&fig1b(0.75)).unwrap();
        assert!((b - 0.525).abs() < 1e-12, "got {b}");

        // Below the urgency threshold the denominator is non-positive.
        let err = endemic_stability_threshold(&params(0.75, 0.3, 0.7, 0.3, 0.2));
        assert!(matches!(err, Err(Error::ThresholdUndefined { .. })));

        // Just above the threshold the value blows up.
        let near = params(0.75, 0.3, 0.7, 0.3, 0.3 + 1e-9 + 1e-12);
        let b = endemic_stability_threshold(&near).unwrap();
        assert!(b > 1e6);
    }

    #[test]
    fn pre_transcritical_has_single_stable_point() {
        let eqs = find_equilibria(&fig1b(0.25));
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].class, EquilibriumClass::Iife);
        assert_eq!(eqs[0].stability, Stability::Stable);
        let eig: Vec<f64> = eqs[0].eigenvalues.iter().map(|e| e.re).collect();
        assert!((eig[0] - (-0.3)).abs() < 1e-12);
        assert!((eig[1] - (-0.05)).abs() < 1e-12);
    }

    #[test]
    fn bistable_range_has_exactly_four() {
        let eqs = find_equilibria(&fig1b(0.75));
        assert_eq!(eqs.len(), 4);
        assert_eq!(
            classes(&eqs),
            vec![
                EquilibriumClass::Iife,
                EquilibriumClass::Iee,
                EquilibriumClass::OeeMinus,
                EquilibriumClass::OeePlus
            ]
        );
        for eq in &eqs {
            assert!(eq.residual < RESIDUAL_TOL, "{:?}", eq);
            let expected = match eq.class {
                EquilibriumClass::OeeMinus | EquilibriumClass::OeePlus => Stability::Stable,
                _ => Stability::Unstable,
            };
            assert_eq!(eq.stability, expected, "{:?}", eq.class);
        }
        // Output is sorted by (x, p).
        for w in eqs.windows(2) {
            assert!(w[0].state.x() <= w[1].state.x());
        }
    }

    #[test]
    fn coexistence_range_labels_lower_positive_root_as_minus() {
        // Between the fold and the secondary threshold both opinionated
        // roots are positive; the lower one is unstable and keeps OEE-.
        let eqs = find_equilibria(&fig1b(0.44));
        assert_eq!(eqs.len(), 4);
        let minus = eqs
            .iter()
            .find(|e| e.class == EquilibriumClass::OeeMinus)
            .unwrap();
        let plus = eqs
            .iter()
            .find(|e| e.class == EquilibriumClass::OeePlus)
            .unwrap();
        assert!(minus.state.x() > 0.0 && plus.state.x() > minus.state.x());
        assert_eq!(minus.stability, Stability::Unstable);
        assert_eq!(plus.stability, Stability::Stable);
        let iee = eqs.iter().find(|e| e.class == EquilibriumClass::Iee).unwrap();
        assert_eq!(iee.stability, Stability::Stable);
    }

    #[test]
    fn strong_peer_pressure_infection_free_points() {
        // High peer pressure and urgency: the opinion nullcline has
        // symmetric root pairs and only the most averse point is stable.
        let pr = params(0.75, 0.3, 0.7, 0.7, 0.9);
        let eqs = find_equilibria(&pr);
        let oife: Vec<&Equilibrium> = eqs
            .iter()
            .filter(|e| {
                matches!(
                    e.class,
                    EquilibriumClass::OifeMinus | EquilibriumClass::OifePlus
                )
            })
            .collect();
        assert!(oife.len() >= 2, "expected opinionated infection-free pair");
        // Symmetric in x.
        for e in &oife {
            let x = e.state.x();
            assert!(
                oife.iter().any(|o| (o.state.x() + x).abs() < 1e-9),
                "unpaired root {x}"
            );
        }
        let stable: Vec<&&Equilibrium> = oife
            .iter()
            .filter(|e| e.stability == Stability::Stable)
            .collect();
        assert_eq!(stable.len(), 1);
        assert!(stable[0].state.x() < 0.0, "stable point must be averse");
    }

    #[test]
    fn infection_free_roots_do_not_depend_on_infection_parameters() {
        let mut baseline: Option<Vec<f64>> = None;
        for beta in [0.4, 0.75, 0.95] {
            let pr = params(beta, 0.3, 0.7, 0.7, 0.9);
            let mut roots: Vec<f64> = find_equilibria(&pr)
                .iter()
                .filter(|e| {
                    matches!(
                        e.class,
                        EquilibriumClass::OifeMinus | EquilibriumClass::OifePlus
                    )
                })
                .map(|e| e.state.x())
                .collect();
            roots.sort_by(|a, b| a.total_cmp(b));
            match &baseline {
                None => baseline = Some(roots),
                Some(b) => {
                    assert_eq!(b.len(), roots.len());
                    for (a, r) in b.iter().zip(&roots) {
                        assert!((a - r).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn equilibria_with_zero_infection_gain() {
        // k_p = 0 keeps the finder total: opinion roots do not involve k_p.
        let pr = params(0.75, 0.3, 0.0, 0.0, 0.5);
        let eqs = find_equilibria(&pr);
        assert_eq!(
            classes(&eqs),
            vec![EquilibriumClass::Iife, EquilibriumClass::Iee]
        );
    }

    #[test]
    fn classify_stability_checks_residual() {
        let pr = fig1b(0.75);
        let eqs = find_equilibria(&pr);
        for eq in &eqs {
            assert_eq!(classify_stability(eq).unwrap(), eq.stability);
        }
        let mut bogus = eqs[0].clone();
        bogus.residual = 1.0;
        assert!(matches!(
            classify_stability(&bogus),
            Err(Error::NotAnEquilibrium { .. })
        ));
    }

    #[test]
    fn indifferent_eigenvalues_match_closed_forms() {
        for beta in [0.25, 0.36, 0.44, 0.75] {
            let pr = fig1b(beta);
            let eqs = find_equilibria(&pr);
            let iife = eqs.iter().find(|e| e.class == EquilibriumClass::Iife).unwrap();
            let mut expected = [beta - 0.3, (0.7 - 1.0) / 1.0];
            expected.sort_by(|a, b| a.total_cmp(b));
            for (e, l) in expected.iter().zip(iife.eigenvalues.iter()) {
                assert!((e - l.re).abs() < 1e-9 && l.im == 0.0);
            }
            if beta > 0.3 {
                let iee = eqs.iter().find(|e| e.class == EquilibriumClass::Iee).unwrap();
                let mut expected = [0.3 - beta, (0.7 - 1.0) + 0.7 * (1.0 - 0.3 / beta)];
                expected.sort_by(|a, b| a.total_cmp(b));
                for (e, l) in expected.iter().zip(iee.eigenvalues.iter()) {
                    assert!((e - l.re).abs() < 1e-9, "beta {beta}: {e} vs {}", l.re);
                }
            }
        }
    }

    #[test]
    fn iee_stability_exchanges_at_the_secondary_threshold() {
        let b_star = endemic_stability_threshold(&fig1b(0.75)).unwrap();
        let below = find_equilibria(&fig1b(b_star - 1e-3));
        let above = find_equilibria(&fig1b(b_star + 1e-3));
        let iee_below = below.iter().find(|e| e.class == EquilibriumClass::Iee).unwrap();
        let iee_above = above.iter().find(|e| e.class == EquilibriumClass::Iee).unwrap();
        assert_eq!(iee_below.stability, Stability::Stable);
        assert_eq!(iee_above.stability, Stability::Unstable);
        // The lower opinionated branch stabilizes across the threshold.
        let minus_below = below
            .iter()
            .find(|e| e.class == EquilibriumClass::OeeMinus)
            .unwrap();
        let minus_above = above
            .iter()
            .find(|e| e.class == EquilibriumClass::OeeMinus)
            .unwrap();
        assert_eq!(minus_below.stability, Stability::Unstable);
        assert_eq!(minus_above.stability, Stability::Stable);
        assert!(minus_below.state.x() > 0.0 && minus_above.state.x() < 0.0);
    }

    #[test]
    fn iife_stability_flips_at_delta() {
        let below = find_equilibria(&fig1b(0.3 - 1e-3));
        let above = find_equilibria(&fig1b(0.3 + 1e-3));
        assert_eq!(below[0].stability, Stability::Stable);
        let iife_above = above.iter().find(|e| e.class == EquilibriumClass::Iife).unwrap();
        assert_eq!(iife_above.stability, Stability::Unstable);
        // The endemic point enters the trapping region exactly there.
        assert!(below.iter().all(|e| e.class != EquilibriumClass::Iee));
        assert!(above.iter().any(|e| e.class == EquilibriumClass::Iee));
    }

    #[test]
    fn fold_threshold_brackets_the_branch_birth() {
        let pr = fig1b(0.75);
        let b0 = fold_threshold(&pr).unwrap().expect("fold exists");
        assert!(b0 > 0.36 && b0 < 0.44, "fold at {b0}");
        // Just below: no opinionated roots; just above: the pair exists.
        let below = find_equilibria(&fig1b(b0 - 1e-4));
        let above = find_equilibria(&fig1b(b0 + 1e-4));
        let count = |eqs: &[Equilibrium]| {
            eqs.iter()
                .filter(|e| {
                    matches!(e.class, EquilibriumClass::OeeMinus | EquilibriumClass::OeePlus)
                })
                .count()
        };
        assert_eq!(count(&below), 0);
        assert_eq!(count(&above), 2);
    }

    #[test]
    fn fold_threshold_none_for_low_urgency() {
        let pr = params(0.5, 0.3, 0.7, 0.3, 0.2);
        assert_eq!(fold_threshold(&pr).unwrap(), None);
    }

    #[test]
    fn fold_threshold_requires_weak_peer_pressure() {
        let pr = params(0.5, 0.3, 0.7, 0.7, 0.9);
        assert!(matches!(
            fold_threshold(&pr),
            Err(Error::RegimeMismatch(_))
        ));
    }

    #[test]
    fn gap_root_count_switches_at_the_fold() {
        // Root count over a 200-point transmissibility grid: zero below the
        // fold, two above.
        let pr = fig1b(0.75);
        let b0 = fold_threshold(&pr).unwrap().unwrap();
        for i in 0..200 {
            let beta = 0.3 + (1.0 - 0.3) * (i as f64 + 0.5) / 200.0;
            let eqs = find_equilibria(&fig1b(beta));
            let n = eqs
                .iter()
                .filter(|e| {
                    matches!(e.class, EquilibriumClass::OeeMinus | EquilibriumClass::OeePlus)
                })
                .count();
            let expected = if beta < b0 { 0 } else { 2 };
            assert_eq!(n, expected, "beta = {beta}, fold = {b0}");
        }
    }

    #[test]
    fn regime_labels_follow_the_regions() {
        assert_eq!(regime(&fig1b(0.25)).unwrap().regime, Regime::PreTranscritical);
        assert_eq!(regime(&fig1b(0.36)).unwrap().regime, Regime::SisLike);
        let coex = regime(&fig1b(0.44)).unwrap();
        assert_eq!(coex.regime, Regime::Coexistence);
        assert_eq!(regime(&fig1b(0.75)).unwrap().regime, Regime::BistableOpinionated);

        // The coexistence report carries the expected stability pattern.
        for eq in &coex.equilibria {
            let expected = match eq.class {
                EquilibriumClass::Iee | EquilibriumClass::OeePlus => Stability::Stable,
                _ => Stability::Unstable,
            };
            assert_eq!(eq.stability, expected, "{:?}", eq.class);
        }
    }

    #[test]
    fn regime_refuses_assumption_violations_and_bifurcation_points() {
        assert!(matches!(
            regime(&params(0.5, 0.3, 0.7, 0.3, 0.2)),
            Err(Error::AssumptionViolated(_))
        ));
        assert!(matches!(
            regime(&params(0.5, 0.3, 0.7, 0.5, 0.7)),
            Err(Error::RegimeMismatch(_))
        ));
        // Exactly at the first transcritical point the IIFE is marginal.
        assert!(matches!(
            regime(&fig1b(0.3)),
            Err(Error::NearBifurcation(_))
        ));
    }

    #[test]
    fn infection_ordering_in_the_bistable_regime() {
        let ord = infection_ordering(&fig1b(0.75)).unwrap();
        assert!((ord.p_ee - 0.6).abs() < 1e-12);
        assert!(ord.p_minus < 0.6 && 0.6 < ord.p_plus);
        assert!(matches!(
            infection_ordering(&fig1b(0.44)),
            Err(Error::RegimeMismatch(_))
        ));
    }

    #[test]
    fn oee_coordinates_consistent_with_their_opinion() {
        // The infected fraction reconstructed from the opinion agrees with
        // the stored coordinate.
        let pr = fig1b(0.75);
        for eq in find_equilibria(&pr) {
            if matches!(eq.class, EquilibriumClass::OeeMinus | EquilibriumClass::OeePlus) {
                let p = 1.0 - pr.delta() / (pr.beta_bar() * (1.0 + eq.state.x()));
                assert!((p - eq.state.p()).abs() < 1e-10);
            }
        }
    }
}
