//! The oracle battery: every closed form and representation identity checked
//! against the Fock-space constructions, item by item.

use std::fmt;
use std::str::FromStr;

use super::checks::{
    born_pairing, closed_form_match, completeness, convolution_check, heterodyne_resolution,
    mother_heterodyne_check, positivity_transfer, reconstruct,
};
use super::fock::{coherent_projector, delta_s, thermal_state, FockOperator};
use super::grid::PhaseGrid;
use super::quadrature::{PovmElement, SpqdQuadrature};
use super::{OracleError, OracleReport};
use crate::channels::{eb_sufficient, eb_tms_scan, default_nu_grid, loss_with_excess, GaussianChannel, DEFAULT_NU_MAX};
use crate::linalg::RealMatrix;
use crate::measurements::{grid_minimum, max_nonneg_ordering, MeasurementModel, Outcome, TRACE_DELTA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemKind {
    ClosedForm,
    BornPairing,
    Reconstruction,
    HeterodyneIdentity,
    MotherMeasurement,
    Convolution,
    EbScan,
    Normalization,
    PositivityTransfer,
}

impl ItemKind {
    pub const ALL: [ItemKind; 9] = [
        ItemKind::ClosedForm,
        ItemKind::BornPairing,
        ItemKind::Reconstruction,
        ItemKind::HeterodyneIdentity,
        ItemKind::MotherMeasurement,
        ItemKind::Convolution,
        ItemKind::EbScan,
        ItemKind::Normalization,
        ItemKind::PositivityTransfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ItemKind::ClosedForm => "closed-form",
            ItemKind::BornPairing => "born-pairing",
            ItemKind::Reconstruction => "reconstruction",
            ItemKind::HeterodyneIdentity => "heterodyne-identity",
            ItemKind::MotherMeasurement => "mother-measurement",
            ItemKind::Convolution => "convolution",
            ItemKind::EbScan => "eb-scan",
            ItemKind::Normalization => "normalization",
            ItemKind::PositivityTransfer => "positivity-transfer",
        }
    }
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ItemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ItemKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = ItemKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown oracle item {s:?}; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryConfig {
    pub cutoff: usize,
    /// Grid for characteristic-function integrals.
    pub y_grid: PhaseGrid,
    /// Grid for phase-space integrals.
    pub z_grid: PhaseGrid,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            cutoff: 40,
            y_grid: PhaseGrid::y_default(),
            z_grid: PhaseGrid::new(8.0, 161).expect("valid grid"),
        }
    }
}

/// One comparison of the battery with its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub quantity: String,
    pub report: Result<OracleReport, String>,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn new(quantity: impl Into<String>, report: Result<OracleReport, OracleError>, tolerance: f64) -> Self {
        Self { quantity: quantity.into(), report: report.map_err(|e| e.to_string()), tolerance }
    }

    pub fn passed(&self) -> bool {
        matches!(&self.report, Ok(r) if r.within(self.tolerance))
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok  " } else { "FAIL" };
        match &self.report {
            Ok(r) => write!(
                f,
                "{verdict} {}: numeric {:.9e}, reference {:.9e}, error {:.3e} (tolerance {:.1e})",
                self.quantity, r.numeric, r.reference, r.abs_error, self.tolerance
            ),
            Err(e) => write!(f, "{verdict} {}: {e} (tolerance {:.1e})", self.quantity, self.tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryItem {
    pub kind: ItemKind,
    pub checks: Vec<CheckOutcome>,
}

impl BatteryItem {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(CheckOutcome::passed)
    }
}

/// Runs the requested items (all of them when `only` is empty).
pub fn run_battery(config: &BatteryConfig, only: &[ItemKind]) -> Vec<BatteryItem> {
    ItemKind::ALL
        .into_iter()
        .filter(|k| only.is_empty() || only.contains(k))
        .map(|kind| run_item(kind, config))
        .collect()
}

pub fn run_item(kind: ItemKind, config: &BatteryConfig) -> BatteryItem {
    log::info!("oracle item {kind} at cutoff {}", config.cutoff);
    let checks = match kind {
        ItemKind::ClosedForm => closed_form_item(config),
        ItemKind::BornPairing => born_pairing_item(config),
        ItemKind::Reconstruction => reconstruction_item(config),
        ItemKind::HeterodyneIdentity => heterodyne_item(config),
        ItemKind::MotherMeasurement => mother_item(config),
        ItemKind::Convolution => convolution_item(),
        ItemKind::EbScan => eb_item(),
        ItemKind::Normalization => normalization_item(config),
        ItemKind::PositivityTransfer => positivity_item(config),
    };
    BatteryItem { kind, checks }
}

const ORDERINGS: [f64; 4] = [-1.0, -0.5, 0.0, 0.5];

/// Evaluation points with `|z| ≤ 3`.
fn standard_points() -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for i in -3..=3 {
        for j in -3..=3 {
            let z = [i as f64, j as f64];
            if z[0].hypot(z[1]) <= 3.0 {
                out.push(z);
            }
        }
    }
    out
}

/// Catalogue models with their Fock-representable outcomes.
fn oracle_models() -> Vec<(MeasurementModel, Vec<Outcome>)> {
    let binary = vec![Outcome::NoClick, Outcome::Click];
    let squeezed = RealMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5]]).expect("2×2");
    let tilted = RealMatrix::from_rows(&[vec![1.2, 0.3], vec![0.3, 0.9]]).expect("2×2");
    let det = 1.2 * 0.9 - 0.3 * 0.3;
    let tilted = tilted.scale(1.0 / f64::sqrt(det));
    vec![
        (MeasurementModel::ideal_pd(), binary.clone()),
        (MeasurementModel::realistic_pd(0.25).expect("valid"), binary.clone()),
        (MeasurementModel::thermal_pd(2.0).expect("valid"), binary.clone()),
        (MeasurementModel::thermal_pd(3.0).expect("valid"), binary),
        (MeasurementModel::heterodyne(), vec![Outcome::Point([0.5, -0.3])]),
        (
            MeasurementModel::gaussian(squeezed).expect("valid").with_label("squeezed"),
            vec![Outcome::Point([0.0, 0.0])],
        ),
        (
            MeasurementModel::gaussian(tilted).expect("valid").with_label("tilted squeezed"),
            vec![Outcome::Point([0.4, 0.2])],
        ),
        (
            MeasurementModel::gaussian(RealMatrix::identity(2).scale(2.0)).expect("valid").with_label("noisy"),
            vec![Outcome::Point([-0.6, 0.1])],
        ),
    ]
}

fn closed_form_item(config: &BatteryConfig) -> Vec<CheckOutcome> {
    let points = standard_points();
    let mut out = Vec::new();
    for (m, outcomes) in oracle_models() {
        let limit = m.convergence_limit();
        for outcome in outcomes {
            for s in ORDERINGS.into_iter().filter(|&s| s < limit) {
                let r = widened(&config.y_grid, limit - s)
                    .and_then(|grid| closed_form_match(&m, outcome, s, &points, config.cutoff, &grid));
                out.push(CheckOutcome::new(format!("{} {} s={s}", m.label(), outcome.label()), r, 1e-6));
            }
        }
    }
    out
}

/// The y grid extended at fixed step until an `e^{−rate·|y|²/4}` envelope has
/// dropped by twelve orders of magnitude.
fn widened(grid: &PhaseGrid, rate: f64) -> Result<PhaseGrid, OracleError> {
    let reach = (4.0 * 12.0 * 10f64.ln() / rate).sqrt();
    if reach <= grid.half_width() {
        return Ok(*grid);
    }
    let half_steps = (reach / grid.step()).ceil() as usize;
    PhaseGrid::new(half_steps as f64 * grid.step(), 2 * half_steps + 1)
}

fn born_pairing_item(config: &BatteryConfig) -> Vec<CheckOutcome> {
    let z_grid = PhaseGrid::new(10.0, 201).expect("valid grid");
    let mut out = Vec::new();
    for nbar in [0.0, 1.0] {
        let rho = thermal_state(nbar, config.cutoff);
        for (m, p_dark) in [(MeasurementModel::ideal_pd(), 0.0), (MeasurementModel::realistic_pd(0.25).expect("valid"), 0.25)] {
            for s in [-0.5, 0.0] {
                let quantity = format!("thermal n̄={nbar} {} no-click s={s}", m.label());
                let report = rho.clone().and_then(|rho| {
                    let r = born_pairing(&rho, &m, Outcome::NoClick, s, &z_grid, &config.y_grid)?;
                    // the direct side must also reproduce (1 − P_D)/(n̄ + 1)
                    let anchor = (1.0 - p_dark) / (nbar + 1.0);
                    if (r.reference - anchor).abs() > 1e-10 {
                        return Err(OracleError::Truncation(format!(
                            "direct probability {} misses the analytic value {anchor}",
                            r.reference
                        )));
                    }
                    Ok(r)
                });
                out.push(CheckOutcome::new(quantity, report, 1e-6));
            }
        }
    }
    let coherent = coherent_projector([2f64.sqrt(), 0.0], config.cutoff);
    let r = born_pairing(&coherent, &MeasurementModel::ideal_pd(), Outcome::NoClick, 0.0, &z_grid, &config.y_grid)
        .map(|r| OracleReport::new(r.quantity, r.numeric, (-1f64).exp()));
    out.push(CheckOutcome::new("coherent |α|²=1 ideal no-click s=0", r, 1e-6));
    out
}

fn reconstruction_item(config: &BatteryConfig) -> Vec<CheckOutcome> {
    let d = config.cutoff;
    let ideal = MeasurementModel::ideal_pd();
    let realistic = MeasurementModel::realistic_pd(0.25).expect("valid");
    vec![
        CheckOutcome::new(
            "ideal no-click s=0.5",
            reconstruct(&ideal, Outcome::NoClick, 0.5, &config.z_grid, &config.y_grid, d),
            1e-3,
        ),
        CheckOutcome::new(
            "realistic P_D=0.25 click s=-0.5",
            reconstruct(&realistic, Outcome::Click, -0.5, &config.z_grid, &config.y_grid, d),
            1e-3,
        ),
    ]
}

fn heterodyne_item(config: &BatteryConfig) -> Vec<CheckOutcome> {
    let d = config.cutoff;
    let mut out = Vec::new();
    // deterministic spread of points with |α| ≤ 2
    for k in 0..20 {
        let radius = 2f64.sqrt() * 2.0 * ((k as f64 + 0.5) / 20.0).sqrt();
        let angle = k as f64 * 2.399_963_229_728_653;
        let z = [radius * angle.cos(), radius * angle.sin()];
        let r = delta_s(z, -1.0, d).map(|kernel| {
            let expected = coherent_projector(z, d).scale(1.0 / (2.0 * std::f64::consts::PI));
            OracleReport::new(format!("Δ^(-1) vs coherent projector at z=({:.3}, {:.3})", z[0], z[1]), kernel.central_distance(&expected), 0.0)
        });
        out.push(CheckOutcome::new(format!("kernel at s=-1 #{k}"), r, 1e-8));
    }
    let resolution_grid = PhaseGrid::new(12.0, 241).expect("valid grid");
    out.push(CheckOutcome::new("resolution of the identity", heterodyne_resolution(&resolution_grid, d), 1e-3));
    out
}

fn mother_item(config: &BatteryConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for (tau, z) in [(0.5, [1.0, 0.0]), (0.7, [0.0, 0.0]), (0.7, [1.2, -0.8]), (0.9, [0.0, 1.5]), (0.3, [0.5, -0.2])] {
        let r = mother_heterodyne_check(tau, z, config.cutoff, &config.y_grid);
        out.push(CheckOutcome::new(format!("τ={tau} z=({}, {})", z[0], z[1]), r, 1e-6));
    }
    let r = mother_heterodyne_check(1.0, [0.0, 0.0], config.cutoff, &config.y_grid);
    out.push(CheckOutcome::new("τ=1 z=(0, 0)", r, 1e-12));
    out
}

fn convolution_item() -> Vec<CheckOutcome> {
    let points = [[0.0, 0.0], [0.7, -0.4], [1.5, 1.0], [-2.0, 0.5]];
    let ideal = MeasurementModel::ideal_pd();
    let thermal = MeasurementModel::thermal_pd(2.0).expect("valid");
    let z_grid = PhaseGrid::new(10.0, 201).expect("valid grid");
    let mut out = vec![
        CheckOutcome::new(
            "ideal no-click s=-0.5 from 0",
            convolution_check(-0.5, 0.0, &z_grid, &points, &ideal, Outcome::NoClick),
            1e-6,
        ),
        CheckOutcome::new(
            "thermal ν=2 no-click s=-1 from 0",
            convolution_check(-1.0, 0.0, &z_grid, &points, &thermal, Outcome::NoClick),
            1e-6,
        ),
        CheckOutcome::new(
            "ideal no-click zero width",
            convolution_check(-0.5, -0.5, &z_grid, &points, &ideal, Outcome::NoClick),
            1e-12,
        ),
    ];
    // smoothing preserves non-negativity below the largest non-negative ordering
    for (m, _) in oracle_models() {
        let s_bar = max_nonneg_ordering(&m).s_bar;
        let limit = m.convergence_limit();
        let s = s_bar.min(limit - 1e-3) - 0.5;
        let r = grid_minimum(&m, s, 4.0, 41)
            .map(|min| OracleReport::new("grid minimum", min.min(0.0), 0.0))
            .map_err(OracleError::from);
        out.push(CheckOutcome::new(format!("{} non-negative at s={s:.3}", m.label()), r, 1e-12));
    }
    out
}

fn eb_item() -> Vec<CheckOutcome> {
    let nu_grid = default_nu_grid(DEFAULT_NU_MAX);
    let mut out = Vec::new();
    for k in 1..=9 {
        let tau = k as f64 / 10.0;
        // ε = τ is the smallest excess for which the sufficient condition holds
        let r = (|| {
            let ch = loss_with_excess(tau, tau).map_err(|e| OracleError::Range(e.to_string()))?;
            let sufficient = eb_sufficient(&ch);
            let scan = eb_tms_scan(tau, tau, &nu_grid).map_err(|e| OracleError::Range(e.to_string()))?;
            if !sufficient {
                return Err(OracleError::Range(format!("sufficient condition fails at τ = ε = {tau}")));
            }
            Ok(OracleReport::new("partial transpose minimum", scan.tms_min_eigenvalue.min(0.0), 0.0))
        })();
        out.push(CheckOutcome::new(format!("loss τ={tau} ε={tau}"), r, 1e-10));
    }
    let identity = GaussianChannel::identity(1)
        .map_err(|e| OracleError::Range(e.to_string()))
        .map(|ch| OracleReport::new("identity satisfies the condition", f64::from(u8::from(eb_sufficient(&ch))), 0.0));
    out.push(CheckOutcome::new("identity channel is not entanglement breaking", identity, 0.0));
    out
}

fn normalization_item(config: &BatteryConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let points = [[0.0, 0.0], [1.5, -1.0], [3.0, 0.0], [-2.0, 2.0]];
    let id = FockOperator::identity(config.cutoff);
    // the truncated identity has a decaying characteristic function only for s < 0;
    // at s ≥ 0 the identity is carried exactly as a weight
    for s in ORDERINGS {
        let element = if s < 0.0 {
            PovmElement::finite(id.clone())
        } else {
            PovmElement { identity_weight: 1.0, finite: FockOperator::zeros(config.cutoff) }
        };
        let r = SpqdQuadrature::new(&element, s, &config.y_grid).and_then(|q| {
            let mut worst = 0.0f64;
            for z in points {
                worst = worst.max((q.at(z)? - TRACE_DELTA).abs());
            }
            Ok(OracleReport::new("max deviation from 1/(2π)", worst, 0.0))
        });
        out.push(CheckOutcome::new(format!("identity s={s}"), r, 1e-6));
    }
    for (m, outcomes) in oracle_models() {
        if outcomes.len() != 2 {
            continue;
        }
        let limit = m.convergence_limit();
        for s in ORDERINGS.into_iter().filter(|&s| s < limit) {
            out.push(CheckOutcome::new(format!("{} completeness s={s}", m.label()), completeness(&m, s, [0.8, -1.1]), 1e-12));
        }
    }
    out
}

fn positivity_item(config: &BatteryConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for tau in [0.1, 0.3, 0.5] {
        for z in [[0.0, 0.0], [1.0, 1.0], [-1.5, 0.5], [0.0, -2.0]] {
            let r = positivity_transfer(tau, z, config.cutoff)
                .map(|min| OracleReport::new("central minimum eigenvalue", min.min(0.0), 0.0));
            out.push(CheckOutcome::new(format!("τ={tau} z=({}, {})", z[0], z[1]), r, 1e-8));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn item_names_round_trip() {
        for k in ItemKind::ALL {
            assert_eq!(k.name().parse::<ItemKind>().unwrap(), k);
        }
        assert!("bogus".parse::<ItemKind>().is_err());
    }

    #[test]
    fn failed_checks_are_reported() {
        let c = CheckOutcome::new("x", Err(OracleError::Convergence("no".into())), 1.0);
        assert!(!c.passed());
        assert!(c.to_string().starts_with("FAIL"));
        assert!(!BatteryItem { kind: ItemKind::EbScan, checks: vec![] }.passed());
    }
}
