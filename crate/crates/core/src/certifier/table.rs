use std::fmt;

use rayon::prelude::*;

use super::s_min_isotropic;
use crate::channels::{ChannelClass, ChannelTag};

/// Closed-form breaking threshold of a channel class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableEntry {
    /// Breaks every measurement set (`s_min ≤ −1`).
    All,
    /// Breaks only classical sets (`s_min = 1`).
    None,
    /// Breaks sets with non-negative `W⁽ˢ⁾` for `s ≥` the value.
    Threshold(f64),
}

impl TableEntry {
    /// Distance between an eigenvalue-based `s_min` and this entry.
    pub fn deviation(&self, s_min: f64) -> f64 {
        match self {
            TableEntry::All => (s_min + 1.0).max(0.0),
            TableEntry::None => (s_min - 1.0).abs(),
            TableEntry::Threshold(v) => (s_min - v).abs(),
        }
    }
}

impl fmt::Display for TableEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableEntry::All => f.write_str("all"),
            TableEntry::None => f.write_str("none"),
            TableEntry::Threshold(v) => write!(f, "{v}"),
        }
    }
}

pub fn table1_closed_form(c: &ChannelClass) -> TableEntry {
    let (tau, nbar) = (c.tau(), c.nbar());
    match c.tag() {
        ChannelTag::A1 | ChannelTag::A2 => TableEntry::All,
        ChannelTag::B1 => TableEntry::Threshold((5f64.sqrt() - 1.0) / 2.0),
        ChannelTag::B2 => TableEntry::Threshold(1.0 - nbar),
        ChannelTag::B2Id => TableEntry::None,
        ChannelTag::CLoss => TableEntry::Threshold(tau * (2.0 * nbar + 2.0) - (2.0 * nbar + 1.0)),
        ChannelTag::CAmp => TableEntry::Threshold(2.0 * nbar * (1.0 - tau) + 1.0),
        ChannelTag::D => TableEntry::Threshold(2.0 * tau * nbar - (2.0 * nbar + 1.0)),
    }
}

/// Parameter grid for the table reproduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Grid {
    pub loss_taus: Vec<f64>,
    pub amp_taus: Vec<f64>,
    pub conjugate_taus: Vec<f64>,
    pub nbars: Vec<f64>,
}

impl Default for Table1Grid {
    /// 21 transmissivities per class (the open interval (0, 1) for loss, `[1, 5]`
    /// for amplifiers, `[−4, 0]` for conjugate amplifiers) and `n̄ ∈ {0, 0.5, 1, 2}`.
    fn default() -> Self {
        let linspace = |a: f64, b: f64| -> Vec<f64> { (0..21).map(|k| a + (b - a) * k as f64 / 20.0).collect() };
        Self {
            loss_taus: (1..=21).map(|k| k as f64 / 22.0).collect(),
            amp_taus: linspace(1.0, 5.0),
            conjugate_taus: linspace(-4.0, 0.0),
            nbars: vec![0.0, 0.5, 1.0, 2.0],
        }
    }
}

impl Table1Grid {
    /// All classes on this grid, in table order. B1 and B2_Id do not depend on n̄
    /// and get one row each.
    pub fn classes(&self, only: Option<ChannelTag>) -> Vec<ChannelClass> {
        let mut out = Vec::new();
        for tag in ChannelTag::ALL {
            if only.is_some_and(|o| o != tag) {
                continue;
            }
            let taus: Vec<f64> = match tag {
                ChannelTag::CLoss => self.loss_taus.clone(),
                ChannelTag::CAmp => self.amp_taus.clone(),
                ChannelTag::D => self.conjugate_taus.clone(),
                _ => vec![tag.fixed_tau().expect("fixed class")],
            };
            let nbars: &[f64] = if matches!(tag, ChannelTag::B1 | ChannelTag::B2Id) { &[0.0] } else { &self.nbars };
            for &tau in &taus {
                for &nbar in nbars {
                    out.push(ChannelClass::new(tag, tau, nbar).expect("grid inside class range"));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub class: ChannelClass,
    pub s_min_eigen: f64,
    pub s_min_closed: TableEntry,
    pub abs_diff: f64,
}

/// Eigenvalue-based `s_min` against the closed forms, one row per grid class.
pub fn reproduce_table1(grid: &Table1Grid, only: Option<ChannelTag>) -> Vec<Table1Row> {
    grid.classes(only)
        .into_par_iter()
        .map(|class| {
            let ch = class.channel().expect("catalogue classes are CP");
            let s_min_eigen = s_min_isotropic(&ch);
            let s_min_closed = table1_closed_form(&class);
            Table1Row { class, s_min_eigen, s_min_closed, abs_diff: s_min_closed.deviation(s_min_eigen) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let c = |tag, tau, nbar| table1_closed_form(&ChannelClass::new(tag, tau, nbar).unwrap());
        assert_eq!(c(ChannelTag::B2, 1.0, 0.3), TableEntry::Threshold(0.7));
        assert_eq!(c(ChannelTag::CAmp, 2.0, 1.0), TableEntry::Threshold(-1.0));
        assert_eq!(c(ChannelTag::D, -0.5, 1.0), TableEntry::Threshold(-4.0));
        assert_eq!(c(ChannelTag::A1, 0.0, 2.0), TableEntry::All);
        assert_eq!(c(ChannelTag::B2Id, 1.0, 0.0), TableEntry::None);
    }

    #[test]
    fn default_grid_agrees() {
        let rows = reproduce_table1(&Table1Grid::default(), None);
        assert_eq!(rows.len(), 4 + 4 + 1 + 4 + 1 + 3 * 84);
        let worst = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
        assert!(worst <= 1e-9, "{worst}");
        let tags: Vec<_> = rows.iter().map(|r| r.class.tag()).collect();
        assert!(tags.windows(2).all(|w| w[0] <= w[1]), "rows stay in table order");
    }

    #[test]
    fn fully_breaking_classes() {
        for row in reproduce_table1(&Table1Grid::default(), Some(ChannelTag::A2)) {
            let expected = -(2.0 * row.class.nbar() + 1.0);
            assert!((row.s_min_eigen - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_boundary() {
        let grid = Table1Grid { loss_taus: vec![0.5], nbars: vec![0.0], ..Table1Grid::default() };
        let rows = reproduce_table1(&grid, Some(ChannelTag::CLoss));
        assert_eq!(rows.len(), 1);
        assert!(rows[0].s_min_eigen.abs() < 1e-15);
    }
}
