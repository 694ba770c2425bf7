//! Performance profiles: for each scheme, the fraction of test cases on
//! which it ran within a factor `x` of the fastest scheme for that case.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use masked_spgemm::MultiplyPlan;

use crate::record::ExperimentRecord;

/// Sorted slowdown ratios per scheme. A scheme with no record for a case
/// gets ratio `∞` there.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceProfile {
    pub cases: usize,
    pub ratios: BTreeMap<String, Vec<f64>>,
    /// Fastest scheme per case (ties go to the earlier plan).
    pub winners: Vec<String>,
}

fn case_key(r: &ExperimentRecord) -> String {
    format!(
        "{}|{}|{}|{:?}|{:?}|{:?}|{}",
        r.benchmark, r.input, r.complemented, r.scale, r.degree, r.mask_degree, r.threads
    )
}

/// Position of a label in the canonical plan order; unknown labels sort
/// after all known ones.
pub fn plan_rank(label: &str) -> usize {
    MultiplyPlan::all()
        .position(|p| p.label() == label)
        .unwrap_or(usize::MAX)
}

pub fn performance_profile(records: &[ExperimentRecord]) -> PerformanceProfile {
    let mut best: BTreeMap<String, HashMap<String, f64>> = BTreeMap::new();
    let mut schemes: Vec<String> = Vec::new();
    for r in records {
        let label = r.plan_label();
        if !schemes.contains(&label) {
            schemes.push(label.clone());
        }
        let t = best.entry(case_key(r)).or_default().entry(label).or_insert(f64::INFINITY);
        *t = t.min(r.seconds);
    }
    schemes.sort_by(|a, b| plan_rank(a).cmp(&plan_rank(b)).then(a.cmp(b)));

    let mut ratios: BTreeMap<String, Vec<f64>> = schemes.iter().map(|s| (s.clone(), Vec::new())).collect();
    let mut winners = Vec::with_capacity(best.len());
    for times in best.values() {
        let mut winner: Option<(&String, f64)> = None;
        for s in &schemes {
            if let Some(&t) = times.get(s) {
                if winner.map_or(true, |(_, w)| t < w) {
                    winner = Some((s, t));
                }
            }
        }
        let (name, fastest) = winner.expect("every case has at least one record");
        winners.push(name.clone());
        for s in &schemes {
            let ratio = match times.get(s) {
                Some(&t) if t == fastest => 1.0,
                Some(&t) => t / fastest,
                None => f64::INFINITY,
            };
            ratios.get_mut(s).unwrap().push(ratio);
        }
    }
    for v in ratios.values_mut() {
        v.sort_by(f64::total_cmp);
    }
    PerformanceProfile { cases: best.len(), ratios, winners }
}

impl PerformanceProfile {
    /// Fraction of cases on which `scheme` is within factor `x` of the best.
    /// Missing cases never count, even at `x = ∞`.
    pub fn fraction_within(&self, scheme: &str, x: f64) -> f64 {
        match self.ratios.get(scheme) {
            Some(r) if self.cases > 0 => r.partition_point(|&v| v.is_finite() && v <= x) as f64 / self.cases as f64,
            _ => 0.0,
        }
    }

    /// Breakpoints `(x, y)` of the step curve, one per distinct finite ratio.
    pub fn curve(&self, scheme: &str) -> Vec<(f64, f64)> {
        let Some(r) = self.ratios.get(scheme) else {
            return Vec::new();
        };
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in r.iter().enumerate().filter(|(_, x)| x.is_finite()) {
            let y = (i + 1) as f64 / self.cases as f64;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = y,
                _ => out.push((x, y)),
            }
        }
        out
    }

    pub fn wins(&self, scheme: &str) -> usize {
        self.winners.iter().filter(|w| *w == scheme).count()
    }

    /// Plain-text table of `y(x)` at the given factors.
    pub fn table(&self, xs: &[f64]) -> String {
        let mut s = String::new();
        write!(s, "{:<12} {:>6}", "scheme", "wins").unwrap();
        for x in xs {
            write!(s, " {:>8}", format!("x={x}")).unwrap();
        }
        s.push('\n');
        for name in self.ratios.keys() {
            write!(s, "{:<12} {:>6}", name, self.wins(name)).unwrap();
            for &x in xs {
                write!(s, " {:>8.3}", self.fraction_within(name, x)).unwrap();
            }
            s.push('\n');
        }
        s
    }
}
