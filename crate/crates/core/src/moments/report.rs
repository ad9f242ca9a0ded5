use std::fmt::Write as _;

use serde::Serialize;

use super::exact::ExactMoments;
use super::montecarlo::{pairwise_sum, McEstimate};
use crate::curves::{CurveSpec, Family, TraceRecord};
use crate::error::{Error, Result};

/// Moments of the normalized trace a₁ = t/√p over a prime sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveMoments {
    pub pmax: u64,
    pub primes: usize,
    /// Means of a₁^n for n = 1, …, n_max.
    pub estimates: Vec<f64>,
}

pub fn curve_moments(records: &[TraceRecord], pmax: u64, n_max: u32) -> Result<CurveMoments> {
    if records.is_empty() {
        return Err(Error::InvalidArgument(format!("no good primes up to {pmax}")));
    }
    let a1: Vec<f64> = records.iter().map(TraceRecord::a1).collect();
    let estimates = (1..=n_max as i32)
        .map(|n| pairwise_sum(&a1.iter().map(|x| x.powi(n)).collect::<Vec<_>>()) / a1.len() as f64)
        .collect();
    Ok(CurveMoments { pmax, primes: records.len(), estimates })
}

/// Exact, Monte Carlo and curve moments of one statistic for one curve.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub family: Family,
    pub param: u32,
    pub c: i64,
    pub twist_class: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cosets: Option<usize>,
    pub statistic: usize,
    pub orders: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveMoments>,
}

impl MomentReport {
    pub fn new(spec: &CurveSpec, twist_class: Option<u64>, statistic: usize, n_max: u32) -> Self {
        Self {
            family: spec.family(),
            param: spec.param(),
            c: spec.c(),
            twist_class,
            cosets: None,
            statistic,
            orders: (1..=n_max).collect(),
            exact: None,
            mc: None,
            curve: None,
        }
    }

    pub fn with_exact(mut self, exact: &ExactMoments) -> Self {
        self.cosets = Some(exact.cosets);
        self.exact = Some(exact.values().iter().map(|r| r.to_string()).collect());
        self
    }

    pub fn with_mc(mut self, mc: McEstimate) -> Self {
        self.mc = Some(mc);
        self
    }

    pub fn with_cosets(mut self, cosets: usize) -> Self {
        self.cosets = Some(cosets);
        self
    }

    pub fn with_curve(mut self, curve: CurveMoments) -> Self {
        self.curve = Some(curve);
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rows a_i (curve), mc, mu_i (exact), each with the values M_1 … M_n.
    pub fn table(&self) -> MomentTable {
        let mut t = MomentTable::new(self.orders.clone());
        let label = |p: &str| format!("{p}{}", self.statistic);
        if let Some(curve) = &self.curve {
            t.push(label("a"), self.c.to_string(), curve.estimates.iter().map(|v| fmt_f(*v)).collect());
        }
        if let Some(mc) = &self.mc {
            t.push(format!("mc_{}", label("a")), self.c.to_string(), mc.estimates.iter().map(|v| fmt_f(*v)).collect());
            t.push(format!("mc_{}_stderr", label("a")), self.c.to_string(), mc.stderr.iter().map(|v| fmt_f(*v)).collect());
        }
        if let Some(exact) = &self.exact {
            t.push(label("mu"), self.c.to_string(), exact.clone());
        }
        t
    }
}

pub fn fmt_f(v: f64) -> String {
    if v.is_finite() && v.abs() >= 1e-4 && v.abs() < 1e9 {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.6e}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub c: String,
    pub values: Vec<String>,
}

/// Rows of moments M_1 … M_n side by side, one row per source.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentTable {
    pub orders: Vec<u32>,
    pub rows: Vec<TableRow>,
}

impl MomentTable {
    pub fn new(orders: Vec<u32>) -> Self {
        Self { orders, rows: Vec::new() }
    }

    pub fn push(&mut self, label: String, c: String, values: Vec<String>) {
        self.rows.push(TableRow { label, c, values });
    }

    pub fn extend(&mut self, other: MomentTable) {
        self.rows.extend(other.rows);
    }

    /// `row,c,M1,…,Mn` with every order.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["row".to_string(), "c".to_string()];
        header.extend(self.orders.iter().map(|n| format!("M{n}")));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.label.clone(), r.c.clone()];
            rec.extend(r.values.iter().cloned());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Aligned text. With `even_only` the odd orders, which vanish for a₁, are left out.
    pub fn to_text(&self, even_only: bool) -> String {
        let cols: Vec<usize> = self
            .orders
            .iter()
            .enumerate()
            .filter(|(_, n)| !even_only || *n % 2 == 0)
            .map(|(k, _)| k)
            .collect();
        let mut grid: Vec<Vec<String>> = vec![{
            let mut h = vec!["".to_string(), "c".to_string()];
            h.extend(cols.iter().map(|&k| format!("M{}", self.orders[k])));
            h
        }];
        for r in &self.rows {
            let mut line = vec![r.label.clone(), r.c.clone()];
            line.extend(cols.iter().map(|&k| r.values.get(k).cloned().unwrap_or_default()));
            grid.push(line);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|j| grid.iter().map(|row| row[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &grid {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
        }
        out
    }
}
