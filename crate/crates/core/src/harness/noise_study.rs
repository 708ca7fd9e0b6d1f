use serde::{Deserialize, Serialize};

use super::config::NoiseStudyConfig;
use crate::error::Result;
use crate::noise::{stochastic_sup_ratio_study, GrowthTable, NoiseConditionReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseStudyResult {
    pub name: String,
    pub table: GrowthTable,
    pub median_growth: Vec<f64>,
    pub overall_growth: f64,
}

pub fn run_noise_study(cfg: &NoiseStudyConfig) -> Result<Vec<NoiseStudyResult>> {
    cfg.validate()?;
    cfg.cases
        .iter()
        .map(|c| {
            let table = stochastic_sup_ratio_study(&c.spectrum, &c.noise, &c.n_max, c.n_seeds, c.tail_factor)?;
            Ok(NoiseStudyResult {
                name: c.name.clone(),
                median_growth: table.median_growth(),
                overall_growth: table.overall_growth(),
                table,
            })
        })
        .collect()
}

/// Growth table as CSV: `n_max,median_sup,min_sup,max_sup`.
pub fn growth_csv(result: &NoiseStudyResult) -> String {
    let mut out = String::from("n_max,median_sup,min_sup,max_sup\n");
    for r in &result.table.rows {
        out.push_str(&format!("{},{},{},{}\n", r.n_max, r.median_sup, r.min_sup, r.max_sup));
    }
    out
}

/// Ratio curve as CSV: `n,ratio_plain,ratio_kappa` (last column empty
/// without `κ`).
pub fn ratio_curve_csv(report: &NoiseConditionReport) -> String {
    let mut out = String::from("n,ratio_plain,ratio_kappa\n");
    for (i, r) in report.ratios_plain.iter().enumerate() {
        let k = report
            .ratios_kappa
            .as_ref()
            .map(|v| v[i].to_string())
            .unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", i + 1, r, k));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::condition_ratios;

    #[test]
    fn curve_csv_layout() {
        let report = condition_ratios(&[1.0, 0.5], &[1.0, 1.0], None, 1).unwrap();
        assert_eq!(ratio_curve_csv(&report), "n,ratio_plain,ratio_kappa\n1,4,\n");
    }
}
