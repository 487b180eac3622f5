//! Grouped-bar data: one group per (density, CW) with three bars, suburban
//! raw PDR, urban raw PDR and urban blockage-discounted PDR. The suburban
//! discounted bar is identical to the raw one and is not repeated.

use v2x_core::metrics::PdrReport;

use crate::report::csv_dialect;
use crate::sweep::cell_name;
use crate::CliError;

pub const PLOT_HEADER: [&str; 5] = ["density", "cw", "suburban_raw", "urban_raw", "urban_discounted"];

const URBAN: &str = "urban-grid";
const DEFAULT_SUBURBAN: &str = "suburban-cross";

fn is_suburban(r: &PdrReport) -> bool {
    r.scenario.starts_with("suburban")
}

pub fn emit_plot_data(reports: &[PdrReport]) -> Result<Vec<u8>, CliError> {
    let mut groups: Vec<(f64, u32)> = reports.iter().map(|r| (r.density, r.cw)).collect();
    groups.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    groups.dedup();
    let suburban_label = reports
        .iter()
        .find(|r| is_suburban(r))
        .map_or(DEFAULT_SUBURBAN, |r| r.scenario.as_str());

    let mut missing = Vec::new();
    let mut rows = Vec::with_capacity(groups.len());
    for &(density, cw) in &groups {
        let in_group = |r: &&PdrReport| r.density == density && r.cw == cw;
        let suburban: Vec<&PdrReport> = reports.iter().filter(in_group).filter(|r| is_suburban(r)).collect();
        let urban: Vec<&PdrReport> = reports.iter().filter(in_group).filter(|r| r.scenario == URBAN).collect();
        for (found, label) in [(&suburban, suburban_label), (&urban, URBAN)] {
            match found.len() {
                0 => missing.push(cell_name(label, cw, density)),
                1 => {}
                _ => return Err(CliError::DuplicateCell(cell_name(&found[0].scenario, cw, density))),
            }
        }
        if let (Some(s), Some(u)) = (suburban.first(), urban.first()) {
            rows.push(vec![
                density.to_string(),
                cw.to_string(),
                format!("{:.6}", s.pdr_raw_mean),
                format!("{:.6}", u.pdr_raw_mean),
                format!("{:.6}", u.pdr_discounted_mean),
            ]);
        }
    }
    if !missing.is_empty() {
        return Err(CliError::IncompleteSweep(missing));
    }
    Ok(csv_dialect(&rows, &PLOT_HEADER))
}
