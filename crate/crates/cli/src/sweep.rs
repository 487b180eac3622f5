use std::collections::HashSet;

use v2x_core::engine::ScenarioKind;

use crate::CliError;

/// One campaign cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub scenario: ScenarioKind,
    pub cw: u32,
    pub density: f64,
}

impl SweepCell {
    pub fn name(&self) -> String {
        cell_name(self.scenario.label(), self.cw, self.density)
    }
}

pub(crate) fn cell_name(scenario: &str, cw: u32, density: f64) -> String {
    format!("{scenario}/cw={cw}/density={density}")
}

/// Cross product of scenarios, contention windows and densities.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    cells: Vec<SweepCell>,
}

impl SweepSpec {
    pub fn new(cells: Vec<SweepCell>) -> Result<Self, CliError> {
        if cells.is_empty() {
            return Err(CliError::Usage("sweep has no cells".into()));
        }
        let mut seen = HashSet::new();
        for c in &cells {
            if !seen.insert(c.name()) {
                return Err(CliError::Usage(format!("duplicate sweep cell {}", c.name())));
            }
        }
        Ok(Self { cells })
    }

    /// Scenario-major cross product, each list in the given order.
    pub fn cross(scenarios: &[ScenarioKind], cws: &[u32], densities: &[f64]) -> Result<Self, CliError> {
        let mut cells = Vec::new();
        for &scenario in scenarios {
            for &cw in cws {
                for &density in densities {
                    cells.push(SweepCell { scenario, cw, density });
                }
            }
        }
        Self::new(cells)
    }

    pub fn cells(&self) -> &[SweepCell] {
        &self.cells
    }
}
