//! Objective and feasibility evaluation of a single design.

use crate::kinematics::Pose;
use crate::model::{link_mass, platform_mass, validate, Bounds, DesignVector, Material};
use crate::performance::{ConstraintReport, Criteria, DesignAnalyzer};
use crate::workspace::{max_regular_workspace, workspace_feasible, GridSpec, WorkspaceSpec};

/// Violation assigned to designs rejected before any pose is analyzed.
const REJECTED: f64 = 100.0;
const NO_CHARACTERISTIC_LENGTH: f64 = 50.0;

/// Everything fixed across the designs of one optimization problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub bounds: Bounds,
    pub material: Material,
    pub criteria: Criteria,
    pub workspace: WorkspaceSpec,
    pub grid: GridSpec,
    /// Bisection tolerance on R_w, m.
    pub tolerance: f64,
}

impl Default for Problem {
    fn default() -> Self {
        Problem {
            bounds: Bounds::default(),
            material: Material::steel(),
            criteria: Criteria::default(),
            workspace: WorkspaceSpec::default(),
            grid: GridSpec::default(),
            tolerance: 1e-3,
        }
    }
}

/// Objectives and feasibility of one design.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub design: DesignVector,
    /// kg
    pub mass: f64,
    /// Maximal regular workspace radius, m; 0 when infeasible.
    pub workspace_radius: f64,
    pub feasible: bool,
    pub characteristic_length: Option<f64>,
    /// Constraints at the pose that limits the workspace (first failure just beyond R_w).
    pub limiting: Option<ConstraintReport>,
    /// Constraint shortfall used to rank infeasible designs; 0 when feasible.
    pub violation: f64,
    /// Why the design never reached pose analysis.
    pub rejection: Option<String>,
}

impl super::pareto::Objectives for Evaluation {
    fn mass(&self) -> f64 {
        self.mass
    }

    fn workspace_radius(&self) -> f64 {
        self.workspace_radius
    }
}

impl Problem {
    /// Mass, R_w and feasibility; errors fold into an infeasible result.
    pub fn evaluate(&self, design: &DesignVector) -> Evaluation {
        let mass = raw_mass(design, &self.material);
        let mut out = Evaluation {
            design: *design,
            mass,
            workspace_radius: 0.0,
            feasible: false,
            characteristic_length: None,
            limiting: None,
            violation: REJECTED,
            rejection: None,
        };
        let validated = match validate(design, &self.bounds) {
            Ok(v) => v,
            Err(e) => {
                out.rejection = Some(e.to_string());
                return out;
            }
        };
        let analyzer = match DesignAnalyzer::new(&validated, &self.criteria) {
            Ok(a) => a,
            Err(e) => {
                out.violation = NO_CHARACTERISTIC_LENGTH;
                out.rejection = Some(e.to_string());
                return out;
            }
        };
        out.characteristic_length = Some(analyzer.characteristic_length());
        let center = workspace_feasible(&analyzer, &self.workspace.with_radius(0.0), &self.grid);
        if let Some(report) = center.first_failure {
            out.violation = report.violation(&self.criteria).max(f64::MIN_POSITIVE);
            out.limiting = Some(report);
            return out;
        }
        let radius = max_regular_workspace(&analyzer, &self.workspace, &self.grid, self.tolerance);
        let beyond = workspace_feasible(&analyzer, &self.workspace.with_radius(radius + self.tolerance), &self.grid);
        out.limiting = beyond.first_failure;
        if radius > 0.0 {
            out.workspace_radius = radius;
            out.feasible = true;
            out.violation = 0.0;
        } else {
            // The center holds but no positive radius does: barely infeasible.
            out.violation = f64::MIN_POSITIVE;
        }
        out
    }

    /// Report at an arbitrary pose, for diagnostics.
    pub fn report_at(&self, design: &DesignVector, pose: &Pose) -> Option<ConstraintReport> {
        let validated = validate(design, &self.bounds).ok()?;
        DesignAnalyzer::new(&validated, &self.criteria).ok().map(|a| a.evaluate(pose))
    }
}

/// Mass formula applied without validation, so rejected designs still carry a mass.
fn raw_mass(design: &DesignVector, material: &Material) -> f64 {
    let legs = 3 * design.architecture.links_per_leg();
    legs as f64 * link_mass(design, material) + platform_mass(design, material)
}
