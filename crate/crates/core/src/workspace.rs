//! Regular cylindrical workspace: grid sampling, feasibility, and the maximal radius.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::kinematics::Pose;
use crate::model::Architecture;
use crate::performance::{ConstraintReport, DesignAnalyzer};

/// Cylinder in `(x, y, φ)`: a disc of radius `radius` swept over an orientation band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceSpec {
    pub center_x: f64,
    pub center_y: f64,
    pub center_phi: f64,
    /// Total rotation range, rad, centered on `center_phi`.
    pub rotation_range: f64,
    pub radius: f64,
}

impl Default for WorkspaceSpec {
    fn default() -> Self {
        WorkspaceSpec {
            center_x: 0.0,
            center_y: 0.0,
            center_phi: 0.0,
            rotation_range: 20f64.to_radians(),
            radius: 0.0,
        }
    }
}

impl WorkspaceSpec {
    pub fn with_radius(&self, radius: f64) -> Self {
        WorkspaceSpec { radius, ..*self }
    }

    pub fn is_valid(&self) -> bool {
        self.radius >= 0.0
            && self.rotation_range > 0.0
            && [self.center_x, self.center_y, self.center_phi, self.rotation_range, self.radius]
                .iter()
                .all(|v| v.is_finite())
    }
}

/// Grid resolution of the workspace discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_radial: usize,
    pub n_angular: usize,
    pub n_orientation: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_radial: 5,
            n_angular: 12,
            n_orientation: 5,
        }
    }
}

impl GridSpec {
    pub fn is_valid(&self) -> bool {
        self.n_radial >= 1 && self.n_angular >= 2 && self.n_orientation >= 2
    }

    /// Number of poses produced for a positive radius.
    pub fn len(&self) -> usize {
        self.n_orientation * (1 + self.n_radial * self.n_angular)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn orientations(spec: &WorkspaceSpec, grid: &GridSpec) -> impl Iterator<Item = f64> {
    let n = grid.n_orientation;
    let range = spec.rotation_range;
    let start = spec.center_phi - 0.5 * range;
    (0..n).map(move |k| start + range * k as f64 / (n - 1) as f64)
}

fn ring(spec: &WorkspaceSpec, grid: &GridSpec, k: usize) -> Vec<Pose> {
    let radius = spec.radius * k as f64 / grid.n_radial as f64;
    let mut out = Vec::with_capacity(grid.n_angular * grid.n_orientation);
    for j in 0..grid.n_angular {
        let angle = 2.0 * PI * j as f64 / grid.n_angular as f64;
        let (s, c) = angle.sin_cos();
        for phi in orientations(spec, grid) {
            out.push(Pose::new(spec.center_x + radius * c, spec.center_y + radius * s, phi));
        }
    }
    out
}

fn center(spec: &WorkspaceSpec, grid: &GridSpec) -> Vec<Pose> {
    orientations(spec, grid)
        .map(|phi| Pose::new(spec.center_x, spec.center_y, phi))
        .collect()
}

/// Grid poses: the center at every orientation, then rings `k = 1..n_radial`
/// (radial-major, then angular, then orientation).
pub fn grid_points(spec: &WorkspaceSpec, grid: &GridSpec) -> Vec<Pose> {
    let mut out = center(spec, grid);
    if spec.radius > 0.0 {
        for k in 1..=grid.n_radial {
            out.extend(ring(spec, grid, k));
        }
    }
    out
}

/// Outcome of a workspace check.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceCheck {
    pub feasible: bool,
    /// Report at the first pose that failed, in evaluation order.
    pub first_failure: Option<ConstraintReport>,
}

/// Evaluation order: center, then the outer ring first, since outer poses fail most often.
fn evaluation_order(spec: &WorkspaceSpec, grid: &GridSpec) -> impl Iterator<Item = Pose> {
    let mut poses = center(spec, grid);
    if spec.radius > 0.0 {
        for k in (1..=grid.n_radial).rev() {
            poses.extend(ring(spec, grid, k));
        }
    }
    poses.into_iter()
}

/// Whether every grid pose passes all constraints in the analyzer's working mode.
pub fn workspace_feasible(analyzer: &DesignAnalyzer, spec: &WorkspaceSpec, grid: &GridSpec) -> WorkspaceCheck {
    for pose in evaluation_order(spec, grid) {
        if !analyzer.passes(&pose) {
            return WorkspaceCheck {
                feasible: false,
                first_failure: Some(analyzer.evaluate(&pose)),
            };
        }
    }
    WorkspaceCheck {
        feasible: true,
        first_failure: None,
    }
}

fn feasible(analyzer: &DesignAnalyzer, spec: &WorkspaceSpec, grid: &GridSpec) -> bool {
    evaluation_order(spec, grid).all(|pose| analyzer.passes(&pose))
}

/// Largest radius the platform center can reach from `O`, an upper bracket for the search.
pub fn radius_upper_bound(analyzer: &DesignAnalyzer) -> f64 {
    let d = analyzer.mechanism().design();
    let extension = match analyzer.architecture() {
        Architecture::Prr | Architecture::Rpr => d.link_length(),
        Architecture::Rrr => 2.0 * d.link_length(),
    };
    d.base_radius() + d.platform_radius() + extension
}

/// Bisection on the workspace radius; returns the largest radius found feasible, 0 if the center fails.
pub fn max_regular_workspace(analyzer: &DesignAnalyzer, spec: &WorkspaceSpec, grid: &GridSpec, tol: f64) -> f64 {
    let base = spec.with_radius(0.0);
    if !feasible(analyzer, &base, grid) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = radius_upper_bound(analyzer);
    if feasible(analyzer, &spec.with_radius(hi), grid) {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(analyzer, &spec.with_radius(mid), grid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
