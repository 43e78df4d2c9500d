//! Design variables, bounds, material data and the mass-in-motion objective.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Planar parallel manipulator family. Integer codes are the `d` gene values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Architecture {
    /// 3-PRR: actuated prismatic joints on the base triangle sides.
    #[serde(rename = "PRR")]
    Prr = 1,
    /// 3-RPR: actuated prismatic legs between two revolute joints.
    #[serde(rename = "RPR")]
    Rpr = 2,
    /// 3-RRR: actuated revolute joints at the base, two links of length `L_b` per leg.
    #[serde(rename = "RRR")]
    Rrr = 3,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::Prr, Architecture::Rpr, Architecture::Rrr];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(Architecture::Prr),
            2 => Some(Architecture::Rpr),
            3 => Some(Architecture::Rrr),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Architecture::Prr => "3-PRR",
            Architecture::Rpr => "3-RPR",
            Architecture::Rrr => "3-RRR",
        }
    }

    /// Number of intermediate links (each of length `L_b`) per leg.
    pub fn links_per_leg(self) -> usize {
        match self {
            Architecture::Rrr => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the five continuous design variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignField {
    BaseRadius,
    PlatformRadius,
    LinkLength,
    LegSectionRadius,
    PlatformSectionRadius,
}

impl DesignField {
    pub const ALL: [DesignField; 5] = [
        DesignField::BaseRadius,
        DesignField::PlatformRadius,
        DesignField::LinkLength,
        DesignField::LegSectionRadius,
        DesignField::PlatformSectionRadius,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            DesignField::BaseRadius => "R",
            DesignField::PlatformRadius => "r",
            DesignField::LinkLength => "L_b",
            DesignField::LegSectionRadius => "r_j",
            DesignField::PlatformSectionRadius => "r_p",
        }
    }
}

impl fmt::Display for DesignField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The five continuous variables as a record, used for bounds and configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lengths {
    #[serde(rename = "R")]
    pub base_radius: f64,
    #[serde(rename = "r")]
    pub platform_radius: f64,
    #[serde(rename = "L_b")]
    pub link_length: f64,
    #[serde(rename = "r_j")]
    pub leg_section_radius: f64,
    #[serde(rename = "r_p")]
    pub platform_section_radius: f64,
}

impl Lengths {
    pub fn to_array(&self) -> [f64; 5] {
        [
            self.base_radius,
            self.platform_radius,
            self.link_length,
            self.leg_section_radius,
            self.platform_section_radius,
        ]
    }

    pub fn from_array(v: [f64; 5]) -> Self {
        Lengths {
            base_radius: v[0],
            platform_radius: v[1],
            link_length: v[2],
            leg_section_radius: v[3],
            platform_section_radius: v[4],
        }
    }
}

/// A full design: architecture plus the five continuous variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignVector {
    pub architecture: Architecture,
    #[serde(flatten)]
    pub lengths: Lengths,
}

impl DesignVector {
    pub fn new(
        architecture: Architecture,
        base_radius: f64,
        platform_radius: f64,
        link_length: f64,
        leg_section_radius: f64,
        platform_section_radius: f64,
    ) -> Self {
        DesignVector {
            architecture,
            lengths: Lengths {
                base_radius,
                platform_radius,
                link_length,
                leg_section_radius,
                platform_section_radius,
            },
        }
    }

    pub fn base_radius(&self) -> f64 {
        self.lengths.base_radius
    }

    pub fn platform_radius(&self) -> f64 {
        self.lengths.platform_radius
    }

    pub fn link_length(&self) -> f64 {
        self.lengths.link_length
    }

    pub fn leg_section_radius(&self) -> f64 {
        self.lengths.leg_section_radius
    }

    pub fn platform_section_radius(&self) -> f64 {
        self.lengths.platform_section_radius
    }

    /// Same design with every length (including section radii) multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut v = self.lengths.to_array();
        v.iter_mut().for_each(|x| *x *= s);
        DesignVector {
            architecture: self.architecture,
            lengths: Lengths::from_array(v),
        }
    }

    pub fn with_architecture(&self, architecture: Architecture) -> Self {
        DesignVector {
            architecture,
            ..*self
        }
    }
}

/// Box bounds on the continuous variables. The architecture gene always spans {1, 2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lower: Lengths,
    pub upper: Lengths,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            lower: Lengths::from_array([0.5, 0.3, 0.5, 0.0, 0.0]),
            upper: Lengths::from_array([4.0, 4.0, 4.0, 0.1, 0.1]),
        }
    }
}

impl Bounds {
    pub fn check(&self) -> Result<(), DesignError> {
        let lo = self.lower.to_array();
        let hi = self.upper.to_array();
        for (i, field) in DesignField::ALL.iter().enumerate() {
            if !(lo[i].is_finite() && hi[i].is_finite()) || lo[i] > hi[i] || lo[i] < 0.0 {
                return Err(DesignError::InvalidBounds(*field));
            }
        }
        Ok(())
    }

    pub fn contains(&self, design: &DesignVector) -> bool {
        validate_bounds(design, self).is_ok()
    }
}

/// Isotropic material of the links and platform bars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// kg/m³
    pub density: f64,
    /// Young modulus, N/m²
    #[serde(rename = "E")]
    pub young_modulus: f64,
    /// Shear modulus, N/m²
    #[serde(rename = "G")]
    pub shear_modulus: f64,
}

impl Material {
    pub fn steel() -> Self {
        let young_modulus = 210e9;
        let poisson = 0.3;
        Material {
            density: 7850.0,
            young_modulus,
            shear_modulus: young_modulus / (2.0 * (1.0 + poisson)),
        }
    }

    pub fn check(&self) -> Result<(), DesignError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if ok(self.density) && ok(self.young_modulus) && ok(self.shear_modulus) {
            Ok(())
        } else {
            Err(DesignError::InvalidMaterial)
        }
    }
}

impl Default for Material {
    fn default() -> Self {
        Material::steel()
    }
}

/// Stiffness of the actuator control loops (1-dof virtual springs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorStiffness {
    /// N/m, used by the PRR and RPR actuators.
    pub prismatic: f64,
    /// N·m/rad, used by the RRR actuators.
    pub revolute: f64,
}

impl Default for ActuatorStiffness {
    fn default() -> Self {
        ActuatorStiffness {
            prismatic: 1e7,
            revolute: 1e6,
        }
    }
}

impl ActuatorStiffness {
    pub fn for_architecture(&self, architecture: Architecture) -> f64 {
        match architecture {
            Architecture::Rrr => self.revolute,
            _ => self.prismatic,
        }
    }
}

/// External wrench applied at the platform center, base-frame components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wrench {
    /// (F_x, F_y, F_z) in N
    pub force: [f64; 3],
    /// (τ_x, τ_y, τ_z) in N·m
    pub torque: [f64; 3],
}

impl Default for Wrench {
    /// ‖F_xy‖ = F_z = 100 N and τ_z = 100 N·m.
    fn default() -> Self {
        Wrench {
            force: [100.0, 0.0, 100.0],
            torque: [0.0, 0.0, 100.0],
        }
    }
}

impl Wrench {
    pub fn planar_force_norm(&self) -> f64 {
        self.force[0].hypot(self.force[1])
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.torque.iter()).all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("design variable {0} is outside its bounds")]
    OutOfBounds(DesignField),
    #[error("cross-section radius {0} must be strictly positive")]
    DegenerateSection(DesignField),
    #[error("length {0} must be strictly positive")]
    NonPositiveLength(DesignField),
    #[error("design variable {0} is not finite")]
    NonFinite(DesignField),
    #[error("bounds on {0} are inconsistent")]
    InvalidBounds(DesignField),
    #[error("material constants must be finite and strictly positive")]
    InvalidMaterial,
}

/// A design that passed [`validate`]; the only way to reach the evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedDesign(DesignVector);

impl ValidatedDesign {
    pub fn design(&self) -> &DesignVector {
        &self.0
    }

    pub fn architecture(&self) -> Architecture {
        self.0.architecture
    }

    pub fn into_inner(self) -> DesignVector {
        self.0
    }
}

impl std::ops::Deref for ValidatedDesign {
    type Target = DesignVector;

    fn deref(&self) -> &DesignVector {
        &self.0
    }
}

fn validate_bounds(design: &DesignVector, bounds: &Bounds) -> Result<(), DesignError> {
    let x = design.lengths.to_array();
    let lo = bounds.lower.to_array();
    let hi = bounds.upper.to_array();
    for (i, field) in DesignField::ALL.iter().enumerate() {
        if !x[i].is_finite() {
            return Err(DesignError::NonFinite(*field));
        }
        if x[i] < lo[i] || x[i] > hi[i] {
            return Err(DesignError::OutOfBounds(*field));
        }
    }
    Ok(())
}

/// Checks `design` against `bounds` and rejects zero lengths or cross-sections.
pub fn validate(design: &DesignVector, bounds: &Bounds) -> Result<ValidatedDesign, DesignError> {
    validate_bounds(design, bounds)?;
    let x = design.lengths.to_array();
    for (i, field) in DesignField::ALL.iter().enumerate() {
        if x[i] <= 0.0 {
            return Err(match field {
                DesignField::LegSectionRadius | DesignField::PlatformSectionRadius => {
                    DesignError::DegenerateSection(*field)
                }
                _ => DesignError::NonPositiveLength(*field),
            });
        }
    }
    Ok(ValidatedDesign(*design))
}

/// Mass of one intermediate leg link, kg.
pub fn link_mass(design: &DesignVector, material: &Material) -> f64 {
    PI * design.leg_section_radius().powi(2) * design.link_length() * material.density
}

/// Mass of the moving platform, made of three bars of length `r`, kg.
pub fn platform_mass(design: &DesignVector, material: &Material) -> f64 {
    3.0 * PI * design.platform_section_radius().powi(2) * design.platform_radius() * material.density
}

/// Mass in motion: `3·m_link + m_pf` for PRR and RPR, `6·m_link + m_pf` for RRR.
pub fn mass(design: &ValidatedDesign, material: &Material) -> f64 {
    let links = 3 * design.architecture().links_per_leg();
    links as f64 * link_mass(design, material) + platform_mass(design, material)
}
