pub mod cli;
pub mod config;
pub mod kinematics;
pub mod model;
pub mod moga;
pub mod performance;
pub mod stiffness;
pub mod workspace;
