#![allow(dead_code)]

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector2, Vector3, Vector6};
use ppm_core::kinematics::{LegSolution, Mechanism, Pose, WorkingMode};
use ppm_core::model::{validate, Architecture, Bounds, DesignVector, Lengths, ValidatedDesign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DESIGN_I: [f64; 5] = [1.412, 0.319, 0.620, 0.026, 0.023];
pub const DESIGN_II: [f64; 5] = [3.066, 1.283, 1.896, 0.036, 0.056];
pub const DESIGN_III: [f64; 5] = [3.872, 1.947, 1.977, 0.039, 0.096];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn design(a: Architecture, x: [f64; 5]) -> DesignVector {
    DesignVector {
        architecture: a,
        lengths: Lengths::from_array(x),
    }
}

pub fn validated(a: Architecture, x: [f64; 5]) -> ValidatedDesign {
    validate(&design(a, x), &Bounds::default()).expect("design within default bounds")
}

/// Random design inside the default bounds with non-degenerate sections.
pub fn random_design(rng: &mut ChaCha8Rng, a: Architecture) -> ValidatedDesign {
    let x = [
        rng.random_range(0.5..4.0),
        rng.random_range(0.3..4.0),
        rng.random_range(0.5..4.0),
        rng.random_range(0.005..0.1),
        rng.random_range(0.005..0.1),
    ];
    validated(a, x)
}

/// Random design, pose and working mode for which all three legs have an IK solution
/// and the leg directions are not nearly parallel to the rails or cranks.
pub fn random_configuration(rng: &mut ChaCha8Rng, a: Architecture) -> (Mechanism, Pose, WorkingMode, [LegSolution; 3]) {
    use ppm_core::kinematics::Branch;
    loop {
        let mech = Mechanism::new(&random_design(rng, a));
        let d = mech.design();
        let reach = 0.5 * d.base_radius();
        let pose = Pose::new(
            rng.random_range(-reach..reach),
            rng.random_range(-reach..reach),
            rng.random_range(-0.6..0.6),
        );
        let b = |r: &mut ChaCha8Rng| if r.random::<bool>() { Branch::Plus } else { Branch::Minus };
        let mode = WorkingMode([b(rng), b(rng), b(rng)]);
        let Ok(legs) = mech.solve_legs(&pose, &mode) else { continue };
        let jac = mech.jacobian(&pose, &legs);
        let serial_ok = (0..3).all(|i| jac.serial[(i, i)].abs() > 0.05 * if a == Architecture::Rrr { d.link_length() } else { 1.0 });
        if serial_ok && jac.parallel.determinant().abs() > 1e-2 * d.platform_radius() {
            return (mech, pose, mode, legs);
        }
    }
}

pub fn inverse_condition_number(m: &Matrix3<f64>) -> f64 {
    // σ_min / σ_max from an SVD, used only as a conditioning filter
    let s = m.svd(false, false).singular_values;
    s.min() / s.max()
}

fn translation(v: Vector3<f64>) -> Matrix4<f64> {
    let mut t = Matrix4::identity();
    t.fixed_view_mut::<3, 1>(0, 3).copy_from(&v);
    t
}

fn tx(d: f64) -> Matrix4<f64> {
    translation(Vector3::new(d, 0.0, 0.0))
}

fn rz(a: f64) -> Matrix4<f64> {
    let (s, c) = a.sin_cos();
    let mut t = Matrix4::identity();
    t[(0, 0)] = c;
    t[(0, 1)] = -s;
    t[(1, 0)] = s;
    t[(1, 1)] = c;
    t
}

/// Homogeneous matrix of a small 6-dof deflection `(dx, dy, dz, rx, ry, rz)` in the local frame.
fn spring6(d: &Vector6<f64>) -> Matrix4<f64> {
    let w = Vector3::new(d[3], d[4], d[5]);
    let r = nalgebra::Rotation3::from_scaled_axis(w);
    let mut t = Matrix4::identity();
    t.fixed_view_mut::<3, 3>(0, 0).copy_from(r.matrix());
    t.fixed_view_mut::<3, 1>(0, 3).copy_from(&Vector3::new(d[0], d[1], d[2]));
    t
}

fn angle(v: Vector2<f64>) -> f64 {
    v.y.atan2(v.x)
}

enum Element {
    Fixed(Matrix4<f64>),
    Rz(Var),
    Tx(Var),
    Spring6(usize),
}

/// A variable joint: passive revolute `k` or spring coordinate `k`, with its rest value.
enum Var {
    Passive(usize, f64),
    Spring(usize, f64),
}

/// Transform chain of one leg from the base frame to a frame at `P` along the platform bar,
/// written from the joint points alone. Spring coordinates are numbered in chain order.
pub struct LegChain {
    elements: Vec<Element>,
    pub springs: usize,
}

impl LegChain {
    pub fn new(mech: &Mechanism, leg: &LegSolution, pose: &Pose) -> LegChain {
        let a = leg.base_point;
        let b = leg.knee;
        let c = leg.platform_point;
        let p = pose.position();
        let start = |pt: Vector2<f64>, ang: f64| Element::Fixed(translation(Vector3::new(pt.x, pt.y, 0.0)) * rz(ang));
        let link_angle = angle(c - b);
        let bar_angle = angle(p - c);
        let mut e = Vec::new();
        match mech.architecture() {
            Architecture::Prr => {
                let u = mech.layout().rail_directions[leg.index];
                let rail = angle(u);
                e.push(start(b, rail));
                e.push(Element::Tx(Var::Spring(0, 0.0)));
                e.push(Element::Rz(Var::Passive(0, link_angle - rail)));
                e.push(Element::Fixed(tx((c - b).norm())));
                e.push(Element::Spring6(1));
                e.push(Element::Rz(Var::Passive(1, bar_angle - link_angle)));
                e.push(Element::Fixed(tx((p - c).norm())));
                e.push(Element::Spring6(7));
                LegChain { elements: e, springs: 13 }
            }
            Architecture::Rpr => {
                e.push(start(a, 0.0));
                e.push(Element::Rz(Var::Passive(0, link_angle)));
                e.push(Element::Fixed(tx((c - a).norm())));
                e.push(Element::Spring6(0));
                e.push(Element::Tx(Var::Spring(6, 0.0)));
                e.push(Element::Rz(Var::Passive(1, bar_angle - link_angle)));
                e.push(Element::Fixed(tx((p - c).norm())));
                e.push(Element::Spring6(7));
                LegChain { elements: e, springs: 13 }
            }
            Architecture::Rrr => {
                let crank = angle(b - a);
                e.push(start(a, crank));
                e.push(Element::Rz(Var::Spring(0, 0.0)));
                e.push(Element::Fixed(tx((b - a).norm())));
                e.push(Element::Spring6(1));
                e.push(Element::Rz(Var::Passive(0, link_angle - crank)));
                e.push(Element::Fixed(tx((c - b).norm())));
                e.push(Element::Spring6(7));
                e.push(Element::Rz(Var::Passive(1, bar_angle - link_angle)));
                e.push(Element::Fixed(tx((p - c).norm())));
                e.push(Element::Spring6(13));
                LegChain { elements: e, springs: 19 }
            }
        }
    }

    /// End frame for spring deflections `theta` and passive joint offsets `dq`.
    pub fn end(&self, theta: &[f64], dq: &[f64; 2]) -> Matrix4<f64> {
        let mut t = Matrix4::identity();
        for el in &self.elements {
            let m = match el {
                Element::Fixed(m) => *m,
                Element::Rz(Var::Passive(k, q0)) => rz(q0 + dq[*k]),
                Element::Rz(Var::Spring(k, q0)) => rz(q0 + theta[*k]),
                Element::Tx(Var::Passive(k, q0)) => tx(q0 + dq[*k]),
                Element::Tx(Var::Spring(k, q0)) => tx(q0 + theta[*k]),
                Element::Spring6(k) => spring6(&Vector6::from_column_slice(&theta[*k..*k + 6])),
            };
            t *= m;
        }
        t
    }
}

/// Small twist `(δp, δω)` in base axes taking `t0` to `t1`.
pub fn twist_between(t0: &Matrix4<f64>, t1: &Matrix4<f64>) -> Vector6<f64> {
    let dp = t1.fixed_view::<3, 1>(0, 3) - t0.fixed_view::<3, 1>(0, 3);
    let r0: Matrix3<f64> = t0.fixed_view::<3, 3>(0, 0).into();
    let r1: Matrix3<f64> = t1.fixed_view::<3, 3>(0, 0).into();
    // skew part of the relative rotation: sin θ·axis, exact to O(θ³)
    let d = r1 * r0.transpose();
    let w = Vector3::new(d[(2, 1)] - d[(1, 2)], d[(0, 2)] - d[(2, 0)], d[(1, 0)] - d[(0, 1)]) * 0.5;
    Vector6::new(dp.x, dp.y, dp.z, w.x, w.y, w.z)
}

/// Central-difference screws of the spring coordinates and of the passive joints.
pub fn chain_jacobians(chain: &LegChain, h: f64) -> (Vec<Vector6<f64>>, [Vector6<f64>; 2]) {
    let zero = vec![0.0; chain.springs];
    let mut j_theta = Vec::new();
    for k in 0..chain.springs {
        let mut plus = zero.clone();
        let mut minus = zero.clone();
        plus[k] = h;
        minus[k] = -h;
        let tp = chain.end(&plus, &[0.0; 2]);
        let tm = chain.end(&minus, &[0.0; 2]);
        j_theta.push(twist_between(&tm, &tp) / (2.0 * h));
    }
    let j_q = [0, 1].map(|k| {
        let mut dp = [0.0; 2];
        let mut dm = [0.0; 2];
        dp[k] = h;
        dm[k] = -h;
        twist_between(&chain.end(&zero, &dm), &chain.end(&zero, &dp)) / (2.0 * h)
    });
    (j_theta, j_q)
}

/// Largest absolute entry of a matrix.
pub fn amax6(m: &Matrix6<f64>) -> f64 {
    m.amax()
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    pearson(&ranks(x), &ranks(y))
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Coefficient of determination of a least-squares polynomial fit of degree `deg`.
pub fn polyfit_r2(x: &[f64], y: &[f64], deg: usize) -> f64 {
    let n = x.len();
    let v = nalgebra::DMatrix::from_fn(n, deg + 1, |i, j| x[i].powi(j as i32));
    let yv = nalgebra::DVector::from_column_slice(y);
    let coef = v.clone().svd(true, true).solve(&yv, 1e-14).expect("least squares");
    let resid = &yv - &v * coef;
    let my = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    1.0 - resid.norm_squared() / ss_tot
}
