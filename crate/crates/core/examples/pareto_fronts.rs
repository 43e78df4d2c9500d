//! Non-dominated filtering, ranking, crowding and hypervolume on synthetic points.

use ppm_core::moga::pareto::{crowding_distances, nondominated_ranks};
use ppm_core::moga::{hypervolume, pareto_filter, HYPERVOLUME_MASS_REF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let points: Vec<(f64, f64)> = (0..40)
        .map(|_| {
            let rw: f64 = rng.random_range(0.0..1.5);
            (200.0 + 1500.0 * rw * rw + rng.random_range(0.0..400.0), rw)
        })
        .collect();
    let ranks = nondominated_ranks(&points);
    let mut first: Vec<usize> = (0..points.len()).filter(|&i| ranks[i] == 0).collect();
    first.sort_by(|&a, &b| points[a].1.total_cmp(&points[b].1));
    let crowding = crowding_distances(&points, &first);
    println!("mass_kg,R_w_m,crowding");
    for (k, &i) in first.iter().enumerate() {
        println!("{:.1},{:.3},{:.3}", points[i].0, points[i].1, crowding[k]);
    }
    let front = pareto_filter(&points);
    println!("fronts: {}", ranks.iter().max().map_or(0, |r| r + 1));
    println!("hypervolume: {:.2}", hypervolume(&front, HYPERVOLUME_MASS_REF));
}
