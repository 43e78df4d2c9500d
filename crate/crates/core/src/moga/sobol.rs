//! Sobol low-discrepancy points in up to five dimensions, with an optional digital shift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BITS: usize = 32;
pub const MAX_DIMENSIONS: usize = 5;

/// (degree s, coefficients a, initial m) for dimensions 2..=5 (Joe and Kuo).
const PRIMITIVES: [(u32, u32, &[u32]); MAX_DIMENSIONS - 1] =
    [(1, 0, &[1]), (2, 1, &[1, 3]), (3, 1, &[1, 3, 1]), (3, 2, &[1, 1, 1])];

fn direction_numbers(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let (s, a, m) = PRIMITIVES[dim - 1];
    let s = s as usize;
    for k in 0..s {
        v[k] = m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                x ^= v[k - j];
            }
        }
        v[k] = x;
    }
    v
}

/// Gray-code-ordered Sobol generator.
#[derive(Debug, Clone)]
pub struct Sobol {
    directions: Vec<[u32; BITS]>,
    state: Vec<u32>,
    shift: Vec<u32>,
    index: u64,
}

impl Sobol {
    /// Unscrambled sequence; the first point is the origin.
    pub fn new(dimensions: usize) -> Self {
        assert!((1..=MAX_DIMENSIONS).contains(&dimensions), "1 to {MAX_DIMENSIONS} dimensions");
        Sobol {
            directions: (0..dimensions).map(direction_numbers).collect(),
            state: vec![0; dimensions],
            shift: vec![0; dimensions],
            index: 0,
        }
    }

    /// XORs every point with a random shift drawn from `seed`.
    pub fn shifted(dimensions: usize, seed: u64) -> Self {
        let mut s = Sobol::new(dimensions);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for x in s.shift.iter_mut() {
            *x = rng.random();
        }
        s
    }

    pub fn dimensions(&self) -> usize {
        self.state.len()
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let out = self
            .state
            .iter()
            .zip(&self.shift)
            .map(|(x, s)| f64::from(x ^ s) / 2f64.powi(BITS as i32))
            .collect();
        let c = (!self.index).trailing_zeros() as usize;
        self.index += 1;
        for (x, v) in self.state.iter_mut().zip(&self.directions) {
            *x ^= v[c.min(BITS - 1)];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_prefix() {
        let mut s = Sobol::new(2);
        let pts: Vec<Vec<f64>> = (0..8).map(|_| s.next_point()).collect();
        let x: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let y: Vec<f64> = pts.iter().map(|p| p[1]).collect();
        assert_eq!(x, [0.0, 0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125]);
        assert_eq!(y, [0.0, 0.5, 0.25, 0.75, 0.375, 0.875, 0.125, 0.625]);
    }

    #[test]
    fn stratified_in_every_dimension() {
        let mut s = Sobol::shifted(5, 3);
        let pts: Vec<Vec<f64>> = (0..16).map(|_| s.next_point()).collect();
        for d in 0..5 {
            let mut cells: Vec<usize> = pts.iter().map(|p| (p[d] * 16.0) as usize).collect();
            cells.sort();
            assert_eq!(cells, (0..16).collect::<Vec<_>>(), "dimension {d}");
        }
    }
}
