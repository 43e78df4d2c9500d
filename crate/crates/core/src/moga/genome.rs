//! Binary "DNA" encoding of a design: a 2-bit architecture gene and five 16-bit Gray-coded genes.

use crate::model::{Architecture, Bounds, DesignVector, Lengths};

pub const GENE_BITS: usize = 16;
pub const ARCH_BITS: usize = 2;
/// Total length of the bit string.
pub const GENOME_BITS: usize = ARCH_BITS + 5 * GENE_BITS;
const LEVELS: f64 = 65535.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genome {
    /// Raw 2-bit architecture gene, 0..=3.
    pub architecture: u8,
    /// Gray-coded continuous genes in `(R, r, L_b, r_j, r_p)` order.
    pub genes: [u16; 5],
}

fn to_gray(v: u16) -> u16 {
    v ^ (v >> 1)
}

fn from_gray(mut g: u16) -> u16 {
    let mut shift = 1;
    while shift < 16 {
        g ^= g >> shift;
        shift <<= 1;
    }
    g
}

/// The 2-bit gene has four values for three architectures; 3 maps onto RRR.
pub fn architecture_from_gene(v: u8) -> Architecture {
    Architecture::from_code(v.min(2) + 1).expect("codes 1..=3 are valid")
}

pub fn gene_from_architecture(a: Architecture) -> u8 {
    a.code() - 1
}

/// Lattice index of `x` within `[lo, hi]`, clamped.
pub fn quantize(x: f64, lo: f64, hi: f64) -> u16 {
    if hi <= lo {
        return 0;
    }
    let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
    (t * LEVELS).round() as u16
}

pub fn dequantize(k: u16, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * f64::from(k) / LEVELS
}

/// Width of one lattice step for each continuous variable.
pub fn quantization_steps(bounds: &Bounds) -> [f64; 5] {
    let lo = bounds.lower.to_array();
    let hi = bounds.upper.to_array();
    std::array::from_fn(|i| (hi[i] - lo[i]) / LEVELS)
}

impl Genome {
    /// Lattice indices (binary, not Gray).
    pub fn levels(&self) -> [u16; 5] {
        self.genes.map(from_gray)
    }

    pub fn from_levels(architecture: u8, levels: [u16; 5]) -> Self {
        Genome {
            architecture: architecture & 0b11,
            genes: levels.map(to_gray),
        }
    }

    /// Nearest lattice genome to a design.
    pub fn encode(design: &DesignVector, bounds: &Bounds) -> Self {
        let lo = bounds.lower.to_array();
        let hi = bounds.upper.to_array();
        let x = design.lengths.to_array();
        let levels = std::array::from_fn(|i| quantize(x[i], lo[i], hi[i]));
        Genome::from_levels(gene_from_architecture(design.architecture), levels)
    }

    pub fn decode(&self, bounds: &Bounds) -> DesignVector {
        let lo = bounds.lower.to_array();
        let hi = bounds.upper.to_array();
        let k = self.levels();
        DesignVector {
            architecture: architecture_from_gene(self.architecture),
            lengths: Lengths::from_array(std::array::from_fn(|i| dequantize(k[i], lo[i], hi[i]))),
        }
    }

    /// Bit `i` of the string; bits 0..2 hold the architecture gene, MSB first throughout.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < GENOME_BITS);
        if i < ARCH_BITS {
            self.architecture >> (ARCH_BITS - 1 - i) & 1 == 1
        } else {
            let j = i - ARCH_BITS;
            self.genes[j / GENE_BITS] >> (GENE_BITS - 1 - j % GENE_BITS) & 1 == 1
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < GENOME_BITS);
        if i < ARCH_BITS {
            self.architecture ^= 1 << (ARCH_BITS - 1 - i);
        } else {
            let j = i - ARCH_BITS;
            self.genes[j / GENE_BITS] ^= 1 << (GENE_BITS - 1 - j % GENE_BITS);
        }
    }

    /// Bits `[0, cut)` from `self`, the rest from `other`.
    pub fn splice(&self, other: &Genome, cut: usize) -> Genome {
        let mut child = *other;
        for i in 0..cut.min(GENOME_BITS) {
            if self.bit(i) != child.bit(i) {
                child.flip(i);
            }
        }
        child
    }
}
