use rand::Rng;

use super::{Elem, FiniteAlgebra};

#[derive(Debug, Clone, Copy)]
pub struct RandomAlgebraConfig {
    pub max_size: usize,
    pub max_points: usize,
    /// Probability that a pair of poset points is made comparable.
    pub edge_probability: f64,
    /// Probability that a point lands in the image of a join-irreducible.
    pub operator_density: f64,
}

impl Default for RandomAlgebraConfig {
    fn default() -> Self {
        RandomAlgebraConfig { max_size: 8, max_points: 4, edge_probability: 0.35, operator_density: 0.4 }
    }
}

/// The lattice of down-sets of a random poset. Diamond is the join extension
/// of a random map on principal down-sets and box the meet extension of a
/// random map on the complements of principal up-sets, so both preserve the
/// required (empty) joins and meets by construction.
pub fn random_algebra(rng: &mut impl Rng, cfg: &RandomAlgebraConfig) -> FiniteAlgebra {
    loop {
        let k = rng.gen_range(1..=cfg.max_points.max(1));
        // below[x] has bit y set iff y <= x; edges go from lower to higher index
        let mut below: Vec<u32> = (0..k).map(|x| 1 << x).collect();
        for x in 0..k {
            for y in 0..x {
                if rng.gen_bool(cfg.edge_probability) {
                    below[x] |= below[y];
                }
            }
        }
        for x in 0..k {
            for y in 0..k {
                if below[x] >> y & 1 == 1 {
                    below[x] |= below[y];
                }
            }
        }
        let downsets: Vec<u32> = (0u32..1 << k)
            .filter(|&s| (0..k).all(|x| s >> x & 1 == 0 || s & below[x] == below[x]))
            .collect();
        if downsets.len() > cfg.max_size || downsets.len() < 2 {
            continue;
        }
        let pos = |s: u32| downsets.iter().position(|&d| d == s).unwrap() as Elem;
        let full = (1u32 << k) - 1;
        let above = |x: usize| (0..k).filter(|&y| below[y] >> x & 1 == 1).fold(0u32, |m, y| m | 1 << y);
        let random_downset = |rng: &mut dyn rand::RngCore| {
            let mut s = 0u32;
            for x in 0..k {
                if rng.gen_bool(cfg.operator_density) {
                    s |= below[x];
                }
            }
            s
        };
        let g: Vec<u32> = (0..k).map(|_| random_downset(rng)).collect();
        let h: Vec<u32> = (0..k).map(|_| full & !random_downset(rng)).map(|s| close_down(s, &below, k)).collect();
        let dia: Vec<Elem> = downsets
            .iter()
            .map(|&d| pos((0..k).filter(|&x| d >> x & 1 == 1).fold(0, |m, x| m | g[x])))
            .collect();
        // the meet-irreducible attached to point x is full minus the up-set of x
        let boxes: Vec<Elem> = downsets
            .iter()
            .map(|&d| pos((0..k).filter(|&x| d & above(x) == 0).fold(full, |m, x| m & h[x])))
            .collect();
        let names: Vec<String> = downsets.iter().map(|&d| name(d, k)).collect();
        let mut pairs = Vec::new();
        for (i, &a) in downsets.iter().enumerate() {
            for (j, &b) in downsets.iter().enumerate() {
                if i != j && a & b == a {
                    pairs.push((i as Elem, j as Elem));
                }
            }
        }
        let label = format!("random-{}pt-{}", k, downsets.len());
        return FiniteAlgebra::from_parts(label, names, &pairs, boxes, dia)
            .expect("down-set algebras with extended operators are always valid");
    }
}

fn close_down(s: u32, below: &[u32], k: usize) -> u32 {
    // largest down-set inside s
    (0..k).filter(|&x| s >> x & 1 == 1 && s & below[x] == below[x]).fold(0, |m, x| m | 1 << x)
}

fn name(d: u32, k: usize) -> String {
    if d == 0 {
        return "0".into();
    }
    (0..k).filter(|&x| d >> x & 1 == 1).map(|x| (b'a' + x as u8) as char).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_algebras_are_valid_and_bounded() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cfg = RandomAlgebraConfig::default();
        let mut sizes = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let a = random_algebra(&mut rng, &cfg);
            assert!(a.size() <= 8);
            sizes.insert(a.size());
        }
        assert!(sizes.len() >= 4, "{sizes:?}");
    }
}
