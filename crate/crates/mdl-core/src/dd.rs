//! Double description over exact integers: extreme rays of a polyhedral cone
//! `{ z : c·z ≥ 0 for all constraint rows c }`.
//!
//! Constraints are inserted one at a time while a generator pair
//! (lineality basis, extreme rays) is maintained. While the lineality space
//! still meets a new constraint, the cut reduces its dimension by one and the
//! pivot vector becomes a ray; afterwards the classic ray-combination step
//! with a combinatorial adjacency test applies. Constraints are scheduled
//! dynamically — the one cutting off the fewest rays goes first — which keeps
//! the intermediate generator counts manageable on degenerate inputs. All
//! vectors are kept as primitive integer vectors (content divided out), so
//! coefficient growth stays in check, and the result is independent of the
//! schedule.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::ratio::Rat;

#[derive(Debug, Clone)]
pub struct ConeGenerators {
    /// Basis of the lineality space (both directions feasible).
    pub lineality: Vec<Vec<BigInt>>,
    /// Extreme rays modulo the lineality space, primitive and deduplicated.
    pub rays: Vec<Vec<BigInt>>,
}

#[derive(Clone)]
struct Ray {
    v: Vec<BigInt>,
    /// Bit i set ⇔ constraint i (original input position) holds with equality.
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bit_words(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
fn meet_count(a: &[u64], b: &[u64]) -> usize {
    let mut n = 0usize;
    for (x, y) in a.iter().zip(b) {
        n += (x & y).count_ones() as usize;
    }
    n
}

/// Is `a ∩ b ⊆ c`?
#[inline]
fn meet_subset_of(a: &[u64], b: &[u64], c: &[u64]) -> bool {
    for ((x, y), z) in a.iter().zip(b).zip(c) {
        if (x & y) & !z != 0 {
            return false;
        }
    }
    true
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Divide out the content (gcd of entries). The zero vector stays zero.
fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
    }
    if g.is_zero() || g == BigInt::from(1) {
        return;
    }
    for x in v.iter_mut() {
        *x = &*x / &g;
    }
}

/// Scale a rational vector to a primitive integer vector with the same
/// direction.
pub fn primitive_from_rat(v: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::from(1);
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut out: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    make_primitive(&mut out);
    out
}

/// Combine a positive-side and a negative-side ray into one on the cutting
/// hyperplane (`dp = c·p > 0`, `dm = c·m < 0`).
fn combine(p: &Ray, m: &Ray, dp: &BigInt, dm: &BigInt, ci: usize) -> Ray {
    let mut v: Vec<BigInt> = p
        .v
        .iter()
        .zip(&m.v)
        .map(|(pv, mv)| dp * mv - dm * pv)
        .collect();
    make_primitive(&mut v);
    let mut zeros: Vec<u64> = p.zeros.iter().zip(&m.zeros).map(|(a, b)| a & b).collect();
    bit_set(&mut zeros, ci);
    Ray { v, zeros }
}

/// Extreme rays and lineality of `{ z : row·z ≥ 0 ∀ rows }`, `dim` being the
/// length of every row.
pub fn extreme_rays(rows: &[Vec<Rat>], dim: usize) -> ConeGenerators {
    let n = rows.len();
    let words = bit_words(n.max(1));
    let constraints: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive_from_rat(r)).collect();

    // Start from the whole space: lineality = identity, no rays.
    let mut lineality: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::from(1);
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();

    while !remaining.is_empty() {
        // Schedule: trivial rows first, then lineality cutters, then the
        // constraint discarding the fewest rays (ties to the smallest index).
        let mut chosen_pos = None;
        for (pos, &ci) in remaining.iter().enumerate() {
            if constraints[ci].iter().all(|x| x.is_zero()) {
                chosen_pos = Some(pos);
                break;
            }
        }
        if chosen_pos.is_none() && !lineality.is_empty() {
            'outer: for (pos, &ci) in remaining.iter().enumerate() {
                for l in &lineality {
                    if !idot(&constraints[ci], l).is_zero() {
                        chosen_pos = Some(pos);
                        break 'outer;
                    }
                }
            }
        }
        let pos = match chosen_pos {
            Some(p) => p,
            None => {
                let cuts: Vec<usize> = remaining
                    .par_iter()
                    .map(|&ci| {
                        rays.iter()
                            .filter(|r| idot(&constraints[ci], &r.v).is_negative())
                            .count()
                    })
                    .collect();
                let mut best = 0;
                for p in 1..remaining.len() {
                    if cuts[p] < cuts[best] {
                        best = p;
                    }
                }
                best
            }
        };
        let ci = remaining.remove(pos);
        let c = &constraints[ci];

        if c.iter().all(|x| x.is_zero()) {
            // 0 ≥ 0: trivially true; every generator saturates it.
            for r in &mut rays {
                bit_set(&mut r.zeros, ci);
            }
            continue;
        }

        let lin_dots: Vec<BigInt> = lineality.iter().map(|l| idot(c, l)).collect();
        if let Some(pivot) = lin_dots.iter().position(|d| !d.is_zero()) {
            // The constraint cuts the lineality space: one basis vector turns
            // into a ray, the rest are projected onto the hyperplane.
            let mut l0 = lineality.remove(pivot);
            let mut d0 = lin_dots[pivot].clone();
            if d0.is_negative() {
                for x in l0.iter_mut() {
                    *x = -&*x;
                }
                d0 = -d0;
            }
            let mut new_lin = Vec::with_capacity(lineality.len());
            for (l, dl) in lineality.into_iter().zip(
                lin_dots
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != pivot)
                    .map(|(_, d)| d),
            ) {
                if dl.is_zero() {
                    new_lin.push(l);
                } else {
                    let mut proj: Vec<BigInt> = l
                        .iter()
                        .zip(&l0)
                        .map(|(lv, l0v)| lv * &d0 - l0v * dl)
                        .collect();
                    make_primitive(&mut proj);
                    new_lin.push(proj);
                }
            }
            lineality = new_lin;
            for r in rays.iter_mut() {
                let dr = idot(c, &r.v);
                if !dr.is_zero() {
                    let mut proj: Vec<BigInt> = r
                        .v
                        .iter()
                        .zip(&l0)
                        .map(|(rv, l0v)| rv * &d0 - l0v * &dr)
                        .collect();
                    make_primitive(&mut proj);
                    r.v = proj;
                }
                bit_set(&mut r.zeros, ci);
            }
            // The pivot ray satisfies every constraint processed so far with
            // equality (it came from the lineality space) and this one
            // strictly. Bits of unprocessed constraints stay clear.
            let mut zeros = vec![0u64; words];
            for done in (0..n).filter(|i| !remaining.contains(i)) {
                if done != ci {
                    bit_set(&mut zeros, done);
                }
            }
            rays.push(Ray { v: l0, zeros });
            continue;
        }

        // Classic double-description step: lineality is orthogonal to c.
        let dots: Vec<BigInt> = rays.par_iter().map(|r| idot(c, &r.v)).collect();
        let minus_exists = dots.iter().any(|d| d.is_negative());
        if !minus_exists {
            for (r, d) in rays.iter_mut().zip(&dots) {
                if d.is_zero() {
                    bit_set(&mut r.zeros, ci);
                }
            }
            continue;
        }
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| dots[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| dots[i].is_negative()).collect();

        // Effective pointed dimension: ambient minus remaining lineality.
        let pointed_dim = dim - lineality.len();
        let min_common = pointed_dim.saturating_sub(2);
        let rays_ref = &rays;
        let dots_ref = &dots;
        let fresh: Vec<Ray> = plus
            .par_iter()
            .flat_map_iter(|&pi| {
                let p = &rays_ref[pi];
                minus.iter().filter_map(move |&mi| {
                    let m = &rays_ref[mi];
                    // Necessary condition for adjacency.
                    if meet_count(&p.zeros, &m.zeros) < min_common {
                        return None;
                    }
                    // Combinatorial adjacency: no third ray saturates
                    // everything both of them saturate.
                    let dominated = rays_ref.iter().enumerate().any(|(oi, other)| {
                        oi != pi && oi != mi && meet_subset_of(&p.zeros, &m.zeros, &other.zeros)
                    });
                    if dominated {
                        return None;
                    }
                    Some(combine(p, m, &dots_ref[pi], &dots_ref[mi], ci))
                })
            })
            .collect();

        let mut next: Vec<Ray> = Vec::with_capacity(plus.len() + fresh.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if dots[i].is_negative() {
                continue;
            }
            if dots[i].is_zero() {
                bit_set(&mut r.zeros, ci);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;

        if std::env::var_os("MDL_DD_TRACE").is_some() {
            eprintln!(
                "dd: constraint {ci} done, {} rays, {} constraints left",
                rays.len(),
                remaining.len()
            );
        }
    }

    // Deduplicate primitives (possible when input constraints repeat) and fix
    // an input-independent output order.
    let mut seen = std::collections::HashSet::new();
    let mut out_rays = Vec::with_capacity(rays.len());
    for r in rays {
        if r.v.iter().all(|x| x.is_zero()) {
            continue;
        }
        if seen.insert(r.v.clone()) {
            out_rays.push(r.v);
        }
    }
    out_rays.sort();
    ConeGenerators {
        lineality,
        rays: out_rays,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{rat, rint};

    fn sorted(mut v: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
        v.sort();
        v
    }

    #[test]
    fn positive_orthant() {
        // {z ≥ 0} in 3d: rays are the unit vectors, no lineality.
        let rows = vec![
            vec![rint(1), rint(0), rint(0)],
            vec![rint(0), rint(1), rint(0)],
            vec![rint(0), rint(0), rint(1)],
        ];
        let cone = extreme_rays(&rows, 3);
        assert!(cone.lineality.is_empty());
        assert_eq!(
            cone.rays,
            sorted(vec![
                vec![1.into(), 0.into(), 0.into()],
                vec![0.into(), 1.into(), 0.into()],
                vec![0.into(), 0.into(), 1.into()],
            ])
        );
    }

    #[test]
    fn halfspace_keeps_lineality() {
        // {z0 ≥ 0} in 2d: lineality along z1, one ray e0.
        let rows = vec![vec![rint(1), rint(0)]];
        let cone = extreme_rays(&rows, 2);
        assert_eq!(cone.lineality.len(), 1);
        assert!(cone.lineality[0][0].is_zero());
        assert_eq!(cone.rays, vec![vec![BigInt::from(1), BigInt::from(0)]]);
    }

    #[test]
    fn square_cone() {
        // Homogenization of the unit square [0,1]^2: cone over (x, y, 1).
        // Constraints: x ≥ 0, y ≥ 0, t − x ≥ 0, t − y ≥ 0, t ≥ 0.
        let rows = vec![
            vec![rint(1), rint(0), rint(0)],
            vec![rint(0), rint(1), rint(0)],
            vec![rint(-1), rint(0), rint(1)],
            vec![rint(0), rint(-1), rint(1)],
            vec![rint(0), rint(0), rint(1)],
        ];
        let cone = extreme_rays(&rows, 3);
        assert!(cone.lineality.is_empty());
        assert_eq!(
            cone.rays,
            sorted(vec![
                vec![0.into(), 0.into(), 1.into()],
                vec![1.into(), 0.into(), 1.into()],
                vec![0.into(), 1.into(), 1.into()],
                vec![1.into(), 1.into(), 1.into()],
            ])
        );
    }

    #[test]
    fn fractional_input_scaled() {
        // ½ x − ¼ y ≥ 0 scales to 2x − y ≥ 0.
        let rows = vec![vec![rat(1, 2), rat(-1, 4)], vec![rint(0), rint(1)]];
        let cone = extreme_rays(&rows, 2);
        assert!(cone.lineality.is_empty());
        assert_eq!(
            cone.rays,
            sorted(vec![vec![1.into(), 0.into()], vec![1.into(), 2.into()]])
        );
    }

    #[test]
    fn duplicate_constraints_collapse() {
        let rows = vec![
            vec![rint(1), rint(0)],
            vec![rint(2), rint(0)],
            vec![rint(0), rint(1)],
        ];
        let cone = extreme_rays(&rows, 2);
        assert!(cone.lineality.is_empty());
        assert_eq!(cone.rays.len(), 2);
    }
}
