//! Generators for the graph families used throughout the checks.
//!
//! All families use unit edge weights except [`Family::Random`]. Labels are
//! zero-padded so that sorted-label order matches the natural construction
//! order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, MeasurePolicy, WeightedGraph, DEFAULT_VERTEX_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Complete {
        n: usize,
    },
    Hypercube {
        d: usize,
    },
    /// Combinatorial ball of radius `r` about the origin of `Z^d`.
    LatticeBall {
        d: usize,
        r: usize,
    },
    /// Ball of radius `r` about the root of the `degree`-regular tree.
    TreeBall {
        degree: usize,
        r: usize,
    },
    /// Random connected graph: random spanning tree plus independent extra
    /// edges with probability `p`, weights uniform in `[0.1, 2]`.
    Random {
        n: usize,
        p: f64,
        seed: u64,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Path { n } => write!(f, "path(n={n})"),
            Family::Cycle { n } => write!(f, "cycle(n={n})"),
            Family::Complete { n } => write!(f, "complete(n={n})"),
            Family::Hypercube { d } => write!(f, "hypercube(d={d})"),
            Family::LatticeBall { d, r } => write!(f, "lattice_ball(d={d},r={r})"),
            Family::TreeBall { degree, r } => write!(f, "tree_ball(degree={degree},r={r})"),
            Family::Random { n, p, seed } => write!(f, "random(n={n},p={p},seed={seed})"),
        }
    }
}

impl Family {
    /// Parses a family name plus `k=v` parameters, e.g. `("lattice_ball", "d=2,r=3")`.
    pub fn parse(name: &str, params: &str) -> Result<Family> {
        let mut kv = BTreeMap::new();
        for part in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected k=v, got `{part}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |key: &str| -> Result<usize> {
            kv.get(key)
                .ok_or_else(|| Error::InvalidParameter(format!("{name} needs parameter `{key}`")))?
                .parse()
                .map_err(|_| {
                    Error::InvalidParameter(format!("`{key}` must be a nonnegative integer"))
                })
        };
        let family = match name {
            "two_vertex" => Family::Path { n: 2 },
            "path" => Family::Path { n: get("n")? },
            "cycle" => Family::Cycle { n: get("n")? },
            "complete" => Family::Complete { n: get("n")? },
            "hypercube" => Family::Hypercube { d: get("d")? },
            "lattice_ball" => Family::LatticeBall {
                d: get("d")?,
                r: get("r")?,
            },
            "tree_ball" => Family::TreeBall {
                degree: get("degree")?,
                r: get("r")?,
            },
            "random" => Family::Random {
                n: get("n")?,
                p: kv
                    .get("p")
                    .map(|p| p.parse::<f64>())
                    .transpose()
                    .map_err(|_| Error::InvalidParameter("`p` must be a number".into()))?
                    .unwrap_or(0.3),
                seed: get("seed")? as u64,
            },
            other => return Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
        };
        Ok(family)
    }

    /// Number of vertices the family instance will have.
    pub fn vertex_count(&self) -> Result<usize> {
        let overflow = || Error::SizeCapExceeded {
            requested: usize::MAX,
            cap: DEFAULT_VERTEX_CAP,
        };
        Ok(match *self {
            Family::Path { n } | Family::Cycle { n } | Family::Complete { n } => n,
            Family::Random { n, .. } => n,
            Family::Hypercube { d } => {
                if d >= usize::BITS as usize - 1 {
                    return Err(overflow());
                }
                1usize << d
            }
            Family::LatticeBall { d, r } => lattice_ball_size(d, r).ok_or_else(overflow)?,
            Family::TreeBall { degree, r } => {
                // 1 + degree * Σ_{k<r} (degree-1)^k
                let mut total: usize = 1;
                let mut layer: usize = degree;
                for _ in 0..r {
                    total = total.checked_add(layer).ok_or_else(overflow)?;
                    layer = layer
                        .checked_mul(degree.saturating_sub(1))
                        .ok_or_else(overflow)?;
                }
                total
            }
        })
    }
}

fn lattice_ball_size(d: usize, r: usize) -> Option<usize> {
    // points of Z^d with |x|_1 <= r, by dynamic programming over coordinates
    let mut counts = vec![0usize; r + 1];
    counts[0] = 1;
    for _ in 0..d {
        let mut next = vec![0usize; r + 1];
        for (used, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for k in 0..=(r - used) {
                let mult = if k == 0 { 1 } else { 2 };
                next[used + k] = next[used + k].checked_add(c.checked_mul(mult)?)?;
            }
        }
        counts = next;
    }
    counts.iter().try_fold(0usize, |acc, &c| acc.checked_add(c))
}

pub fn generate(family: Family, policy: MeasurePolicy) -> Result<WeightedGraph> {
    generate_capped(family, policy, DEFAULT_VERTEX_CAP)
}

pub fn generate_capped(family: Family, policy: MeasurePolicy, cap: usize) -> Result<WeightedGraph> {
    let count = family.vertex_count()?;
    if count > cap {
        return Err(Error::SizeCapExceeded {
            requested: count,
            cap,
        });
    }
    let mut b = GraphBuilder::with_cap(cap);
    match family {
        Family::Path { n } | Family::Cycle { n } | Family::Complete { n } => {
            let min = match family {
                Family::Cycle { .. } => 3,
                _ => 2,
            };
            if n < min {
                return Err(Error::InvalidParameter(format!(
                    "{family} needs n >= {min}"
                )));
            }
            add_numbered(&mut b, n)?;
            match family {
                Family::Path { .. } => {
                    (1..n).try_for_each(|i| b.add_edge_indices(i - 1, i, 1.0))?
                }
                Family::Cycle { .. } => {
                    (0..n).try_for_each(|i| b.add_edge_indices(i, (i + 1) % n, 1.0))?
                }
                _ => {
                    for i in 0..n {
                        for j in i + 1..n {
                            b.add_edge_indices(i, j, 1.0)?;
                        }
                    }
                }
            }
        }
        Family::Hypercube { d } => {
            if d == 0 {
                return Err(Error::InvalidParameter("hypercube needs d >= 1".into()));
            }
            for v in 0..count {
                let label: String = (0..d)
                    .rev()
                    .map(|bit| if v >> bit & 1 == 1 { '1' } else { '0' })
                    .collect();
                b.add_vertex(&label)?;
            }
            for v in 0..count {
                for bit in 0..d {
                    let u = v ^ (1 << bit);
                    if v < u {
                        b.add_edge_indices(v, u, 1.0)?;
                    }
                }
            }
        }
        Family::LatticeBall { d, r } => {
            if d == 0 || r == 0 {
                return Err(Error::InvalidParameter(
                    "lattice_ball needs d >= 1 and r >= 1".into(),
                ));
            }
            let points = lattice_points(d, r as i64);
            let width = (2 * r).to_string().len();
            let mut index = HashMap::new();
            for p in &points {
                let label = p
                    .iter()
                    .map(|&c| format!("{:0width$}", c + r as i64))
                    .collect::<Vec<_>>()
                    .join(",");
                index.insert(p.clone(), b.add_vertex(&label)?);
            }
            for p in &points {
                for axis in 0..d {
                    let mut q = p.clone();
                    q[axis] += 1;
                    if let Some(&j) = index.get(&q) {
                        b.add_edge_indices(index[p], j, 1.0)?;
                    }
                }
            }
        }
        Family::TreeBall { degree, r } => {
            if degree == 0 || r == 0 {
                return Err(Error::InvalidParameter(
                    "tree_ball needs degree >= 1 and r >= 1".into(),
                ));
            }
            let width = degree.to_string().len();
            let root = b.add_vertex("t")?;
            let mut frontier = vec![(root, "t".to_string())];
            for depth in 0..r {
                let children = if depth == 0 { degree } else { degree - 1 };
                let mut next = Vec::new();
                for (parent, label) in &frontier {
                    for c in 0..children {
                        let child_label = format!("{label}.{c:0width$}");
                        let child = b.add_vertex(&child_label)?;
                        b.add_edge_indices(*parent, child, 1.0)?;
                        next.push((child, child_label));
                    }
                }
                frontier = next;
            }
        }
        Family::Random { n, p, seed } => {
            if n < 2 || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(
                    "random needs n >= 2 and p in [0, 1]".into(),
                ));
            }
            add_numbered(&mut b, n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut present = vec![vec![false; n]; n];
            for i in 1..n {
                let j = rng.gen_range(0..i);
                b.add_edge_indices(j, i, rng.gen_range(0.1..=2.0))?;
                present[j][i] = true;
            }
            for i in 0..n {
                for j in i + 1..n {
                    if !present[i][j] && rng.gen_bool(p) {
                        b.add_edge_indices(i, j, rng.gen_range(0.1..=2.0))?;
                    }
                }
            }
        }
    }
    b.build(policy)
}

fn add_numbered(b: &mut GraphBuilder, n: usize) -> Result<()> {
    let width = n.saturating_sub(1).to_string().len();
    for i in 0..n {
        b.add_vertex(&format!("{i:0width$}"))?;
    }
    Ok(())
}

fn lattice_points(d: usize, r: i64) -> Vec<Vec<i64>> {
    let mut points = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &points {
            let used: i64 = p.iter().map(|c: &i64| c.abs()).sum();
            for c in -(r - used)..=(r - used) {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

/// Index of the distinguished centre vertex (origin / root), if the family has one.
pub fn center_vertex(family: Family, g: &WeightedGraph) -> Option<usize> {
    match family {
        Family::LatticeBall { d, r } => {
            let width = (2 * r).to_string().len();
            let label = vec![format!("{:0width$}", r); d].join(",");
            g.index_of(&label).ok()
        }
        Family::TreeBall { .. } => g.index_of("t").ok(),
        _ => Some(0),
    }
}

/// Seeded function with values uniform in `[-1, 1)`.
pub fn random_function(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball, d_omega, volume, VertexSubset};

    #[test]
    fn cycle_and_hypercube() {
        let c = generate(Family::Cycle { n: 4 }, MeasurePolicy::Normalized).unwrap();
        assert_eq!(c.num_vertices(), 4);
        assert!(c.measure().iter().all(|&m| m == 2.0));
        let u = VertexSubset::new(&c, [1]).unwrap();
        assert_eq!(volume(&c, &u), 2.0);

        let h = generate(Family::Hypercube { d: 3 }, MeasurePolicy::Combinatorial).unwrap();
        assert_eq!(h.num_vertices(), 8);
        assert_eq!(h.num_edges(), 12);
        assert!(h.measure().iter().all(|&m| m == 1.0));
        assert_eq!(volume(&h, &VertexSubset::all(&h)), 8.0);
        for d in 1..=4 {
            let h = generate(Family::Hypercube { d }, MeasurePolicy::Normalized).unwrap();
            assert_eq!(d_omega(&h), d as f64);
        }
    }

    #[test]
    fn lattice_ball_one_dimensional_is_a_path() {
        let fam = Family::LatticeBall { d: 1, r: 3 };
        let g = generate(fam, MeasurePolicy::Combinatorial).unwrap();
        assert_eq!(g.num_vertices(), 7);
        assert_eq!(g.num_edges(), 6);
        let origin = center_vertex(fam, &g).unwrap();
        assert_eq!(g.label(origin), "3");
        assert_eq!(ball(&g, origin, 3).unwrap().len(), 7);
        assert_eq!(ball(&g, origin, 1).unwrap().len(), 3);
    }

    #[test]
    fn vertex_counts_match() {
        for fam in [
            Family::LatticeBall { d: 2, r: 3 },
            Family::LatticeBall { d: 3, r: 2 },
            Family::TreeBall { degree: 3, r: 3 },
            Family::TreeBall { degree: 1, r: 2 },
            Family::Complete { n: 5 },
        ] {
            let g = generate(fam, MeasurePolicy::Combinatorial).unwrap();
            assert_eq!(g.num_vertices(), fam.vertex_count().unwrap(), "{fam}");
        }
        assert_eq!(
            Family::LatticeBall { d: 2, r: 3 }.vertex_count().unwrap(),
            25
        );
    }

    #[test]
    fn cap_and_parameters() {
        assert!(matches!(
            generate_capped(Family::Hypercube { d: 5 }, MeasurePolicy::Normalized, 16),
            Err(Error::SizeCapExceeded {
                requested: 32,
                cap: 16
            })
        ));
        assert!(generate(Family::Cycle { n: 2 }, MeasurePolicy::Normalized).is_err());
        assert_eq!(
            Family::parse("lattice_ball", "d=2, r=3").unwrap(),
            Family::LatticeBall { d: 2, r: 3 }
        );
        assert!(Family::parse("lattice_ball", "d=2").is_err());
        assert!(Family::parse("moebius", "").is_err());
    }

    #[test]
    fn random_graphs_are_reproducible() {
        let fam = Family::Random {
            n: 10,
            p: 0.3,
            seed: 7,
        };
        let a = generate(fam, MeasurePolicy::Normalized).unwrap();
        let b = generate(fam, MeasurePolicy::Normalized).unwrap();
        assert_eq!(a, b);
        assert!(a.edges().all(|(_, _, w)| (0.1..=2.0).contains(&w)));
    }
}
