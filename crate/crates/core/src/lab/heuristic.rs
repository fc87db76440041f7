use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{adjacent_pairs, all_pairs, distortion, CandidateMap, DistortionReport, Point, Window};
use crate::{Error, Result};

const FREE: usize = usize::MAX;

/// Maximum matching of a bipartite graph given by left adjacency lists.
/// Returns, for each left vertex, its right partner or `None`.
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut mate_l = vec![FREE; left];
    let mut mate_r = vec![FREE; right];
    let mut dist = vec![0usize; left];
    loop {
        let mut queue = VecDeque::new();
        for u in 0..left {
            if mate_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = FREE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match mate_r[v] {
                    FREE => found = true,
                    w if dist[w] == FREE => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; left];
        for u in 0..left {
            if mate_l[u] == FREE {
                augment(u, adj, &mut mate_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }
    mate_l.into_iter().map(|v| (v != FREE).then_some(v)).collect()
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    while next[u] < adj[u].len() {
        let v = adj[u][next[u]];
        next[u] += 1;
        let w = mate_r[v];
        if w == FREE || (dist[w] == dist[u] + 1 && augment(w, adj, mate_l, mate_r, dist, next)) {
            mate_l[u] = v;
            mate_r[v] = u;
            return true;
        }
    }
    dist[u] = FREE;
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicOptions {
    /// Largest displacement from a point's anchor that is tried.
    pub max_radius: i64,
    /// Pairs used for the sampled distortion when not all pairs are taken.
    pub sample_pairs: usize,
    pub seed: u64,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions { max_radius: 8, sample_pairs: 20_000, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct HeuristicMap {
    pub map: CandidateMap,
    /// Least squared radius at which a complete matching exists.
    pub radius_sq: i64,
    /// Distortion over all pairs, or over a random sample of them.
    pub sampled: DistortionReport,
    pub all_pairs: bool,
    /// Distortion over pairs at distance one, when there are any.
    pub adjacent: Option<DistortionReport>,
}

/// Anchor of each point: the window compressed horizontally to just as
/// many columns as the points need, as `(numerator, denominator)` of x.
struct Anchors {
    num: i64,
    den: i64,
    x0: i64,
}

impl Anchors {
    fn new(window: Window, count: usize) -> Self {
        let height = (window.y1 - window.y0 + 1) as usize;
        let width = window.x1 - window.x0 + 1;
        let cols = count.div_ceil(height) as i64;
        let (num, den) = if width == 1 { (1, 1) } else { ((cols - 1).max(0), width - 1) };
        Anchors { num, den, x0: window.x0 }
    }

    /// Doubled-denominator-free anchor x, scaled by `den`.
    fn x_scaled(&self, p: Point) -> i64 {
        self.x0 * self.den + (p.x - self.x0) * self.num
    }

    fn candidates(&self, p: Point, r_sq: i64) -> Vec<(i64, Point)> {
        let ax = self.x_scaled(p);
        let d = self.den;
        let r = (r_sq as f64).sqrt().ceil() as i64 + 1;
        let lo = ax.div_euclid(d) - r;
        let hi = ax.div_euclid(d) + r + 1;
        let mut out = Vec::new();
        for qy in p.y - r..=p.y + r {
            for qx in lo..=hi {
                let dx = qx * d - ax;
                let dy = (qy - p.y) * d;
                let e = dx * dx + dy * dy;
                if e <= r_sq * d * d {
                    out.push((e, Point::new(qx, qy)));
                }
            }
        }
        out.sort();
        out
    }
}

fn matching(points: &[Point], anchors: &Anchors, r_sq: i64) -> Option<Vec<Point>> {
    let mut ids: HashMap<Point, usize> = HashMap::new();
    let mut targets = Vec::new();
    let adj: Vec<Vec<usize>> = points
        .iter()
        .map(|&p| {
            anchors
                .candidates(p, r_sq)
                .into_iter()
                .map(|(_, q)| {
                    *ids.entry(q).or_insert_with(|| {
                        targets.push(q);
                        targets.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    let m = hopcroft_karp(&adj, targets.len());
    m.into_iter().map(|v| v.map(|t| targets[t])).collect()
}

/// Injective map from `points` into `Z²` moving each point at most a least
/// radius from its anchor, found by matching and bisection on the radius.
/// `points` must have the 2Z-property inside `window`.
pub fn heuristic_grid_map(window: Window, points: &[Point], opts: HeuristicOptions) -> Result<HeuristicMap> {
    if points.len() < 2 {
        return Err(Error::EmptyPairs);
    }
    let anchors = Anchors::new(window, points.len());
    let max_sq = opts.max_radius * opts.max_radius;
    let Some(mut best) = matching(points, &anchors, max_sq) else {
        return Err(Error::Infeasible(format!("no injective matching within radius {}", opts.max_radius)));
    };
    let (mut lo, mut hi) = (-1i64, max_sq);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match matching(points, &anchors, mid) {
            Some(m) => {
                hi = mid;
                best = m;
            }
            None => lo = mid,
        }
    }
    let map = CandidateMap::new(window, points.iter().copied().zip(best))?;
    let total = points.len() * (points.len() - 1) / 2;
    let (pairs, exhaustive) = if total <= opts.sample_pairs {
        (all_pairs(points), true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut pairs = Vec::with_capacity(opts.sample_pairs);
        while pairs.len() < opts.sample_pairs {
            let (a, b) = (rng.gen_range(0..points.len()), rng.gen_range(0..points.len()));
            if a != b {
                pairs.push((points[a], points[b]));
            }
        }
        (pairs, false)
    };
    let sampled = distortion(&map, &pairs)?;
    let adj = adjacent_pairs(points);
    let adjacent = if adj.is_empty() { None } else { Some(distortion(&map, &adj)?) };
    Ok(HeuristicMap { map, radius_sq: hi, sampled, all_pairs: exhaustive, adjacent })
}
