//! Search for periodic orbits with isotropic edges.
//!
//! An edge through `I1` lies on a line `x + i y = c`. At a vertex with a
//! non-isotropic tangent the symmetry exchanges the two isotropic directions,
//! so the next edge lies on `x - i y = const`, and so on: the whole chain is
//! determined by `c` and by the choice of intersection point at each mirror.
//! Closure after `k` edges is one complex equation in `c`, solved by the
//! secant method while each vertex follows the intersection point nearest to
//! its previous position.

use serde::{Deserialize, Serialize};

use super::{seed_rng, SeedBox};
use crate::mirrors::{intersect_line_curve, Mirror};
use crate::orbits::{classify_points, orbit_residual, Billiard, EdgeTag};
use crate::projective::{PLine, PPoint, I};
use crate::C64;

const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct ChainOptions {
    pub seed_box: SeedBox,
    pub rng_seed: u64,
    /// Cap on the branch paths followed from one seed.
    pub max_branches: usize,
    pub max_iter: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            seed_box: SeedBox {
                re: [-2.0, 2.0],
                im: [-2.0, 2.0],
            },
            rng_seed: 0,
            max_branches: 64,
            max_iter: 80,
        }
    }
}

/// A chain of `k` vertices built by alternating isotropic edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub vertices: Vec<PPoint>,
    /// Tags of the edges `A_j A_{j+1}`, the last one being the closing edge.
    pub edge_tags: Vec<EdgeTag>,
    pub closed: bool,
    /// The closing edge runs through the same isotropic point as the first.
    pub parity_obstruction: bool,
    /// Relative mismatch of the closing edge.
    pub closure_residual: f64,
    /// Largest reflection-law residual over the vertices, for closed chains.
    pub law_residual: Option<f64>,
}

/// `true` for the pencil through `I1`, `false` for `I2`.
fn pencil_value(first: bool, p: [C64; 2]) -> C64 {
    if first {
        p[0] + I * p[1]
    } else {
        p[0] - I * p[1]
    }
}

fn pencil_line(first: bool, c: C64) -> PLine {
    PLine::new(ONE, if first { I } else { -I }, -c)
}

/// Edge `e` (from vertex `e` to `e + 1`) runs through `I1` for even `e`.
fn edge_family(e: usize) -> bool {
    e.is_multiple_of(2)
}

fn dist(a: [C64; 2], b: [C64; 2]) -> f64 {
    ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt()
}

fn size(a: [C64; 2]) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr()).sqrt()
}

fn candidates(m: &Mirror, first: bool, c: C64, exclude: Option<[C64; 2]>) -> Vec<[C64; 2]> {
    let Ok(pts) = intersect_line_curve(&pencil_line(first, c), m) else {
        return Vec::new();
    };
    pts.into_iter()
        .filter_map(|(p, _)| p.to_affine().ok().map(|(x, y)| [x, y]))
        .filter(|p| exclude.is_none_or(|q| dist(*p, q) > 1e-9 * (1.0 + size(q))))
        .collect()
}

/// Candidates for vertex `j` given the earlier vertices.
fn step(b: &Billiard, j: usize, c: C64, prev: &[[C64; 2]]) -> Vec<[C64; 2]> {
    match j {
        0 => candidates(b.mirror(0), true, c, None),
        1 => candidates(b.mirror(1), true, c, Some(prev[0])),
        _ => {
            let fam = edge_family(j - 1);
            let a = prev[j - 1];
            candidates(b.mirror(j), fam, pencil_value(fam, a), Some(a))
        }
    }
}

/// Closing mismatch: `A_1` must lie on the isotropic line through `A_k`
/// that continues the alternation.
fn closure_c(k: usize, pts: &[[C64; 2]]) -> C64 {
    let fam = edge_family(k - 1);
    (pencil_value(fam, pts[0]) - pencil_value(fam, pts[k - 1]))
        / (1.0 + size(pts[0]) + size(pts[k - 1]))
}

fn enumerate(b: &Billiard, k: usize, c: C64, cap: usize) -> Vec<Vec<[C64; 2]>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<[C64; 2]>> = vec![Vec::new()];
    while let Some(path) = stack.pop() {
        if out.len() >= cap {
            break;
        }
        if path.len() == k {
            out.push(path);
            continue;
        }
        for p in step(b, path.len(), c, &path) {
            let mut next = path.clone();
            next.push(p);
            stack.push(next);
        }
    }
    out
}

fn track(b: &Billiard, k: usize, c: C64, refs: &[[C64; 2]]) -> Option<Vec<[C64; 2]>> {
    let mut pts: Vec<[C64; 2]> = Vec::with_capacity(k);
    for (j, r) in refs.iter().enumerate().take(k) {
        let cand = step(b, j, c, &pts);
        let best = cand
            .into_iter()
            .min_by(|p, q| dist(*p, *r).partial_cmp(&dist(*q, *r)).unwrap())?;
        pts.push(best);
    }
    Some(pts)
}

fn solve_closure(
    b: &Billiard,
    k: usize,
    c0: C64,
    path: Vec<[C64; 2]>,
    max_iter: usize,
) -> (Vec<[C64; 2]>, f64) {
    let mut ca = c0;
    let mut pa = path;
    let mut ha = closure_c(k, &pa);
    let mut cb = c0 + C64::from_polar(1e-3 * (1.0 + c0.norm()), 0.7);
    let Some(mut pb) = track(b, k, cb, &pa) else {
        return (pa, ha.norm());
    };
    let mut hb = closure_c(k, &pb);
    for _ in 0..max_iter {
        if hb.norm() < 1e-13 {
            break;
        }
        let denom = hb - ha;
        if denom.norm() == 0.0 {
            break;
        }
        let mut dc = -hb * (cb - ca) / denom;
        let cap = 0.5 * (1.0 + cb.norm());
        if dc.norm() > cap {
            dc *= cap / dc.norm();
        }
        let mut next = None;
        for _ in 0..10 {
            if let Some(p) = track(b, k, cb + dc, &pb) {
                next = Some(p);
                break;
            }
            dc *= 0.5;
        }
        let Some(pn) = next else { break };
        ca = cb;
        ha = hb;
        pa = pb;
        cb += dc;
        pb = pn;
        hb = closure_c(k, &pb);
    }
    if hb.norm() <= ha.norm() {
        (pb, hb.norm())
    } else {
        (pa, ha.norm())
    }
}

fn forced_tag(e: usize) -> EdgeTag {
    if edge_family(e) {
        EdgeTag::ThroughI1
    } else {
        EdgeTag::ThroughI2
    }
}

/// Seeds `n_seeds` pencil lines through `I1`, follows every branch of the
/// alternating isotropic chain of length `k` and tries to close it. Closed
/// candidates come first and are deduplicated; chains that could not be
/// closed are reported with `closed = false`.
pub fn find_isotropic_edge_orbit(
    b: &Billiard,
    k: usize,
    n_seeds: usize,
    opts: &ChainOptions,
) -> Vec<ChainResult> {
    if k < 2 {
        return Vec::new();
    }
    let mut closed: Vec<ChainResult> = Vec::new();
    let mut open: Vec<ChainResult> = Vec::new();
    for i in 0..n_seeds {
        let mut rng = seed_rng(opts.rng_seed, i);
        let c0 = opts.seed_box.sample(&mut rng);
        for path in enumerate(b, k, c0, opts.max_branches) {
            let (pts, res) = solve_closure(b, k, c0, path, opts.max_iter);
            let vertices: Vec<PPoint> = pts.iter().map(|p| PPoint::affine(p[0], p[1])).collect();
            let is_closed = res < 1e-11;
            let tags = if is_closed {
                classify_points(&vertices).ok()
            } else {
                None
            };
            match tags {
                Some(edge_tags) => {
                    let parity_obstruction = edge_tags[k - 1] == edge_tags[0];
                    let cps: Option<Vec<_>> = vertices
                        .iter()
                        .enumerate()
                        .map(|(j, p)| b.mirror(j).curve_point(*p).ok())
                        .collect();
                    let law_residual = cps
                        .and_then(|cps| orbit_residual(b, &cps).ok())
                        .map(|r| r.values.iter().map(|z| z.norm()).fold(0.0, f64::max));
                    let dup = closed.iter().any(|c| {
                        c.vertices
                            .iter()
                            .zip(&vertices)
                            .all(|(a, b)| a.chordal(b) < 1e-8)
                    });
                    if !dup {
                        closed.push(ChainResult {
                            vertices,
                            edge_tags,
                            closed: true,
                            parity_obstruction,
                            closure_residual: res,
                            law_residual,
                        });
                    }
                }
                None => {
                    let edge_tags: Vec<EdgeTag> = (0..k).map(forced_tag).collect();
                    open.push(ChainResult {
                        vertices,
                        parity_obstruction: edge_tags[k - 1] == edge_tags[0],
                        edge_tags,
                        closed: false,
                        closure_residual: res,
                        law_residual: None,
                    });
                }
            }
        }
    }
    closed.extend(open);
    closed
}
