//! Numerical evidence for k-reflectivity: the local dimension of the set of
//! periodic orbits near an anchor orbit, multi-start probes, the third-vertex
//! map `Q_ab` and the isotropic-edge chain search.

mod chain;

pub use chain::{find_isotropic_edge_orbit, ChainOptions, ChainResult};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mirrors::{project_to_curve, CurvePoint, Mirror};
use crate::orbits::{
    gauss_newton, jacobian_at, move_vertex, solve_periodic, validate_orbit, Billiard, Orbit,
    SolveOptions,
};
use crate::projective::{meet, PPoint};
use crate::reflection::{reflect_line_at, Involution};
use crate::tol::Tolerances;
use crate::C64;

/// Complex phases of the two perturbed chart coordinates in the sampling pass.
const PHASES: [f64; 2] = [0.3, 1.1];
const GRID: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Inconclusive,
    NotReflectiveEvidence,
    ReflectiveEvidence,
}

/// Outcome of one random start of a probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SeedOutcome {
    Converged {
        seed: usize,
        max_residual: f64,
        local_dim: usize,
        verdict: Verdict,
    },
    Rejected {
        seed: usize,
        reason: String,
    },
    Failed {
        seed: usize,
        reason: String,
    },
}

/// Numerical rank/dimension estimate near an orbit. This is evidence, not
/// proof: the raw singular values are carried along.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectivityReport {
    pub k: usize,
    pub anchor: Option<Orbit>,
    pub jacobian_rank: usize,
    pub local_dim: usize,
    pub singular_values: Vec<f64>,
    pub sample_successes: f64,
    pub seeds: Vec<SeedOutcome>,
    pub verdict: Verdict,
}

impl ReflectivityReport {
    fn inconclusive(k: usize, anchor: Option<Orbit>) -> Self {
        ReflectivityReport {
            k,
            anchor,
            jacobian_rank: 0,
            local_dim: 0,
            singular_values: Vec::new(),
            sample_successes: 0.0,
            seeds: Vec::new(),
            verdict: Verdict::Inconclusive,
        }
    }
}

/// Box `re x im` from which complex seeds are drawn uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedBox {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl Default for SeedBox {
    fn default() -> Self {
        SeedBox {
            re: [-2.0, 2.0],
            im: [-0.5, 0.5],
        }
    }
}

impl SeedBox {
    pub fn sample(&self, rng: &mut impl Rng) -> C64 {
        let pick = |r: [f64; 2], rng: &mut dyn rand::RngCore| {
            if r[1] > r[0] {
                r[0] + (r[1] - r[0]) * rng.random::<f64>()
            } else {
                r[0]
            }
        };
        C64::new(pick(self.re, rng), pick(self.im, rng))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProbeOptions {
    /// Seed box per vertex, reused cyclically; empty means the default box.
    pub seed_boxes: Vec<SeedBox>,
    pub rng_seed: u64,
    pub tolerances: Tolerances,
}

impl ProbeOptions {
    fn seed_box(&self, j: usize) -> SeedBox {
        if self.seed_boxes.is_empty() {
            SeedBox::default()
        } else {
            self.seed_boxes[j % self.seed_boxes.len()]
        }
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            converged: self.tolerances.residual_converged,
            ..SolveOptions::default()
        }
    }
}

/// Per-start random generator; independent of scheduling order.
pub fn seed_rng(rng_seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(index as u64);
    rng
}

/// Random point of a mirror: a parameter value from the box, or for curves
/// without a parametrization an `x` from the box and one of the `y` roots.
pub fn random_curve_point(m: &Mirror, sbox: &SeedBox, rng: &mut impl Rng) -> Result<CurvePoint> {
    if let Some(p) = m.param() {
        let s = sbox.sample(rng);
        let pt = p.point(s);
        return m.curve_point(pt);
    }
    for _ in 0..8 {
        let x = sbox.sample(rng);
        let ys = m.poly().in_y_at(x).roots();
        if ys.is_empty() {
            continue;
        }
        let y = ys[rng.random_range(0..ys.len())];
        if let Ok(cp) = project_to_curve(m, &PPoint::affine(x, y)) {
            return Ok(cp);
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not seed a point on {}",
        m.label
    )))
}

/// Meet of the images of line `AB` under the symmetries at `A` and at `B`.
/// Parallel images meet at infinity, which is a valid result.
pub fn q_ab(a: &CurvePoint, b: &CurvePoint) -> Result<PPoint> {
    if a.point.proj_eq(&b.point) {
        return Err(Error::CoincidentPoints);
    }
    let ab = crate::projective::join(&a.point, &b.point)?;
    let mut images = Vec::with_capacity(2);
    for v in [a, b] {
        if ab.chordal(&v.tangent) < crate::tol::EDGE_CHORDAL {
            return Err(Error::Tangential);
        }
        let inv = Involution::from_point_dir(v.point, v.tangent.direction())?;
        images.push(reflect_line_at(&ab, &v.point, &inv)?);
    }
    meet(&images[0], &images[1]).map_err(|_| Error::Tangential)
}

/// `(A, B) -> (B, C)` with `C` the projection of `Q_ab(A, B)` to the mirror
/// `c`. Fails with [`Error::NoClosure`] when `Q_ab` is not on `c`.
pub fn psi_b(a: &CurvePoint, b: &CurvePoint, c: &Mirror) -> Result<(CurvePoint, CurvePoint)> {
    let q = q_ab(a, b)?;
    let Ok((qx, qy)) = q.to_affine() else {
        return Err(Error::NoClosure(f64::INFINITY));
    };
    let cp = project_to_curve(c, &q).map_err(|_| Error::NoClosure(f64::INFINITY))?;
    let (x, y) = cp.point.to_affine()?;
    let dist = ((x - qx).norm_sqr() + (y - qy).norm_sqr()).sqrt();
    if dist > 1e-6 * (1.0 + (qx.norm_sqr() + qy.norm_sqr()).sqrt()) {
        return Err(Error::NoClosure(dist));
    }
    Ok((b.clone(), cp))
}

/// Local dimension of the periodic-orbit set at `o` with default tolerances.
pub fn family_dimension(b: &Billiard, o: &Orbit) -> ReflectivityReport {
    family_dimension_with(b, o, &Tolerances::default())
}

/// Rank of the residual Jacobian over the `k` chart coordinates, and the
/// fraction of a `5 x 5` grid of perturbations of the first two vertices for
/// which the remaining vertices can be re-solved.
pub fn family_dimension_with(b: &Billiard, o: &Orbit, t: &Tolerances) -> ReflectivityReport {
    let k = o.k();
    if !validate_orbit(b, o).pass {
        return ReflectivityReport::inconclusive(k, Some(o.clone()));
    }
    let Ok(pts) = o.affine_vertices() else {
        return ReflectivityReport::inconclusive(k, Some(o.clone()));
    };
    let Ok((_, sv)) = jacobian_at(b, &pts) else {
        return ReflectivityReport::inconclusive(k, Some(o.clone()));
    };
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > t.rank_ratio * smax).count();
    let local_dim = k - rank;

    let opts = SolveOptions {
        converged: t.residual_converged,
        ..SolveOptions::default()
    };
    let mut free = vec![true; k];
    free[0] = false;
    free[1] = false;
    let step = |i: usize| t.sample_radius * (2.0 * i as f64 / (GRID - 1) as f64 - 1.0);
    let mut ok = 0usize;
    for i in 0..GRID {
        for jdx in 0..GRID {
            let d0 = C64::from_polar(step(i), PHASES[0]);
            let d1 = C64::from_polar(step(jdx), PHASES[1]);
            let moved = move_vertex(b, 0, pts[0], d0)
                .and_then(|p0| move_vertex(b, 1, pts[1], d1).map(|p1| (p0, p1)));
            let Ok((p0, p1)) = moved else { continue };
            let mut start = pts.clone();
            start[0] = p0;
            start[1] = p1;
            if let Ok(out) = gauss_newton(b, start, &free, &opts) {
                if out.max_residual < t.residual_valid {
                    ok += 1;
                }
            }
        }
    }
    let sample_successes = ok as f64 / (GRID * GRID) as f64;
    let verdict = if local_dim >= 2 && sample_successes >= 0.99 {
        Verdict::ReflectiveEvidence
    } else if local_dim <= 1 {
        Verdict::NotReflectiveEvidence
    } else {
        Verdict::Inconclusive
    };
    ReflectivityReport {
        k,
        anchor: Some(o.clone()),
        jacobian_rank: rank,
        local_dim,
        singular_values: sv,
        sample_successes,
        seeds: Vec::new(),
        verdict,
    }
}

/// Multi-start search for `k`-periodic orbits, each converged and valid
/// orbit analysed by [`family_dimension_with`]. The overall verdict is the
/// strongest evidence found; the report fields come from that orbit.
pub fn reflectivity_probe(
    b: &Billiard,
    k: usize,
    n_seeds: usize,
    opts: &ProbeOptions,
) -> ReflectivityReport {
    let results: Vec<(SeedOutcome, Option<ReflectivityReport>)> = (0..n_seeds)
        .into_par_iter()
        .map(|i| probe_one(b, k, i, opts))
        .collect();
    let mut best: Option<ReflectivityReport> = None;
    let mut seeds = Vec::with_capacity(n_seeds);
    for (outcome, report) in results {
        seeds.push(outcome);
        if let Some(r) = report {
            if best.as_ref().is_none_or(|b| r.verdict > b.verdict) {
                best = Some(r);
            }
        }
    }
    let mut report = best.unwrap_or_else(|| ReflectivityReport::inconclusive(k, None));
    report.k = k;
    report.seeds = seeds;
    report
}

fn probe_one(
    b: &Billiard,
    k: usize,
    i: usize,
    opts: &ProbeOptions,
) -> (SeedOutcome, Option<ReflectivityReport>) {
    let mut rng = seed_rng(opts.rng_seed, i);
    let init: Result<Vec<CurvePoint>> = (0..k)
        .map(|j| random_curve_point(b.mirror(j), &opts.seed_box(j), &mut rng))
        .collect();
    let orbit = init.and_then(|init| solve_periodic(b, k, &init, &opts.solve_options()));
    match orbit {
        Err(e) => (
            SeedOutcome::Failed {
                seed: i,
                reason: e.to_string(),
            },
            None,
        ),
        Ok(o) => {
            let v = validate_orbit(b, &o);
            if !v.pass {
                let reason = serde_json::to_string(&v.failure).unwrap_or_default();
                return (SeedOutcome::Rejected { seed: i, reason }, None);
            }
            let r = family_dimension_with(b, &o, &opts.tolerances);
            let outcome = SeedOutcome::Converged {
                seed: i,
                max_residual: o.max_residual(),
                local_dim: r.local_dim,
                verdict: r.verdict,
            };
            (outcome, Some(r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Mirror {
        Mirror::circle("c", 0.0, 0.0, 1.0).unwrap()
    }

    fn at(m: &Mirror, deg: f64) -> CurvePoint {
        let a = deg.to_radians();
        m.curve_point(PPoint::real(a.cos(), a.sin())).unwrap()
    }

    #[test]
    fn q_ab_on_the_circle() {
        let q = q_ab(&at(&unit(), 0.0), &at(&unit(), 120.0)).unwrap();
        let a = (240f64).to_radians();
        assert!(q.chordal(&PPoint::real(a.cos(), a.sin())) < 1e-12);
    }

    #[test]
    fn q_ab_parallel_images_meet_at_infinity() {
        let l0 = Mirror::real_line("y0", 0.0, 1.0, 0.0).unwrap();
        let l1 = Mirror::real_line("y1", 0.0, 1.0, -1.0).unwrap();
        let a = l0.curve_point(PPoint::real(0.0, 0.0)).unwrap();
        let b = l1.curve_point(PPoint::real(1.0, 1.0)).unwrap();
        let q = q_ab(&a, &b).unwrap();
        assert!(q.proj_eq(&PPoint::new(
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0)
        )));
        assert_eq!(q_ab(&a, &a), Err(Error::CoincidentPoints));
    }

    #[test]
    fn psi_b_examples() {
        for (a, b, c) in [(0.0, 120.0, 240.0), (10.0, 130.0, 250.0)] {
            let (bb, cc) = psi_b(&at(&unit(), a), &at(&unit(), b), &unit()).unwrap();
            assert_eq!(bb.point, at(&unit(), b).point);
            assert!(cc.point.chordal(&at(&unit(), c).point) < 1e-10);
        }
        let far = Mirror::circle("far", 10.0, 10.0, 1.0).unwrap();
        assert!(matches!(
            psi_b(&at(&unit(), 0.0), &at(&unit(), 120.0), &far),
            Err(Error::NoClosure(_))
        ));
    }

    #[test]
    fn equilateral_orbit_has_one_dimensional_family() {
        let b = Billiard::repeated(unit(), 3).unwrap();
        let v: Vec<CurvePoint> = [0.0, 120.0, 240.0]
            .iter()
            .map(|d| at(&unit(), *d + 7.0))
            .collect();
        let o = solve_periodic(&b, 3, &v, &SolveOptions::default()).unwrap();
        let r = family_dimension(&b, &o);
        assert_eq!(r.local_dim, 1);
        assert_eq!(r.verdict, Verdict::NotReflectiveEvidence);
    }

    #[test]
    fn diameter_has_one_dimensional_family() {
        let b = Billiard::repeated(unit(), 2).unwrap();
        let v = vec![at(&unit(), 20.0), at(&unit(), 200.0)];
        let o = solve_periodic(&b, 2, &v, &SolveOptions::default()).unwrap();
        assert_eq!(family_dimension(&b, &o).local_dim, 1);
    }

    #[test]
    fn circle_probe_is_not_reflective() {
        let b = Billiard::repeated(unit(), 3).unwrap();
        let r = reflectivity_probe(&b, 3, 20, &ProbeOptions::default());
        assert_eq!(r.verdict, Verdict::NotReflectiveEvidence);
        for s in &r.seeds {
            if let SeedOutcome::Converged { local_dim, .. } = s {
                assert_eq!(*local_dim, 1);
            }
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let mut a = seed_rng(7, 3);
        let mut b = seed_rng(7, 3);
        let sb = SeedBox::default();
        assert_eq!(sb.sample(&mut a), sb.sample(&mut b));
    }
}
