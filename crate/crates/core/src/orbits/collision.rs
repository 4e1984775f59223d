//! Classification of vertex collisions in limits of periodic orbits.

use serde::{Deserialize, Serialize};

use super::{Billiard, Orbit};
use crate::mirrors::{find_special_points, Mirror, SpecialTag};
use crate::projective::{chordal, join, PPoint};

/// Points closer than this (chordally) are treated as the same point.
const SAME_POINT: f64 = 1e-9;
const SAME_LINE: f64 = 1e-8;

/// Which alternative holds at a collision `A_j = A_{j+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CollisionCase {
    /// (i) the collision point is a cusp or an isotropic tangency.
    Marked,
    /// (i) the collision point is a self-intersection or lies on two mirrors.
    Double,
    /// (ii) all vertices coincide on a single repeated mirror.
    AllCoincide,
    /// (iii) vertices `s+1 ..= j` coincide on one mirror, `A_s` differs and
    /// the line `A_s A_j` is the tangent at `A_j`. Indices are 0-based.
    TangentChain { s: usize },
    /// None of the alternatives matched.
    Unclassified,
    /// `A_j` and `A_{j+1}` are distinct, so there is nothing to classify.
    NoCollision,
}

fn same_curve(a: &Mirror, b: &Mirror) -> bool {
    a.degree() == b.degree()
        && chordal(a.poly().coefficient_vector(), b.poly().coefficient_vector()) < 1e-12
}

fn same_point(p: &PPoint, q: &PPoint) -> bool {
    p.chordal(q) < SAME_POINT
}

fn is_special(b: &Billiard, j: usize, p: &PPoint) -> Option<CollisionCase> {
    let m = b.mirror(j);
    let near = |pts: &[crate::mirrors::SpecialPoint], tag: SpecialTag| {
        pts.iter()
            .any(|s| s.tag == tag && s.point.chordal(p) < 1e-6)
    };
    if let Ok(sp) = find_special_points(m, None) {
        if near(&sp, SpecialTag::Singular) || near(&sp, SpecialTag::IsotropicTangency) {
            return Some(CollisionCase::Marked);
        }
    }
    for other in b.mirrors() {
        if same_curve(other, m) {
            continue;
        }
        if other.residual(p) < 1e-9 {
            return Some(CollisionCase::Double);
        }
        if let Ok(sp) = find_special_points(m, Some(other)) {
            if near(&sp, SpecialTag::Double) {
                return Some(CollisionCase::Double);
            }
        }
    }
    None
}

/// Classifies the collision `A_j = A_{j+1}` (0-based, cyclic) of a limit
/// configuration. For case (iii) the walk goes backwards from `j` to the
/// nearest vertex `A_s` different from `A_j`, which is the maximal `s` up to
/// cyclic renaming.
pub fn classify_collision(b: &Billiard, o: &Orbit, j: usize) -> CollisionCase {
    let k = o.k();
    let pts: Vec<PPoint> = o.vertices.iter().map(|v| v.point).collect();
    let aj = pts[j % k];
    if !same_point(&aj, &pts[(j + 1) % k]) {
        return CollisionCase::NoCollision;
    }
    if let Some(c) = is_special(b, j, &aj) {
        return c;
    }
    if pts.iter().all(|p| same_point(p, &aj)) {
        let first = b.mirror(0);
        if (0..k).all(|i| same_curve(b.mirror(i), first)) {
            return CollisionCase::AllCoincide;
        }
        return CollisionCase::Unclassified;
    }
    let mut s = (j + k - 1) % k;
    let mj = b.mirror(j);
    while same_point(&pts[s], &aj) {
        if !same_curve(b.mirror(s), mj) {
            return CollisionCase::Unclassified;
        }
        s = (s + k - 1) % k;
    }
    let Ok(tangent) = mj.tangent_line_at(&aj) else {
        return CollisionCase::Unclassified;
    };
    match join(&pts[s], &aj) {
        Ok(line) if line.chordal(&tangent) < SAME_LINE => CollisionCase::TangentChain { s },
        _ => CollisionCase::Unclassified,
    }
}
