//! Planar arcs parametrized by tangent angle with a prescribed curvature
//! profile. The tangent at angle θ is `cos θ e1 + sin θ e2`, curvature is a
//! strictly positive function κ(θ), and the position is reconstructed by
//! quadrature of dx/dθ = cos θ / κ, dz/dθ = sin θ / κ.
//!
//! The only profile shipped is the Gehring clasp arc, whose curvature is
//! given in terms of u = sin θ.

use super::V3;
use crate::quad;

/// Gehring-arc horizontal coordinate x_τ(u) for u ∈ [−τ, τ].
pub fn gehring_x(tau: f64, u: f64) -> f64 {
    let w = tau - u.abs();
    u * (1.0 - w * w).sqrt() / (1.0 - u * u * w * w).sqrt()
}

/// Gehring-arc curvature κ_τ(u) for u ∈ [−τ, τ].
pub fn gehring_kappa(tau: f64, u: f64) -> f64 {
    let w = tau - u.abs();
    let a = 1.0 - u * u * w * w;
    let b = 1.0 - w * w;
    (a.powi(3) * b).sqrt() / (b + w * u.abs() * (1.0 - u * u))
}

/// κ_τ written through the angles sin α = |u|, sin β = τ − |u|,
/// sin γ = sin α sin β. Algebraically equal to [`gehring_kappa`].
pub fn gehring_kappa_angles(tau: f64, u: f64) -> f64 {
    let sin_a = u.abs();
    let sin_b = tau - sin_a;
    let sin_g = sin_a * sin_b;
    let cos_a2 = 1.0 - sin_a * sin_a;
    let cos_b = (1.0 - sin_b * sin_b).sqrt();
    let cos_g = (1.0 - sin_g * sin_g).sqrt();
    cos_b * cos_g.powi(3) / (cos_b * cos_b + sin_g * cos_a2)
}

#[derive(Debug, Clone)]
pub enum ProfileKind {
    Gehring { tau: f64 },
}

impl ProfileKind {
    pub fn kappa(&self, theta: f64) -> f64 {
        match self {
            ProfileKind::Gehring { tau } => gehring_kappa(*tau, theta.sin()),
        }
    }

    /// Closed-form in-plane abscissa, when the profile has one.
    fn xi_closed_form(&self, theta: f64) -> Option<f64> {
        match self {
            ProfileKind::Gehring { tau } => Some(gehring_x(*tau, theta.sin())),
        }
    }
}

#[derive(Debug, Clone)]
struct Anchor {
    theta: f64,
    s: f64,
    xi: f64,
    zeta: f64,
}

/// A tangent-angle profile arc placed in space: position(θ) =
/// origin + scale·(ξ(θ) e1 + ζ(θ) e2) with (ξ, ζ)(θ0) = 0. The scale
/// factor supports similarity transforms (curvature divides by it).
#[derive(Debug, Clone)]
pub struct Profile {
    pub origin: V3,
    pub e1: V3,
    pub e2: V3,
    pub theta0: f64,
    pub theta1: f64,
    pub kind: ProfileKind,
    pub scale: f64,
    anchors: Vec<Anchor>,
    len: f64,
}

/// Quadrature tolerance for profile reconstruction.
const PROFILE_TOL: f64 = 1e-12;

impl Profile {
    pub fn new(
        origin: V3,
        e1: V3,
        e2: V3,
        theta0: f64,
        theta1: f64,
        kind: ProfileKind,
    ) -> Result<Self, quad::QuadError> {
        let mut p = Self {
            origin,
            e1,
            e2,
            theta0,
            theta1,
            kind,
            scale: 1.0,
            anchors: vec![],
            len: 0.0,
        };
        p.build_anchors()?;
        Ok(p)
    }

    /// Similarity copy: positions multiply by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut p = self.clone();
        p.origin *= factor;
        p.scale *= factor;
        p
    }

    /// Gehring arc for `u ∈ [u0, u1]` in a given plane, starting at `origin`.
    pub fn gehring(
        origin: V3,
        e1: V3,
        e2: V3,
        tau: f64,
        u0: f64,
        u1: f64,
    ) -> Result<Self, quad::QuadError> {
        Self::new(origin, e1, e2, u0.asin(), u1.asin(), ProfileKind::Gehring { tau })
    }

    fn build_anchors(&mut self) -> Result<(), quad::QuadError> {
        // Split at θ = 0 where the Gehring profile has a |u| kink.
        let mut breaks = vec![self.theta0];
        if self.theta0 < 0.0 && self.theta1 > 0.0 {
            breaks.push(0.0);
        }
        breaks.push(self.theta1);

        let n_per_unit = 512.0;
        let mut anchors = vec![Anchor { theta: self.theta0, s: 0.0, xi: 0.0, zeta: 0.0 }];
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = ((b - a) * n_per_unit).ceil().max(16.0) as usize;
            for i in 1..=n {
                let t0 = a + (b - a) * (i - 1) as f64 / n as f64;
                let t1 = a + (b - a) * i as f64 / n as f64;
                let k = |t: f64| self.kind.kappa(t);
                let ds = quad::integrate(|t| 1.0 / k(t), t0, t1, PROFILE_TOL)?;
                // The abscissa has a closed form for the Gehring profile,
                // which keeps junction consistency at machine precision.
                let xi_next = match self.kind.xi_closed_form(t1) {
                    Some(x1) => {
                        x1 - self.kind.xi_closed_form(self.theta0).unwrap()
                    }
                    None => {
                        anchors.last().unwrap().xi
                            + quad::integrate(|t| t.cos() / k(t), t0, t1, PROFILE_TOL)?
                    }
                };
                let dzeta = quad::integrate(|t| t.sin() / k(t), t0, t1, PROFILE_TOL)?;
                let prev = anchors.last().unwrap();
                anchors.push(Anchor {
                    theta: t1,
                    s: prev.s + ds,
                    xi: xi_next,
                    zeta: prev.zeta + dzeta,
                });
            }
        }
        self.len = anchors.last().unwrap().s;
        self.anchors = anchors;
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.len * self.scale
    }

    /// Tangent angle at arclength `s` (monotone since κ > 0).
    pub fn theta_at(&self, s: f64) -> f64 {
        let s = (s / self.scale).clamp(0.0, self.len);
        let idx = match self
            .anchors
            .binary_search_by(|a| a.s.partial_cmp(&s).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let a = &self.anchors[idx.min(self.anchors.len() - 2)];
        let b = &self.anchors[(idx + 1).min(self.anchors.len() - 1)];
        // Newton on s(θ) = s from the left anchor; ds/dθ = 1/κ.
        let mut theta = a.theta + (b.theta - a.theta) * (s - a.s) / (b.s - a.s).max(1e-300);
        for _ in 0..40 {
            let s_theta = a.s
                + quad::integrate(|t| 1.0 / self.kind.kappa(t), a.theta, theta, 1e-14)
                    .unwrap_or(0.0);
            let err = s_theta - s;
            if err.abs() < 1e-14 * (1.0 + self.len) {
                break;
            }
            theta -= err * self.kind.kappa(theta);
            theta = theta.clamp(self.theta0, self.theta1);
        }
        theta
    }

    /// Arclength from the start of the arc to tangent angle `theta`.
    pub fn arclength_of(&self, theta: f64) -> f64 {
        let theta = theta.clamp(self.theta0, self.theta1);
        let idx = match self
            .anchors
            .binary_search_by(|a| a.theta.partial_cmp(&theta).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let a = &self.anchors[idx.min(self.anchors.len() - 2)];
        let tail = quad::integrate(|t| 1.0 / self.kind.kappa(t), a.theta, theta, 1e-14)
            .unwrap_or(0.0);
        (a.s + tail) * self.scale
    }

    pub fn eval(&self, s: f64) -> (V3, V3, V3) {
        let theta = self.theta_at(s);
        let idx = match self
            .anchors
            .binary_search_by(|a| a.theta.partial_cmp(&theta).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let a = &self.anchors[idx.min(self.anchors.len() - 2)];
        let k = |t: f64| self.kind.kappa(t);
        let xi = match self.kind.xi_closed_form(theta) {
            Some(x) => x - self.kind.xi_closed_form(self.theta0).unwrap(),
            None => {
                a.xi + quad::integrate(|t| t.cos() / k(t), a.theta, theta, 1e-14).unwrap_or(0.0)
            }
        };
        let zeta =
            a.zeta + quad::integrate(|t| t.sin() / k(t), a.theta, theta, 1e-14).unwrap_or(0.0);
        let pos = self.origin + self.scale * (xi * self.e1 + zeta * self.e2);
        let tangent = theta.cos() * self.e1 + theta.sin() * self.e2;
        let kappa = k(theta) / self.scale * (-theta.sin() * self.e1 + theta.cos() * self.e2);
        (pos, tangent, kappa)
    }

    pub fn max_curvature(&self) -> f64 {
        let n = 1024;
        let mut best = 0.0_f64;
        let mut best_t = self.theta0;
        for i in 0..=n {
            let t = self.theta0 + (self.theta1 - self.theta0) * i as f64 / n as f64;
            let k = self.kind.kappa(t);
            if k > best {
                best = k;
                best_t = t;
            }
        }
        // Golden-section polish around the best sample.
        let h = (self.theta1 - self.theta0) / n as f64;
        let (mut lo, mut hi) =
            ((best_t - h).max(self.theta0), (best_t + h).min(self.theta1));
        let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
        for _ in 0..60 {
            let a = lo + phi * (hi - lo);
            let b = hi - phi * (hi - lo);
            if self.kind.kappa(a) > self.kind.kappa(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        best.max(self.kind.kappa(0.5 * (lo + hi))) / self.scale
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.theta1 > self.theta0) {
            return Err("profile angle interval is empty or reversed".into());
        }
        if !(self.scale > 0.0) {
            return Err("profile scale must be positive".into());
        }
        if (self.e1.norm() - 1.0).abs() > 1e-9
            || (self.e2.norm() - 1.0).abs() > 1e-9
            || self.e1.dot(&self.e2).abs() > 1e-9
        {
            return Err("profile plane basis is not orthonormal".into());
        }
        let n = 256;
        for i in 0..=n {
            let t = self.theta0 + (self.theta1 - self.theta0) * i as f64 / n as f64;
            if !(self.kind.kappa(t) > 0.0) {
                return Err(format!("profile curvature not positive at θ = {t}"));
            }
        }
        match self.kind {
            ProfileKind::Gehring { tau } => {
                if !(0.0..=1.0).contains(&tau) {
                    return Err("gehring profile requires τ ∈ [0, 1]".into());
                }
                // The tip u = 0 is singular at τ = 1; an interval touching
                // it needs τ bounded away from 1.
                if tau > 1.0 - 1e-14 && self.theta0.abs().min(self.theta1.abs()) < 1e-7 {
                    return Err(
                        "gehring profile through the tip requires τ ≤ 1 − 1e−14".into(),
                    );
                }
            }
        }
        Ok(())
    }
}
