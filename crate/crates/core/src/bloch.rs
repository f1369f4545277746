//! Classical magnetization on the unit sphere and its `(Q, P)` chart.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnetization vector `(m_x, m_y, m_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl BlochVector {
    pub const UP: BlochVector = BlochVector {
        mx: 0.0,
        my: 0.0,
        mz: 1.0,
    };

    pub const fn new(mx: f64, my: f64, mz: f64) -> Self {
        Self { mx, my, mz }
    }

    /// Point on the sphere at polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        )
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.mx, self.my, self.mz]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.mx * other.mx + self.my * other.my + self.mz * other.mz
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d = [self.mx - other.mx, self.my - other.my, self.mz - other.mz];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    /// Projection back onto the unit sphere.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self::new(self.mx / n, self.my / n, self.mz / n)
    }

    pub fn is_finite(&self) -> bool {
        self.mx.is_finite() && self.my.is_finite() && self.mz.is_finite()
    }
}

/// Point of the Poincaré section, `Q ∈ [-1, 1]`, `P ∈ [-π/2, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    /// Builds a chart point, wrapping `p` modulo π into `[-π/2, π/2)`.
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if !(q.is_finite() && (-1.0..=1.0).contains(&q)) {
            return Err(Error::param("Q", format!("must lie in [-1, 1], got {q}")));
        }
        if !p.is_finite() {
            return Err(Error::param("P", "must be finite"));
        }
        Ok(Self { q, p: wrap_p(p) })
    }
}

/// Representative of `p` modulo π in `[-π/2, π/2)`.
pub fn wrap_p(p: f64) -> f64 {
    let w = p - PI * ((p + FRAC_PI_2) / PI).floor();
    // floor rounding can land exactly on the open end
    if w >= FRAC_PI_2 {
        w - PI
    } else if w < -FRAC_PI_2 {
        w + PI
    } else {
        w
    }
}

/// Chart `(Q, P)` of a unit magnetization. At the poles `P := 0`.
pub fn phase_from_bloch(m: &BlochVector) -> PhasePoint {
    let q = m.mz.clamp(-1.0, 1.0);
    let transverse = m.mx.hypot(m.my);
    let p = if transverse == 0.0 || q.abs() == 1.0 {
        0.0
    } else {
        wrap_p(0.5 * m.my.atan2(m.mx))
    };
    PhasePoint { q, p }
}

/// Inverse chart: `m = (√(1-Q²) cos 2P, √(1-Q²) sin 2P, Q)`.
pub fn bloch_from_phase(p: &PhasePoint) -> BlochVector {
    let r = (1.0 - p.q * p.q).max(0.0).sqrt();
    let two_p = 2.0 * p.p;
    BlochVector::new(r * two_p.cos(), r * two_p.sin(), p.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pole_maps_to_origin_of_chart() {
        let pp = phase_from_bloch(&BlochVector::UP);
        assert_eq!((pp.q, pp.p), (1.0, 0.0));
        let down = phase_from_bloch(&BlochVector::new(0.0, 0.0, -1.0));
        assert_eq!((down.q, down.p), (-1.0, 0.0));
    }

    #[test]
    fn x_axis() {
        let pp = phase_from_bloch(&BlochVector::new(1.0, 0.0, 0.0));
        assert_eq!((pp.q, pp.p), (0.0, 0.0));
    }

    #[test]
    fn round_trip_example() {
        let pp = PhasePoint::new(0.3, 0.7).unwrap();
        let back = phase_from_bloch(&bloch_from_phase(&pp));
        assert!((back.q - 0.3).abs() < 1e-12);
        assert!((back.p - 0.7).abs() < 1e-12);
    }

    #[test]
    fn negative_x_axis_wraps_to_lower_end() {
        // 2P = π  ⇒  P = π/2 ≡ -π/2
        let pp = phase_from_bloch(&BlochVector::new(-1.0, 0.0, 0.0));
        assert!((pp.p + FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_q() {
        assert!(PhasePoint::new(1.5, 0.0).is_err());
        assert!(PhasePoint::new(0.0, f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn wrap_lands_in_half_open_interval(p in -50.0f64..50.0) {
            let w = wrap_p(p);
            prop_assert!((-FRAC_PI_2..FRAC_PI_2).contains(&w));
            let k = ((p - w) / PI).round();
            prop_assert!((p - w - k * PI).abs() < 1e-9);
        }

        #[test]
        fn chart_round_trip(q in -0.999f64..0.999, p in -FRAC_PI_2..FRAC_PI_2) {
            let pp = PhasePoint::new(q, p).unwrap();
            let m = bloch_from_phase(&pp);
            prop_assert!((m.norm() - 1.0).abs() < 1e-12);
            let back = phase_from_bloch(&m);
            prop_assert!((back.q - q).abs() < 1e-12);
            let dp = (back.p - p).abs();
            prop_assert!(dp < 1e-9 || (dp - PI).abs() < 1e-9);
        }
    }
}
