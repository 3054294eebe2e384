//! Built-in manufactured solutions.
//!
//! Every built-in has the separated-time form `u = e^t * v(space)`, so
//! sources, boundary data and history all factor into one spatial profile
//! scaled by `e^t`; the studies precompute the spatial parts once per grid.
//!
//! - `1d-quartic` on (0, 1): `u = e^t (x^2 (1-x)^2 + e^{-2})`,
//! - `2d-mult-quartic` on (0, 2)^2: `u = e^t (x^2(2-x)^2 y^2(2-y)^2 - sin 1)`,
//! - `2d-add-exptrig` on (0, 1)^2: `u = e^t (e^{2x+4y}(sin 2x + cos 4y) + 1)`,
//! - `2d-add-polyprod` on (0, 1)^2:
//!   `u = e^t (x^4 - x^3 + x^2 + 1)(y^4 - 2y^3 + y^2 + 1)`,
//! - `zero`: the zero solution.
//!
//! 1D and multiplicative sources are closed-form (polynomial moments against
//! the kernel); additive sources go through the singularity-cancelling domain
//! quadrature for `∫∫ (v(z) - v(p)) |z - p|^{-gamma} dp`.

use crate::poly::Poly;

#[derive(Debug, Clone)]
pub enum Profile {
    /// `v(x) = g(x) + c0`.
    Sep1d { g: Poly, c0: f64 },
    /// `v(x, y) = gx(x) gy(y) + c0` (multiplicative kernel).
    SepMult { gx: Poly, gy: Poly, c0: f64 },
    /// General smooth `v(x, y)` (additive kernel); `smooth_scale` controls the
    /// source quadrature order (polynomial profiles need far fewer nodes).
    Additive { v: fn(f64, f64) -> f64, polynomial: bool },
    Zero,
}

#[derive(Debug, Clone)]
pub struct Manufactured {
    pub id: &'static str,
    pub profile: Profile,
    /// Default square domain endpoints.
    pub domain: (f64, f64),
    pub t_final_default: f64,
}

fn add_exptrig(x: f64, y: f64) -> f64 {
    (2.0 * x + 4.0 * y).exp() * ((2.0 * x).sin() + (4.0 * y).cos()) + 1.0
}

fn add_polyprod(x: f64, y: f64) -> f64 {
    (x.powi(4) - x.powi(3) + x * x + 1.0) * (y.powi(4) - 2.0 * y.powi(3) + y * y + 1.0)
}

impl Manufactured {
    pub fn by_id(id: &str) -> Option<Manufactured> {
        match id {
            "1d-quartic" => Some(Manufactured {
                id: "1d-quartic",
                // x^2 (1-x)^2 = x^2 - 2x^3 + x^4, plus e^{-2}.
                profile: Profile::Sep1d {
                    g: Poly::new(vec![0.0, 0.0, 1.0, -2.0, 1.0]),
                    c0: (-2.0f64).exp(),
                },
                domain: (0.0, 1.0),
                t_final_default: 1.0,
            }),
            "2d-mult-quartic" => Some(Manufactured {
                id: "2d-mult-quartic",
                // x^2 (2-x)^2 = 4x^2 - 4x^3 + x^4 in both directions.
                profile: Profile::SepMult {
                    gx: Poly::new(vec![0.0, 0.0, 4.0, -4.0, 1.0]),
                    gy: Poly::new(vec![0.0, 0.0, 4.0, -4.0, 1.0]),
                    c0: -(1.0f64).sin(),
                },
                domain: (0.0, 2.0),
                t_final_default: 2.0,
            }),
            "2d-add-exptrig" => Some(Manufactured {
                id: "2d-add-exptrig",
                profile: Profile::Additive { v: add_exptrig, polynomial: false },
                domain: (0.0, 1.0),
                t_final_default: 1.0,
            }),
            "2d-add-polyprod" => Some(Manufactured {
                id: "2d-add-polyprod",
                profile: Profile::Additive { v: add_polyprod, polynomial: true },
                domain: (0.0, 1.0),
                t_final_default: 1.0,
            }),
            "zero" => Some(Manufactured {
                id: "zero",
                profile: Profile::Zero,
                domain: (0.0, 1.0),
                t_final_default: 1.0,
            }),
            _ => None,
        }
    }

    /// Spatial profile `v` such that `u = e^t v` (1D form).
    pub fn v1(&self, x: f64) -> f64 {
        match &self.profile {
            Profile::Sep1d { g, c0 } => g.eval(x) + c0,
            Profile::Zero => 0.0,
            _ => panic!("{} is not a 1D solution", self.id),
        }
    }

    /// Spatial profile `v` (2D form, both kernels).
    pub fn v2(&self, x: f64, y: f64) -> f64 {
        match &self.profile {
            Profile::SepMult { gx, gy, c0 } => gx.eval(x) * gy.eval(y) + c0,
            Profile::Additive { v, .. } => v(x, y),
            Profile::Zero => 0.0,
            _ => panic!("{} is not a 2D solution", self.id),
        }
    }

    /// Spatial part of the steady nonlocal term
    /// `L[v](x) = ∫ (v(x) - v(y)) |x-y|^{-gamma} dy` in 1D, closed form.
    pub fn nonlocal_1d(&self, x: f64, gamma: f64, a: f64, b: f64) -> f64 {
        match &self.profile {
            Profile::Sep1d { g, .. } => {
                let w1 = Poly::new(vec![1.0]).weighted_kernel_moment(a, b, x, gamma);
                g.eval(x) * w1 - g.weighted_kernel_moment(a, b, x, gamma)
            }
            Profile::Zero => 0.0,
            _ => panic!("{} is not a 1D solution", self.id),
        }
    }

    /// Spatial part of the steady nonlocal term for the multiplicative
    /// kernel: `v W1x W1y - Gx Gy` with the polynomial moments in closed form.
    pub fn nonlocal_mult(&self, x: f64, y: f64, gamma: f64, dom: (f64, f64)) -> f64 {
        match &self.profile {
            Profile::SepMult { gx, gy, .. } => {
                let one = Poly::new(vec![1.0]);
                let w1x = one.weighted_kernel_moment(dom.0, dom.1, x, gamma);
                let w1y = one.weighted_kernel_moment(dom.0, dom.1, y, gamma);
                let mx = gx.weighted_kernel_moment(dom.0, dom.1, x, gamma);
                let my = gy.weighted_kernel_moment(dom.0, dom.1, y, gamma);
                gx.eval(x) * gy.eval(y) * w1x * w1y - mx * my
            }
            Profile::Zero => 0.0,
            _ => panic!("{} is not a separable 2D solution", self.id),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ["1d-quartic", "2d-mult-quartic", "2d-add-exptrig", "2d-add-polyprod", "zero"] {
            assert_eq!(Manufactured::by_id(id).unwrap().id, id);
        }
        assert!(Manufactured::by_id("nope").is_none());
    }

    #[test]
    fn quartic_profile_values() {
        let m = Manufactured::by_id("1d-quartic").unwrap();
        // v(1/2) = (1/4)(1/4) + e^{-2}.
        assert!((m.v1(0.5) - (0.0625 + (-2.0f64).exp())).abs() < 1e-15);
        // Boundary values are the constant.
        assert!((m.v1(0.0) - (-2.0f64).exp()).abs() < 1e-15);
        assert!((m.v1(1.0) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn mult_profile_is_separable_quartic() {
        let m = Manufactured::by_id("2d-mult-quartic").unwrap();
        let v = m.v2(1.0, 1.0);
        assert!((v - (1.0 - (1.0f64).sin())).abs() < 1e-15);
    }

    #[test]
    fn nonlocal_term_annihilates_constants() {
        // The constant part of the profile must not contribute to the
        // nonlocal term.
        let m = Manufactured::by_id("1d-quartic").unwrap();
        let with_c = m.nonlocal_1d(0.3, 0.5, 0.0, 1.0);
        let bare = Manufactured {
            id: "t",
            profile: Profile::Sep1d {
                g: Poly::new(vec![0.0, 0.0, 1.0, -2.0, 1.0]),
                c0: 99.0,
            },
            domain: (0.0, 1.0),
            t_final_default: 1.0,
        }
        .nonlocal_1d(0.3, 0.5, 0.0, 1.0);
        assert!((with_c - bare).abs() < 1e-13);
    }
}
