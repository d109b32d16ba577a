//! Similarity energies between diagonal or spherical Gaussians, with
//! closed-form gradients.
//!
//! Every gradient here is taken of the *score* the ranking loss maximises:
//! the log expected likelihood for EL, and the negated divergence for KL.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Borrowed view of one node's Gaussian.
///
/// `cov` holds the diagonal of Σ (length `mean.len()`) or, in spherical
/// mode, the single variance σ² (length 1).
#[derive(Debug, Clone, Copy)]
pub struct Gaussian<'a> {
    pub mean: &'a [f64],
    pub cov: &'a [f64],
}

impl<'a> Gaussian<'a> {
    pub fn new(mean: &'a [f64], cov: &'a [f64]) -> Self {
        debug_assert!(cov.len() == 1 || cov.len() == mean.len());
        Gaussian { mean, cov }
    }

    #[inline]
    fn dim(&self) -> usize {
        self.mean.len()
    }

    #[inline]
    fn var(&self, l: usize) -> f64 {
        if self.cov.len() == 1 {
            self.cov[0]
        } else {
            self.cov[l]
        }
    }

    fn spherical(&self) -> bool {
        self.cov.len() == 1 && self.mean.len() != 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Energy {
    ExpectedLikelihood,
    #[default]
    KlSymmetric,
    KlDirected,
}

impl Energy {
    pub fn name(self) -> &'static str {
        match self {
            Energy::ExpectedLikelihood => "el",
            Energy::KlSymmetric => "kl",
            Energy::KlDirected => "kl_directed",
        }
    }

    /// Similarity score: larger means more alike.
    pub fn score(self, zi: Gaussian, zj: Gaussian) -> f64 {
        if zi.cov.len() == 1 && zj.cov.len() == 1 {
            return spherical::score(self, zi, zj);
        }
        match self {
            Energy::ExpectedLikelihood => energy_el(zi, zj),
            Energy::KlSymmetric => -energy_kl(zi, zj, true),
            Energy::KlDirected => -energy_kl(zi, zj, false),
        }
    }

    /// Gradient of [`Energy::score`], written into `out`.
    pub fn score_grad(self, zi: Gaussian, zj: Gaussian, out: &mut PairGrad) {
        if zi.cov.len() == 1 && zj.cov.len() == 1 {
            return spherical::score_grad(self, zi, zj, out);
        }
        match self {
            Energy::ExpectedLikelihood => grad_el_into(zi, zj, out),
            Energy::KlSymmetric => grad_kl_into(zi, zj, true, out),
            Energy::KlDirected => grad_kl_into(zi, zj, false, out),
        }
    }
}

impl std::fmt::Display for Energy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Energy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "el" | "expected_likelihood" => Ok(Energy::ExpectedLikelihood),
            "kl" | "kl_symmetric" => Ok(Energy::KlSymmetric),
            "kl_directed" => Ok(Energy::KlDirected),
            other => Err(format!("unknown energy {other:?}")),
        }
    }
}

/// Gradients of a pair score w.r.t. both means and both covariances.
///
/// Covariance gradients have the layout of [`Gaussian::cov`]; in spherical
/// mode the single entry is the derivative w.r.t. σ², i.e. the trace of
/// the diagonal gradient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairGrad {
    pub mean_i: Vec<f64>,
    pub mean_j: Vec<f64>,
    pub cov_i: Vec<f64>,
    pub cov_j: Vec<f64>,
}

impl PairGrad {
    fn reset(&mut self, d: usize, ci: usize, cj: usize) {
        for (buf, len) in [(&mut self.mean_i, d), (&mut self.mean_j, d), (&mut self.cov_i, ci), (&mut self.cov_j, cj)] {
            buf.clear();
            buf.resize(len, 0.0);
        }
    }
}

/// `log N(0; μi - μj, Σi + Σj)`, the log of the Gaussians' inner product.
pub fn energy_el(zi: Gaussian, zj: Gaussian) -> f64 {
    let d = zi.dim();
    let mut quad = 0.0;
    let mut logdet = 0.0;
    for l in 0..d {
        let s = zi.var(l) + zj.var(l);
        let diff = zi.mean[l] - zj.mean[l];
        quad += diff * diff / s;
        logdet += s.ln();
    }
    -0.5 * (quad + logdet + d as f64 * (2.0 * PI).ln())
}

/// Gradient of [`energy_el`]: with `Δ = (Σi + Σj)⁻¹ (μi - μj)`, the mean
/// gradients are `-Δ` and `+Δ`, and both covariance gradients equal
/// `½ (ΔΔᵀ - (Σi + Σj)⁻¹)` restricted to the diagonal.
pub fn grad_el(zi: Gaussian, zj: Gaussian) -> PairGrad {
    let mut out = PairGrad::default();
    grad_el_into(zi, zj, &mut out);
    out
}

fn grad_el_into(zi: Gaussian, zj: Gaussian, out: &mut PairGrad) {
    let d = zi.dim();
    out.reset(d, zi.cov.len(), zj.cov.len());
    for l in 0..d {
        let s = zi.var(l) + zj.var(l);
        let delta = (zi.mean[l] - zj.mean[l]) / s;
        out.mean_i[l] = -delta;
        out.mean_j[l] = delta;
        let g = 0.5 * (delta * delta - 1.0 / s);
        out.cov_i[if zi.cov.len() == 1 { 0 } else { l }] += g;
        out.cov_j[if zj.cov.len() == 1 { 0 } else { l }] += g;
    }
}

/// KL-based energy.
///
/// Directed: `½ {tr(Σi⁻¹Σj) + (μi-μj)ᵀ Σi⁻¹ (μi-μj) - log(det Σj / det Σi) - d}`,
/// which is the divergence of `zj` from `zi` (the expectation is taken under
/// `zj`). Symmetric: the average of both directions. Always non-negative.
pub fn energy_kl(zi: Gaussian, zj: Gaussian, symmetric: bool) -> f64 {
    if symmetric {
        0.5 * (kl_directed(zi, zj) + kl_directed(zj, zi))
    } else {
        kl_directed(zi, zj)
    }
}

fn kl_directed(zi: Gaussian, zj: Gaussian) -> f64 {
    let d = zi.dim();
    let mut total = 0.0;
    for l in 0..d {
        let (si, sj) = (zi.var(l), zj.var(l));
        let diff = zi.mean[l] - zj.mean[l];
        total += sj / si + diff * diff / si - (sj / si).ln() - 1.0;
    }
    0.5 * total
}

/// Gradient of the KL score `-energy_kl(zi, zj, symmetric)`.
///
/// Directed, with `Δ' = Σi⁻¹ (μi - μj)`: mean gradients `-Δ'` and `+Δ'`,
/// `∂/∂Σi = ½ (Σi⁻¹ Σj Σi⁻¹ + Δ'Δ'ᵀ - Σi⁻¹)`, `∂/∂Σj = ½ (Σj⁻¹ - Σi⁻¹)`.
/// Symmetric mode averages the two directed gradients.
pub fn grad_kl(zi: Gaussian, zj: Gaussian, symmetric: bool) -> PairGrad {
    let mut out = PairGrad::default();
    grad_kl_into(zi, zj, symmetric, &mut out);
    out
}

fn grad_kl_into(zi: Gaussian, zj: Gaussian, symmetric: bool, out: &mut PairGrad) {
    let d = zi.dim();
    out.reset(d, zi.cov.len(), zj.cov.len());
    let weight = if symmetric { 0.5 } else { 1.0 };
    let ci = |l: usize| if zi.cov.len() == 1 { 0 } else { l };
    let cj = |l: usize| if zj.cov.len() == 1 { 0 } else { l };
    for l in 0..d {
        let (si, sj) = (zi.var(l), zj.var(l));
        let diff = zi.mean[l] - zj.mean[l];

        // direction i -> j
        let dp = diff / si;
        out.mean_i[l] -= weight * dp;
        out.mean_j[l] += weight * dp;
        out.cov_i[ci(l)] += weight * 0.5 * (sj / (si * si) + dp * dp - 1.0 / si);
        out.cov_j[cj(l)] += weight * 0.5 * (1.0 / sj - 1.0 / si);

        if symmetric {
            // direction j -> i, roles swapped
            let dq = -diff / sj;
            out.mean_j[l] -= weight * dq;
            out.mean_i[l] += weight * dq;
            out.cov_j[cj(l)] += weight * 0.5 * (si / (sj * sj) + dq * dq - 1.0 / sj);
            out.cov_i[ci(l)] += weight * 0.5 * (1.0 / si - 1.0 / sj);
        }
    }
}

/// Closed forms for two spherical Gaussians, where every per-dimension term
/// depends on the means only through `‖μi - μj‖²`.
mod spherical {
    use super::{Energy, Gaussian, PairGrad, PI};

    #[inline]
    fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    pub(super) fn score(energy: Energy, zi: Gaussian, zj: Gaussian) -> f64 {
        let d = zi.dim() as f64;
        let (si, sj) = (zi.cov[0], zj.cov[0]);
        let dist = sq_dist(zi.mean, zj.mean);
        match energy {
            Energy::ExpectedLikelihood => {
                let s = si + sj;
                -0.5 * (dist / s + d * s.ln() + d * (2.0 * PI).ln())
            }
            Energy::KlDirected => -0.5 * (d * sj / si + dist / si - d * (sj / si).ln() - d),
            Energy::KlSymmetric => -0.25 * (d * (sj / si + si / sj) + dist * (1.0 / si + 1.0 / sj) - 2.0 * d),
        }
    }

    pub(super) fn score_grad(energy: Energy, zi: Gaussian, zj: Gaussian, out: &mut PairGrad) {
        let d = zi.dim();
        out.reset(d, 1, 1);
        let df = d as f64;
        let (si, sj) = (zi.cov[0], zj.cov[0]);
        // mean gradient is coef · (μi - μj) for μi and its negation for μj
        let (coef, dist) = match energy {
            Energy::ExpectedLikelihood => (-1.0 / (si + sj), 0.0),
            Energy::KlDirected => (-1.0 / si, 0.0),
            Energy::KlSymmetric => (-0.5 * (1.0 / si + 1.0 / sj), 0.0),
        };
        let mut dist = dist;
        for l in 0..d {
            let diff = zi.mean[l] - zj.mean[l];
            dist += diff * diff;
            out.mean_i[l] = coef * diff;
            out.mean_j[l] = -coef * diff;
        }
        let (gi, gj) = match energy {
            Energy::ExpectedLikelihood => {
                let s = si + sj;
                let g = 0.5 * (dist / (s * s) - df / s);
                (g, g)
            }
            Energy::KlDirected => {
                (0.5 * (df * sj / (si * si) + dist / (si * si) - df / si), 0.5 * df * (1.0 / sj - 1.0 / si))
            }
            Energy::KlSymmetric => (
                0.25 * (df * sj / (si * si) + dist / (si * si) - df / si) + 0.25 * df * (1.0 / si - 1.0 / sj),
                0.25 * (df * si / (sj * sj) + dist / (sj * sj) - df / sj) + 0.25 * df * (1.0 / sj - 1.0 / si),
            ),
        };
        out.cov_i[0] = gi;
        out.cov_j[0] = gj;
    }
}

/// True when `zi` uses one shared variance over more than one dimension.
pub fn is_spherical(z: Gaussian) -> bool {
    z.spherical()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z<'a>(mean: &'a [f64], cov: &'a [f64]) -> Gaussian<'a> {
        Gaussian::new(mean, cov)
    }

    #[test]
    fn el_standard_normal_at_zero() {
        let e = energy_el(z(&[0.0], &[0.5]), z(&[0.0], &[0.5]));
        assert!((e - (-0.5 * (2.0 * PI).ln())).abs() < 1e-15);
        assert!((e + 0.918_938_533_204_672_7).abs() < 1e-12);
    }

    #[test]
    fn el_is_symmetric() {
        let (a, b) = (z(&[0.3, -1.0], &[0.7, 1.1]), z(&[1.2, 0.4], &[0.2, 2.0]));
        assert_eq!(energy_el(a, b), energy_el(b, a));
    }

    #[test]
    fn el_equal_means_zero_mean_gradient() {
        let g = grad_el(z(&[0.5, 0.5], &[1.0, 2.0]), z(&[0.5, 0.5], &[0.3, 0.4]));
        assert!(g.mean_i.iter().chain(&g.mean_j).all(|&x| x == 0.0));
        assert_eq!(g.cov_i, g.cov_j);
    }

    #[test]
    fn kl_identical_is_zero() {
        let a = z(&[0.3, -0.2, 1.0], &[0.5, 1.5, 2.0]);
        assert_eq!(energy_kl(a, a, false), 0.0);
        assert_eq!(energy_kl(a, a, true), 0.0);
        let g = grad_kl(a, a, false);
        assert!(g.mean_i.iter().chain(&g.cov_j).all(|&x| x == 0.0));
    }

    #[test]
    fn kl_one_dimensional_value() {
        // ½ (σj²/σi² + Δ²/σi² - ln(σj²/σi²) - 1) with σi² = 1, σj² = 2, Δ = -1
        let e = energy_kl(z(&[0.0], &[1.0]), z(&[1.0], &[2.0]), false);
        assert!((e - 0.5 * (2.0 - 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn kl_directed_is_asymmetric() {
        let (a, b) = (z(&[0.0], &[1.0]), z(&[1.0], &[2.0]));
        assert!((energy_kl(a, b, false) - energy_kl(b, a, false)).abs() > 0.1);
        assert_eq!(energy_kl(a, b, true), energy_kl(b, a, true));
    }

    #[test]
    fn kl_mean_gradient_scaling() {
        // Σ -> tΣ and Δμ -> √t Δμ scale Σi⁻¹Δμ by 1/√t
        let t: f64 = 4.0;
        let g1 = grad_kl(z(&[1.0, -0.5], &[0.5, 0.8]), z(&[0.0, 0.0], &[1.0, 0.3]), false);
        let g2 = grad_kl(z(&[t.sqrt(), -0.5 * t.sqrt()], &[0.5 * t, 0.8 * t]), z(&[0.0, 0.0], &[t, 0.3 * t]), false);
        for (a, b) in g1.mean_i.iter().zip(&g2.mean_i) {
            assert!((b - a / t.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn spherical_covariance_gradient_is_trace() {
        let (mi, mj) = ([0.2, -0.4, 0.9], [0.0, 0.5, -0.3]);
        let sph = grad_el(z(&mi, &[0.6]), z(&mj, &[1.3]));
        let diag = grad_el(z(&mi, &[0.6; 3]), z(&mj, &[1.3; 3]));
        assert_eq!(sph.cov_i.len(), 1);
        assert!((sph.cov_i[0] - diag.cov_i.iter().sum::<f64>()).abs() < 1e-14);
        assert!(is_spherical(z(&mi, &[0.6])));
    }

    #[test]
    fn spherical_fast_path_matches_per_dimension_form() {
        let (mi, mj) = ([0.2, -0.4, 0.9, 1.3], [0.0, 0.5, -0.3, 0.1]);
        let (ci, cj) = ([0.6], [1.7]);
        let (a, b) = (z(&mi, &ci), z(&mj, &cj));
        for energy in [Energy::ExpectedLikelihood, Energy::KlSymmetric, Energy::KlDirected] {
            let generic = match energy {
                Energy::ExpectedLikelihood => energy_el(a, b),
                Energy::KlSymmetric => -energy_kl(a, b, true),
                Energy::KlDirected => -energy_kl(a, b, false),
            };
            assert!((energy.score(a, b) - generic).abs() < 1e-12, "{energy}");
            let mut fast = PairGrad::default();
            energy.score_grad(a, b, &mut fast);
            let slow = match energy {
                Energy::ExpectedLikelihood => grad_el(a, b),
                Energy::KlSymmetric => grad_kl(a, b, true),
                Energy::KlDirected => grad_kl(a, b, false),
            };
            for (x, y) in [
                (&fast.mean_i, &slow.mean_i),
                (&fast.mean_j, &slow.mean_j),
                (&fast.cov_i, &slow.cov_i),
                (&fast.cov_j, &slow.cov_j),
            ] {
                for (p, q) in x.iter().zip(y.iter()) {
                    assert!((p - q).abs() < 1e-12, "{energy}: {x:?} vs {y:?}");
                }
            }
        }
    }

    #[test]
    fn energy_parsing() {
        assert_eq!("kl".parse::<Energy>().unwrap(), Energy::KlSymmetric);
        assert_eq!("el".parse::<Energy>().unwrap(), Energy::ExpectedLikelihood);
        assert!("dot".parse::<Energy>().is_err());
    }
}
