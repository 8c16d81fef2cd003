//! Slowly varying initial data `u₀ᵉ = [u₀ʰ + εw₀ʰ, w₀³]_ε`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{besov_norm_vector, heat_flow_norm, BesovSpec, HeatFlowSampling};
use crate::solvers::{assemble_uapp, reconstruct_wh, transport::vertical_shear_content};
use crate::spectral::ops::is_dealiased;
use crate::spectral::{derivative, Axis, Grid, SpectralField, VelocityState};

/// Relative spectral tail above which a profile counts as unresolved.
pub const TAIL_LIMIT: f64 = 1e-8;

/// `amp·cos(k·x + phase)` on the unit-period box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: [i64; 3],
    pub amp: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Mode {
    fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        let arg = self.k[0] as f64 * x + self.k[1] as f64 * y + self.k[2] as f64 * z + self.phase;
        self.amp * arg.cos()
    }
}

/// Stream function `ψ(x_h, y₃)` with `u₀ʰ = (−∂₂ψ, ∂₁ψ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StreamProfile {
    /// `sin x₁ sin x₂ cos y₃ + ½ cos(2x₁ + x₂) sin 2y₃`.
    Default,
    /// The default with the `y₃` dependence removed.
    Planar,
    Zero,
    Modes { modes: Vec<Mode> },
}

/// Profile of `w₀³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerticalProfile {
    /// `½ sin(x₁ − 2x₂) cos y₃ + ¼ cos 3x₁ sin 2y₃`.
    Default,
    Zero,
    Modes { modes: Vec<Mode> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDataSpec {
    pub u0h: StreamProfile,
    pub w0_3: VerticalProfile,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        Self {
            u0h: StreamProfile::Default,
            w0_3: VerticalProfile::Default,
            amplitude: 1.0,
        }
    }
}

impl InitialDataSpec {
    /// Data for which the approximate solution is exact: `w₀ = 0` and a
    /// planar `u₀ʰ`.
    pub fn degenerate() -> Self {
        Self {
            u0h: StreamProfile::Planar,
            w0_3: VerticalProfile::Zero,
            amplitude: 1.0,
        }
    }

    fn stream(&self, g: Grid) -> SpectralField {
        let a = self.amplitude;
        match &self.u0h {
            StreamProfile::Default => SpectralField::from_fn(g, |x, y, z| {
                a * (x.sin() * y.sin() * z.cos() + 0.5 * (2.0 * x + y).cos() * (2.0 * z).sin())
            }),
            StreamProfile::Planar => {
                SpectralField::from_fn(g, |x, y, _| a * (x.sin() * y.sin() + 0.5 * (2.0 * x + y).cos()))
            }
            StreamProfile::Zero => SpectralField::zeros(g),
            StreamProfile::Modes { modes } => {
                SpectralField::from_fn(g, |x, y, z| a * modes.iter().map(|m| m.eval(x, y, z)).sum::<f64>())
            }
        }
    }

    fn vertical(&self, g: Grid) -> SpectralField {
        let a = self.amplitude;
        match &self.w0_3 {
            VerticalProfile::Default => SpectralField::from_fn(g, |x, y, z| {
                a * (0.5 * (x - 2.0 * y).sin() * z.cos() + 0.25 * (3.0 * x).cos() * (2.0 * z).sin())
            }),
            VerticalProfile::Zero => SpectralField::zeros(g),
            VerticalProfile::Modes { modes } => {
                SpectralField::from_fn(g, |x, y, z| a * modes.iter().map(|m| m.eval(x, y, z)).sum::<f64>())
            }
        }
    }

    /// `(u₀ʰ, w₀³)` on the unit-period grid.
    pub fn profiles(&self, g: Grid) -> Result<([SpectralField; 2], SpectralField)> {
        if g.stretch() != 0 {
            return Err(Error::InvalidArgument("profiles live on the unit-period grid".into()));
        }
        if !(self.amplitude.is_finite()) {
            return Err(Error::Config("amplitude must be finite".into()));
        }
        let psi = self.stream(g);
        let uh = [-&derivative(&psi, Axis::X2), derivative(&psi, Axis::X1)];
        let w3 = self.vertical(g);
        for f in uh.iter().chain([&w3]) {
            let tail = spectral_tail(f);
            if tail > TAIL_LIMIT {
                return Err(Error::Unresolved { tail, limit: TAIL_LIMIT });
            }
        }
        let shear = vertical_shear_content(&w3);
        if shear > crate::solvers::transport::MEAN_TOL {
            return Err(Error::HorizontalMean { content: shear });
        }
        Ok((uh, w3))
    }
}

/// Largest coefficient outside the 2/3 set relative to the largest overall.
pub fn spectral_tail(f: &SpectralField) -> f64 {
    let max = f.max_coeff();
    if max == 0.0 || is_dealiased(f) {
        return 0.0;
    }
    let mut cut = f.clone();
    crate::spectral::ops::dealias_in_place(&mut cut);
    (f - &cut).max_coeff() / max
}

/// Profiles together with the embedded state.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub uh: [SpectralField; 2],
    pub w3: SpectralField,
    pub state: VelocityState,
}

/// Norms of the profiles in the spaces the existence result asks for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileNorms {
    pub b0_half: f64,
    pub bm1_5half: f64,
}

impl InitialData {
    pub fn profile_norms(&self) -> ProfileNorms {
        let v = [self.uh[0].clone(), self.uh[1].clone(), self.w3.clone()];
        ProfileNorms {
            b0_half: besov_norm_vector(&v, &BesovSpec::anisotropic(0.0, 0.5)),
            bm1_5half: besov_norm_vector(&v, &BesovSpec::anisotropic(-1.0, 2.5)),
        }
    }

    /// `sup_t t^{1/2}‖e^{tΔ}u₀ᵉ‖_{L^∞}`: the size of the data in the
    /// negative-regularity sense that makes it large.
    pub fn largeness_proxy(&self, sampling: &HeatFlowSampling) -> Result<f64> {
        heat_flow_norm(
            &self.state.components,
            -1.0,
            f64::INFINITY,
            f64::INFINITY,
            &sampling.times(),
            sampling.oversample,
        )
    }
}

/// Builds `u₀ᵉ` on the grid with `n_h × n_v` points and stretch `m`.
pub fn build_initial_data(spec: &InitialDataSpec, n_h: usize, n_v: usize, m: u32) -> Result<InitialData> {
    let unit = Grid::new(n_h, n_v, 0)?;
    let (uh, w3) = spec.profiles(unit)?;
    // Both pieces are validated here so the error names the culprit.
    reconstruct_wh(&w3)?;
    let state = assemble_uapp(&uh, &w3, m, 0.0)?;
    Ok(InitialData { uh, w3, state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::relative_divergence;

    #[test]
    fn default_data_is_divergence_free() {
        for m in 0..4 {
            let d = build_initial_data(&InitialDataSpec::default(), 16, 16, m).unwrap();
            assert!(relative_divergence(&d.state.components) < 1e-11);
        }
    }

    #[test]
    fn unresolved_profile_rejected() {
        let spec = InitialDataSpec {
            u0h: StreamProfile::Modes {
                modes: vec![Mode { k: [7, 0, 1], amp: 1.0, phase: 0.0 }],
            },
            w0_3: VerticalProfile::Zero,
            amplitude: 1.0,
        };
        assert!(matches!(build_initial_data(&spec, 16, 16, 1), Err(Error::Unresolved { .. })));
    }

    #[test]
    fn planar_data_has_no_vertical_velocity() {
        let d = build_initial_data(&InitialDataSpec::degenerate(), 16, 8, 2).unwrap();
        assert_eq!(d.state.components[2].max_coeff(), 0.0);
    }
}
