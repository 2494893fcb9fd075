//! Model parameters and the modulated hopping profile.
//!
//! Sites are 0-based (`0..sites`). Bond `b` joins sites `b` and `b + 1`; its
//! modulation is evaluated at the 1-based bond position `b + 1`, so for
//! `period = 2, phase = 0` the chain starts with a weak bond.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{ConfigIssue, Error, Result};

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 14;

/// Which qubit Hamiltonian is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// `sum J_b/2 (XX + YY) + V/2 sum ZZ`, verbatim spin form.
    #[default]
    PaperLiteral,
    /// Exact Jordan-Wigner image of the fermionic model, with
    /// `n_i -> (I - Z_i)/2` in the interaction.
    ExactJw,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::PaperLiteral => "paper-literal",
            Flavor::ExactJw => "exact-jw",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(Flavor::PaperLiteral),
            "exact-jw" => Ok(Flavor::ExactJw),
            other => Err(Error::Validation(format!("unknown flavor '{other}'"))),
        }
    }
}

/// Hamiltonian parameters. Energies are in units of the bare hopping scale,
/// times in its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(rename = "J")]
    pub hopping: f64,
    #[serde(rename = "lambda_J")]
    pub modulation: f64,
    #[serde(rename = "T_period")]
    pub period: u32,
    #[serde(rename = "phi_J")]
    pub phase: f64,
    #[serde(rename = "V")]
    pub interaction: f64,
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(default)]
    pub flavor: Flavor,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            hopping: 1.0,
            modulation: 0.0,
            period: 2,
            phase: 0.0,
            interaction: 0.0,
            sites: 2,
            flavor: Flavor::PaperLiteral,
        }
    }
}

impl ModelParams {
    /// Uniform `J = 1`, `T = 2` chain with the given size, modulation and phase.
    pub fn aah(sites: usize, modulation: f64, phase: f64) -> Self {
        Self {
            sites,
            modulation,
            phase,
            ..Self::default()
        }
    }

    pub fn with_interaction(mut self, interaction: f64) -> Self {
        self.interaction = interaction;
        self
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    pub fn bonds(&self) -> usize {
        self.sites.saturating_sub(1)
    }

    /// True when `|lambda_J| >= 1`, i.e. some bond coefficients may vanish or
    /// change sign. Permitted, but worth flagging to callers.
    pub fn sign_changing_bonds(&self) -> bool {
        self.modulation.abs() >= 1.0
    }

    /// Checks the parameter invariants, reporting issues under `prefix`.
    pub fn issues(&self, prefix: &str) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let field = |name: &str| {
            if prefix.is_empty() {
                name.to_string()
            } else {
                format!("{prefix}.{name}")
            }
        };
        if !(MIN_SITES..=MAX_SITES).contains(&self.sites) {
            out.push(ConfigIssue::new(
                field("L"),
                format!("must be in {MIN_SITES}..={MAX_SITES}, got {}", self.sites),
            ));
        }
        if self.period < 1 {
            out.push(ConfigIssue::new(field("T_period"), "must be >= 1"));
        }
        for (name, value) in [
            ("J", self.hopping),
            ("lambda_J", self.modulation),
            ("phi_J", self.phase),
            ("V", self.interaction),
        ] {
            if !value.is_finite() {
                out.push(ConfigIssue::new(field(name), "must be finite"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues("");
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }
}

/// Hopping coefficient `J [1 + lambda cos(2 pi (b+1) / T + phi)]` of bond `b`.
pub fn bond_coefficient(params: &ModelParams, bond: usize) -> Result<f64> {
    if bond >= params.bonds() {
        return Err(Error::index("bond", bond, params.bonds()));
    }
    Ok(coefficient_unchecked(params, bond))
}

fn coefficient_unchecked(params: &ModelParams, bond: usize) -> f64 {
    let angle = 2.0 * PI * (bond as f64 + 1.0) / f64::from(params.period) + params.phase;
    params.hopping * (1.0 + params.modulation * angle.cos())
}

/// All `L - 1` bond coefficients in bond order.
pub fn bond_profile(params: &ModelParams) -> Vec<f64> {
    (0..params.bonds()).map(|b| coefficient_unchecked(params, b)).collect()
}
