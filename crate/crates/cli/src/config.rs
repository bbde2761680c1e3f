//! Run configuration: TOML file sections `[system]`, `[basis]`, `[run]`,
//! overridden field-by-field by command-line flags. The resolved form is
//! echoed as TOML so a run can be reproduced from its own output.
//!
//! Masses and the coupling constant are carried as decimal strings so that
//! configuration files keep full working precision.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use nopair_core::precision::real_str;
use nopair_core::system::{SystemPreset, TwoBodySystem, ALPHA_INVERSE_DEFAULT};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub system: Option<SystemSection>,
    pub basis: Option<BasisSection>,
    pub run: Option<RunSection>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub preset: Option<String>,
    pub m1: Option<String>,
    /// explicit m2; takes precedence over `m2_over_m1`
    pub m2: Option<String>,
    pub m2_over_m1: Option<String>,
    pub alpha_inverse: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSection {
    pub nb: Option<usize>,
    pub exponents: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub model: Option<String>,
    pub breit: Option<String>,
    pub precision_digits: Option<u32>,
    pub threads: Option<usize>,
    pub scan_from: Option<i64>,
    pub scan_to: Option<i64>,
    pub scan_step: Option<i64>,
    pub no_log_term: Option<bool>,
    pub out: Option<PathBuf>,
    pub dump_matrices: Option<bool>,
}

/// Fully resolved configuration; serializable, and every run echoes it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: String,
    /// mass of particle 1 in electron masses, full-precision decimal
    pub m1: String,
    /// mass of particle 2 in electron masses, full-precision decimal
    pub m2: String,
    pub q1q2: String,
    pub alpha_inverse: String,
    pub nb: usize,
    pub model: String,
    pub breit: String,
    pub precision_digits: u32,
    pub threads: usize,
    pub scan_from: i64,
    pub scan_to: i64,
    pub scan_step: i64,
    pub no_log_term: bool,
    pub exponents: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dump_matrices: bool,
}

/// Flag-level overrides collected by the argument parser.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub system: Option<String>,
    pub m1: Option<String>,
    pub m2_over_m1: Option<String>,
    pub alpha_inverse: Option<String>,
    pub nb: Option<usize>,
    pub model: Option<String>,
    pub breit: Option<String>,
    pub precision_digits: Option<u32>,
    pub threads: Option<usize>,
    pub scan_from: Option<i64>,
    pub scan_to: Option<i64>,
    pub scan_step: Option<i64>,
    pub no_log_term: bool,
    pub exponents: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dump_matrices: bool,
}

pub const PRECISION_ENV: &str = "NOPAIR_QED_PRECISION";

impl RunConfig {
    /// Merge file sections and flags; flags win. Precision comes from the
    /// flag, then the file, then the `NOPAIR_QED_PRECISION` environment
    /// variable, then the 34-digit default.
    pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<RunConfig> {
        let sys = file.system.clone().unwrap_or_default();
        let basis = file.basis.clone().unwrap_or_default();
        let run = file.run.clone().unwrap_or_default();

        let system = flags
            .system
            .clone()
            .or(sys.preset.clone())
            .unwrap_or_else(|| "ps".to_string());
        let alpha_inverse = flags
            .alpha_inverse
            .clone()
            .or(sys.alpha_inverse.clone())
            .unwrap_or_else(|| ALPHA_INVERSE_DEFAULT.to_string());
        real_str(&alpha_inverse).context("alpha_inverse is not a decimal number")?;

        let (m1, m2) = if system == "custom" {
            let m1 = flags
                .m1
                .clone()
                .or(sys.m1.clone())
                .context("custom system needs --m1")?;
            let m1v = real_str(&m1).context("m1 is not a decimal number")?;
            let m2v = if let Some(m2) = sys.m2.clone() {
                real_str(&m2).context("m2 is not a decimal number")?
            } else {
                let ratio = flags
                    .m2_over_m1
                    .clone()
                    .or(sys.m2_over_m1.clone())
                    .context("custom system needs --m2-over-m1 (or m2 in the config file)")?;
                let rv = real_str(&ratio).context("m2-over-m1 is not a decimal number")?;
                m1v.clone() * rv
            };
            (
                nopair_core::precision::to_full_string(&m1v),
                nopair_core::precision::to_full_string(&m2v),
            )
        } else {
            let preset = SystemPreset::from_name(&system)
                .with_context(|| format!("unknown system preset {system:?}"))?;
            let s = TwoBodySystem::preset(preset);
            (
                nopair_core::precision::to_full_string(s.m1()),
                nopair_core::precision::to_full_string(s.m2()),
            )
        };

        let nb = flags.nb.or(basis.nb).unwrap_or(10);
        if nb == 0 {
            bail!("nb must be at least 1");
        }
        let model = flags
            .model
            .clone()
            .or(run.model.clone())
            .unwrap_or_else(|| "dcb".to_string());
        if !matches!(model.as_str(), "dc" | "dcb") {
            bail!("model must be dc or dcb, got {model:?}");
        }
        let breit = flags
            .breit
            .clone()
            .or(run.breit.clone())
            .unwrap_or_else(|| "all".to_string());
        if !matches!(
            breit.as_str(),
            "none" | "pt1" | "pt2" | "variational" | "all"
        ) {
            bail!("breit must be one of none|pt1|pt2|variational|all, got {breit:?}");
        }
        let precision_digits = flags
            .precision_digits
            .or(run.precision_digits)
            .or_else(|| {
                std::env::var(PRECISION_ENV)
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(nopair_core::precision::DEFAULT_DIGITS);
        let threads = flags.threads.or(run.threads).unwrap_or(2);
        let scan_from = flags.scan_from.or(run.scan_from).unwrap_or(-50);
        let scan_to = flags.scan_to.or(run.scan_to).unwrap_or(50);
        let scan_step = flags.scan_step.or(run.scan_step).unwrap_or(5);
        let no_log_term = flags.no_log_term || run.no_log_term.unwrap_or(false);
        let exponents = flags.exponents.clone().or(basis.exponents.clone());
        let out = flags.out.clone().or(run.out.clone());
        let dump_matrices = flags.dump_matrices || run.dump_matrices.unwrap_or(false);

        Ok(RunConfig {
            system,
            m1,
            m2,
            q1q2: "-1".to_string(),
            alpha_inverse,
            nb,
            model,
            breit,
            precision_digits,
            threads,
            scan_from,
            scan_to,
            scan_step,
            no_log_term,
            exponents,
            out,
            dump_matrices,
        })
    }

    pub fn to_system(&self) -> Result<TwoBodySystem> {
        let m1 = real_str(&self.m1)?;
        let m2 = real_str(&self.m2)?;
        let q = real_str(&self.q1q2)?;
        let a = real_str(&self.alpha_inverse)?;
        Ok(TwoBodySystem::new(m1, m2, q, a)?)
    }

    /// TOML echo in the file-config shape, suitable for `--config`.
    pub fn echo(&self) -> String {
        #[derive(Serialize)]
        struct Echo<'a> {
            system: EchoSystem<'a>,
            basis: EchoBasis<'a>,
            run: EchoRun<'a>,
        }
        #[derive(Serialize)]
        struct EchoSystem<'a> {
            preset: &'a str,
            m1: &'a str,
            m2: &'a str,
            alpha_inverse: &'a str,
        }
        #[derive(Serialize)]
        struct EchoBasis<'a> {
            nb: usize,
            #[serde(skip_serializing_if = "Option::is_none")]
            exponents: &'a Option<PathBuf>,
        }
        #[derive(Serialize)]
        struct EchoRun<'a> {
            model: &'a str,
            breit: &'a str,
            precision_digits: u32,
            threads: usize,
            scan_from: i64,
            scan_to: i64,
            scan_step: i64,
            no_log_term: bool,
            #[serde(skip_serializing_if = "Option::is_none")]
            out: &'a Option<PathBuf>,
            dump_matrices: bool,
        }
        let echo = Echo {
            system: EchoSystem {
                preset: &self.system,
                m1: &self.m1,
                m2: &self.m2,
                alpha_inverse: &self.alpha_inverse,
            },
            basis: EchoBasis {
                nb: self.nb,
                exponents: &self.exponents,
            },
            run: EchoRun {
                model: &self.model,
                breit: &self.breit,
                precision_digits: self.precision_digits,
                threads: self.threads,
                scan_from: self.scan_from,
                scan_to: self.scan_to,
                scan_step: self.scan_step,
                no_log_term: self.no_log_term,
                out: &self.out,
                dump_matrices: self.dump_matrices,
            },
        };
        toml::to_string(&echo).expect("config echo")
    }
}
