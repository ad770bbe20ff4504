//! Resolved run configuration. Every output file embeds one of these, and
//! `oar replay` reruns it.

use std::path::PathBuf;

use oar_core::kernels::{Couplings, InverseTemperature};
use oar_core::quadrature::QuadratureSpec;
use oar_core::rgflow::tail_cutoff;
use oar_core::wavelet::{make_daubechies_filter, Filter, MAX_DAUBECHIES_ORDER};
use oar_core::OarError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Which low-pass filter a command runs with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FilterChoice {
    /// Daubechies filter with `2p` taps.
    Daubechies { p: usize },
    /// Raw coefficients, deliberately not validated (used to exercise the
    /// verification suites).
    Custom { coeffs: Vec<f64> },
}

impl FilterChoice {
    /// Parses `haar`, `dN` (N even, 2..=20) or a bare `N`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let t = s.trim().to_ascii_lowercase();
        if t == "haar" {
            return Ok(FilterChoice::Daubechies { p: 1 });
        }
        let digits = t.strip_prefix('d').unwrap_or(&t);
        let taps: usize = digits
            .parse()
            .map_err(|_| format!("unknown filter '{s}' (expected haar or d2, d4, ..., d20)"))?;
        if taps == 0 || taps % 2 == 1 || taps / 2 > MAX_DAUBECHIES_ORDER {
            return Err(format!("unknown filter '{s}' (expected haar or d2, d4, ..., d20)"));
        }
        Ok(FilterChoice::Daubechies { p: taps / 2 })
    }

    pub fn build(&self) -> Filter {
        match self {
            FilterChoice::Daubechies { p } => make_daubechies_filter(*p).expect("order validated at parse time"),
            FilterChoice::Custom { coeffs } => Filter::new_unchecked(coeffs.clone(), coeffs.len() / 2, 0),
        }
    }

    /// Builds the filter and rejects it unless it satisfies the filter
    /// invariants.
    pub fn build_checked(&self) -> Result<Filter, OarError> {
        let f = self.build();
        f.check_invariants()?;
        Ok(f)
    }

    pub fn label(&self) -> String {
        match self {
            FilterChoice::Daubechies { p } => format!("D{}", 2 * p),
            FilterChoice::Custom { coeffs } => format!("custom[{}]", coeffs.len()),
        }
    }
}

/// Chain couplings; `beta = None` is the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingsConfig {
    pub t1: f64,
    pub t3: f64,
    pub beta: Option<f64>,
}

impl CouplingsConfig {
    pub fn critical() -> Self {
        Self {
            t1: 1.0,
            t3: 1.0,
            beta: None,
        }
    }

    pub fn inverse_temperature(&self) -> InverseTemperature {
        match self.beta {
            Some(b) => InverseTemperature::Finite(b),
            None => InverseTemperature::Infinite,
        }
    }

    pub fn build(&self) -> Result<Couplings, OarError> {
        Couplings::new(self.t1, self.t3, self.inverse_temperature())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Lattice,
    CriticalLattice,
    CriticalLimit,
    MassiveThermal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// Scaling limit `ω^(∞)` of the critical chain.
    Limit,
    /// The lattice state given by the couplings.
    Lattice,
    /// `m` renormalization steps of the lattice state.
    Renormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    Partition,
    Trotter,
    Channel,
    Fixtures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Wavelet,
    Kernels,
    Rgflow,
    Correlators,
    Oracle,
    Errorbounds,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Wavelet,
        Suite::Kernels,
        Suite::Rgflow,
        Suite::Correlators,
        Suite::Oracle,
        Suite::Errorbounds,
    ];

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Wavelet => "wavelet",
            Suite::Kernels => "kernels",
            Suite::Rgflow => "rgflow",
            Suite::Correlators => "correlators",
            Suite::Oracle => "oracle",
            Suite::Errorbounds => "errorbounds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    Small,
    Full,
}

/// Command-specific settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CommandConfig {
    Filters,
    Kernel {
        kind: KernelKind,
        kmax: f64,
        points: usize,
        mu0: f64,
        beta0: Option<f64>,
        t: f64,
    },
    Flow {
        separation: i64,
    },
    Spincorr {
        state: StateKind,
        d_max: usize,
        sites: Option<Vec<i64>>,
        check_exponent: bool,
        fit_from: usize,
    },
    Oracle {
        kind: OracleKind,
        half_width: usize,
        half_height: usize,
        k1: f64,
        k2: f64,
        trotter_steps: Vec<usize>,
    },
    Verify {
        suite: Suite,
        grid: Grid,
    },
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Filters => "filters",
            CommandConfig::Kernel { .. } => "kernel",
            CommandConfig::Flow { .. } => "flow",
            CommandConfig::Spincorr { .. } => "spincorr",
            CommandConfig::Oracle { .. } => "oracle",
            CommandConfig::Verify { .. } => "verify",
        }
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandConfig,
    /// `None` lets each command (or verification suite) use its own default.
    pub filter: Option<FilterChoice>,
    pub couplings: CouplingsConfig,
    pub m: u32,
    pub quadrature: QuadratureSpec,
    pub output: PathBuf,
    pub format: Format,
    pub seed: u64,
}

/// The finest decade of `|ŝ|²` tail mass the filter reaches within the
/// quadrature's `k_max_cap`, floored at the library default.
pub fn reachable_tail_tol(filter: &Filter, spec: &QuadratureSpec) -> f64 {
    let floor = QuadratureSpec::default().tail_tol;
    let probe = QuadratureSpec { tail_tol: floor, ..*spec };
    match tail_cutoff(filter, &probe) {
        Ok(_) => floor,
        Err(OarError::TailMassUnsatisfiable { tail_mass, .. }) => 10f64.powf(tail_mass.log10().ceil()).max(floor) * 1.0000001,
        Err(_) => floor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunConfig {
        RunConfig {
            command: CommandConfig::Spincorr {
                state: StateKind::Limit,
                d_max: 7,
                sites: Some(vec![-1, 0, 3]),
                check_exponent: true,
                fit_from: 6,
            },
            filter: Some(FilterChoice::Custom {
                coeffs: vec![0.1 + 0.2, std::f64::consts::FRAC_1_SQRT_2],
            }),
            couplings: CouplingsConfig {
                t1: 1.0 / 3.0,
                t3: 2.0,
                beta: Some(1e-17),
            },
            m: 9,
            quadrature: QuadratureSpec::default().with_tail_tol(1.0000001e-5),
            output: PathBuf::from("out/x.csv"),
            format: Format::Csv,
            seed: u64::MAX,
        }
    }

    #[test]
    fn run_config_round_trips_through_json() {
        let c = sample();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        let verify = RunConfig {
            command: CommandConfig::Verify {
                suite: Suite::Errorbounds,
                grid: Grid::Small,
            },
            filter: None,
            ..c
        };
        let text = serde_json::to_string_pretty(&verify).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), verify);
    }

    #[test]
    fn filter_names() {
        assert_eq!(FilterChoice::parse("haar"), Ok(FilterChoice::Daubechies { p: 1 }));
        assert_eq!(FilterChoice::parse("D8"), Ok(FilterChoice::Daubechies { p: 4 }));
        assert_eq!(FilterChoice::parse("20"), Ok(FilterChoice::Daubechies { p: 10 }));
        for bad in ["d5", "d22", "x", "d0", ""] {
            assert!(FilterChoice::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn tail_tolerance_defaults() {
        let spec = QuadratureSpec::default();
        let d8 = make_daubechies_filter(4).unwrap();
        assert_eq!(reachable_tail_tol(&d8, &spec), spec.tail_tol);
        let d4 = make_daubechies_filter(2).unwrap();
        let tol = reachable_tail_tol(&d4, &spec);
        assert!(tol > spec.tail_tol && tol <= 1.1e-5);
        assert!(tail_cutoff(&d4, &spec.with_tail_tol(tol)).is_ok());
    }
}
