//! Table-producing subcommands.

use oar_core::correlators::{log_log_slope, spin_spin_correlation, toeplitz_correlation, toeplitz_symbol};
use oar_core::kernels::{
    covariance_critical_limit, covariance_lattice, covariance_massive_thermal, CovarianceKernel, InverseTemperature,
};
use oar_core::lattice_oracle::{
    disentangler_unitary, finite_flow, max_abs_diff, oracle_fixtures, partition_function_brute,
    partition_function_transfer, trotter_error, DenseOperator, LatticeSpec,
};
use oar_core::quadrature::{Pairing, SmearedVector};
use oar_core::rgflow::{flow_record, kernel_distance, FlowClass, LimitState, RenormalizedState, TwoPointState};
use oar_core::wavelet::{filter_table, make_daubechies_filter, Filter, MAX_DAUBECHIES_ORDER};
use serde_json::{json, Value};

use crate::config::{CommandConfig, FilterChoice, KernelKind, OracleKind, RunConfig, StateKind};
use crate::output::{num, opt_num, Table};
use crate::CliError;

pub fn run_table(cfg: &RunConfig) -> Result<Table, CliError> {
    match &cfg.command {
        CommandConfig::Filters => filters(cfg),
        CommandConfig::Kernel { .. } => kernel(cfg),
        CommandConfig::Flow { .. } => flow(cfg),
        CommandConfig::Spincorr { .. } => spincorr(cfg),
        CommandConfig::Oracle { .. } => oracle(cfg),
        CommandConfig::Verify { .. } => unreachable!("verify produces a report"),
    }
}

/// The configured filter, validated; commands other than `verify` refuse
/// filters that violate the filter invariants.
pub fn checked_filter(cfg: &RunConfig, default: FilterChoice) -> Result<Filter, CliError> {
    cfg.filter.clone().unwrap_or(default).build_checked().map_err(CliError::from)
}

fn filters(cfg: &RunConfig) -> Result<Table, CliError> {
    let list: Vec<Filter> = match &cfg.filter {
        Some(choice) => vec![choice.build_checked()?],
        None => (1..=MAX_DAUBECHIES_ORDER).map(|p| make_daubechies_filter(p).expect("supported order")).collect(),
    };
    let mut t = Table::new(&["filter", "n", "h", "g"]);
    let mut extra = Vec::new();
    for f in &list {
        for (n, h, g) in filter_table(f) {
            t.push(vec![json!(f.label()), json!(n), num(h), num(g)]);
        }
        extra.push(json!({
            "filter": f.label(),
            "order": f.order(),
            "support_offset": f.support_offset(),
            "coeffs": f.coeffs(),
            "first_moment": f.first_moment(),
        }));
    }
    t.extra = Some(json!({ "filters": extra }));
    Ok(t)
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn kernel(cfg: &RunConfig) -> Result<Table, CliError> {
    let CommandConfig::Kernel {
        kind,
        kmax,
        points,
        mu0,
        beta0,
        t,
    } = &cfg.command
    else {
        unreachable!()
    };
    let kernel = match kind {
        KernelKind::Lattice => covariance_lattice(cfg.couplings.build()?),
        KernelKind::CriticalLattice => {
            if !(cfg.couplings.t1 > 0.0) {
                return Err(CliError::Usage("critical-lattice needs --t1 > 0".into()));
            }
            CovarianceKernel::CriticalLattice { t: cfg.couplings.t1 }
        }
        KernelKind::CriticalLimit => covariance_critical_limit(),
        KernelKind::MassiveThermal => {
            let b = beta0.map(InverseTemperature::Finite).unwrap_or(InverseTemperature::Infinite);
            covariance_massive_thermal(*mu0, b, *t)?
        }
    };
    if !(*kmax > 0.0) || *points < 2 {
        return Err(CliError::Usage("kernel grid needs --kmax > 0 and --points >= 2".into()));
    }
    let mut table = Table::new(&[
        "k", "sign_k", "c00_re", "c00_im", "c01_re", "c01_im", "c10_re", "c10_im", "c11_re", "c11_im", "density_a",
        "density_b_re", "density_b_im",
    ]);
    for i in 0..*points {
        let k = -kmax + 2.0 * kmax * i as f64 / (*points - 1) as f64;
        // Snap the middle node of an odd grid to exactly zero.
        let k = if 2 * i + 1 == *points { 0.0 } else { k };
        let c = kernel.eval(k);
        let (a, b) = kernel.densities(k);
        let mut row = vec![num(k), num(signum0(k))];
        for z in [c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]] {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        row.extend([num(a), num(b.re), num(b.im)]);
        table.push(row);
    }
    Ok(table)
}

fn flow(cfg: &RunConfig) -> Result<Table, CliError> {
    let CommandConfig::Flow { separation } = &cfg.command else {
        unreachable!()
    };
    let f = checked_filter(cfg, FilterChoice::Daubechies { p: 2 })?;
    let couplings = cfg.couplings.build()?;
    let base = covariance_lattice(couplings);
    let critical = couplings.t1 == couplings.t3 && couplings.beta.is_infinite();
    let xi = SmearedVector::delta(0);
    let eta = SmearedVector::delta(*separation);
    let limit = if critical {
        Some(LimitState::critical(&f, &cfg.quadrature)?)
    } else {
        None
    };
    let mut table = Table::new(&[
        "m",
        "pairing",
        "value_re",
        "value_im",
        "limit_re",
        "limit_im",
        "abs_diff",
        "dist_critical",
        "dist_disorder",
        "dist_order",
    ]);
    for m in 0..=cfg.m {
        let st = RenormalizedState::new(base, &f, m, &cfg.quadrature)?;
        for (name, which) in [("aa_dag", Pairing::AADag), ("adag_adag", Pairing::ADagADag)] {
            let v = st.two_point(which, &xi, &eta)?;
            let lim = limit.as_ref().map(|l| l.two_point(which, &xi, &eta)).transpose()?;
            table.push(vec![
                json!(m),
                json!(name),
                num(v.re),
                num(v.im),
                opt_num(lim.map(|z| z.re)),
                opt_num(lim.map(|z| z.im)),
                opt_num(lim.map(|z| (v - z).norm())),
                num(kernel_distance(&base, &FlowClass::Critical.target_kernel(), m)),
                num(kernel_distance(&base, &FlowClass::DisorderFixedPoint.target_kernel(), m)),
                num(kernel_distance(&base, &FlowClass::OrderFixedPoint.target_kernel(), m)),
            ]);
        }
    }
    let ks: Vec<f64> = (-8..=8).map(|i| 0.5 * i as f64 + 0.25).collect();
    table.extra = Some(json!({
        "flow_record": flow_record(&f, &couplings, cfg.m, &ks),
        "limit_k_max": limit.as_ref().map(|l| l.k_max()),
        "limit_tail_mass": limit.as_ref().map(|l| l.tail_mass()),
    }));
    Ok(table)
}

fn state_for(cfg: &RunConfig, kind: StateKind) -> Result<Box<dyn TwoPointState>, CliError> {
    Ok(match kind {
        StateKind::Limit => {
            let f = checked_filter(cfg, FilterChoice::Daubechies { p: 4 })?;
            Box::new(LimitState::critical(&f, &cfg.quadrature)?)
        }
        StateKind::Lattice | StateKind::Renormalized => {
            let f = checked_filter(cfg, FilterChoice::Daubechies { p: 4 })?;
            let m = if kind == StateKind::Lattice { 0 } else { cfg.m };
            Box::new(RenormalizedState::new(covariance_lattice(cfg.couplings.build()?), &f, m, &cfg.quadrature)?)
        }
    })
}

fn spincorr(cfg: &RunConfig) -> Result<Table, CliError> {
    let CommandConfig::Spincorr {
        state,
        d_max,
        sites,
        check_exponent,
        fit_from,
    } = &cfg.command
    else {
        unreachable!()
    };
    let st = state_for(cfg, *state)?;
    let mut table = Table::new(&["d", "sites", "value", "imag_residue", "toeplitz", "pf_toeplitz_delta"]);
    if let Some(sites) = sites {
        let c = spin_spin_correlation(st.as_ref(), sites)?;
        let label = sites.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        table.push(vec![Value::Null, json!(label), num(c.value), num(c.imag_residue), Value::Null, Value::Null]);
        return Ok(table);
    }
    if *d_max == 0 {
        return Err(CliError::Usage("--d-max must be at least 1".into()));
    }
    if *check_exponent && *fit_from + 1 > *d_max {
        return Err(CliError::Usage(format!(
            "--check-exponent fits over d in [{fit_from}, d_max] and needs --d-max >= {}",
            fit_from + 1
        )));
    }
    let d = *d_max as i64;
    let sym = toeplitz_symbol(st.as_ref(), -d, d - 2)?;
    let mut fit = Vec::new();
    for sep in 1..=*d_max {
        let c = spin_spin_correlation(st.as_ref(), &[0, sep as i64])?;
        let tz = toeplitz_correlation(&sym, sep)?;
        table.push(vec![
            json!(sep),
            json!(format!("0 {sep}")),
            num(c.value),
            num(c.imag_residue),
            num(tz),
            num((c.value - tz).abs()),
        ]);
        if sep >= *fit_from {
            fit.push((sep as f64, c.value.abs()));
        }
    }
    let mut extra = json!({ "toeplitz_symbol": sym.entries });
    if *check_exponent {
        let slope = log_log_slope(&fit);
        table.push(vec![json!("slope"), json!(format!("fit {fit_from}..{d_max}")), num(slope), Value::Null, Value::Null, Value::Null]);
        extra["fit"] = json!({ "from": fit_from, "to": d_max, "slope": slope });
    }
    table.extra = Some(extra);
    Ok(table)
}

fn oracle(cfg: &RunConfig) -> Result<Table, CliError> {
    let CommandConfig::Oracle {
        kind,
        half_width,
        half_height,
        k1,
        k2,
        trotter_steps,
    } = &cfg.command
    else {
        unreachable!()
    };
    let mut t = Table::new(&["quantity", "parameter", "value"]);
    match kind {
        OracleKind::Partition => {
            let spec = LatticeSpec::new(*half_width, *half_height, *k1, *k2)?;
            let brute = partition_function_brute(&spec)?;
            let transfer = partition_function_transfer(&spec)?;
            t.push(vec![json!("partition_function_brute"), json!(spec.spins()), num(brute)]);
            t.push(vec![json!("partition_function_transfer"), json!(spec.spins()), num(transfer)]);
            t.push(vec![json!("relative_difference"), json!(spec.spins()), num((brute - transfer).abs() / brute)]);
        }
        OracleKind::Trotter => {
            let beta = cfg.couplings.beta.unwrap_or(1.0);
            for &n in trotter_steps {
                let e = trotter_error(*half_width, beta, cfg.couplings.t1, cfg.couplings.t3, n)?;
                t.push(vec![json!("trotter_error"), json!(n), num(e)]);
            }
        }
        OracleKind::Channel => {
            let f = checked_filter(cfg, FilterChoice::Daubechies { p: 1 })?;
            let u = disentangler_unitary(&f, *half_width)?;
            let id = DenseOperator::identity(u.nrows(), u.ncols());
            t.push(vec![json!("unitarity_residual"), json!(2 * half_width), num(max_abs_diff(&(u.adjoint() * &u), &id))]);
            let flow = finite_flow(2 * half_width, cfg.couplings.t1, cfg.couplings.t3, cfg.couplings.inverse_temperature(), &f, 1)?;
            for step in &flow {
                t.push(vec![json!("trace"), json!(step.sites), num(step.trace)]);
                t.push(vec![json!("min_eigenvalue"), json!(step.sites), num(step.min_eigenvalue)]);
            }
            t.extra = Some(json!({ "steps": flow }));
        }
        OracleKind::Fixtures => {
            let records = oracle_fixtures()?;
            for r in &records {
                t.push(vec![json!(r.quantity), json!(serde_json::to_string(&r.spec).unwrap()), num(r.value)]);
            }
            t.extra = Some(json!({ "records": records }));
        }
    }
    Ok(t)
}

