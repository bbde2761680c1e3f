//! The four subcommands: exponent optimization, a convergence-table row,
//! the alpha scan + fit, and the comparison against the analytic reference
//! coefficients.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use nopair_core::alphafit::{fit, fit_extended, run_scan, AlphaScan, FitResult, ScanModel};
use nopair_core::hamiltonian::{assemble_bare, assemble_breit, assemble_coulomb, assemble_metric};
use nopair_core::nopair::{solve_projected, Model};
use nopair_core::nrqed;
use nopair_core::perturbation::breit_corrections;
use nopair_core::precision::{real, real_str, to_full_string};
use nopair_core::system::{
    load_exponents, optimize_exponents, save_exponents, solve_nonrelativistic, BasisSet,
};
use nopair_core::Real;

use crate::config::RunConfig;
use crate::tables::grouped;

const OPTIMIZE_TARGET: &str = "1e-12";

fn echo_config(cfg: &RunConfig) {
    eprintln!("# resolved configuration");
    for line in cfg.echo().lines() {
        eprintln!("# {line}");
    }
}

fn basis_for(cfg: &RunConfig) -> Result<BasisSet> {
    let sys = cfg.to_system()?;
    if let Some(path) = &cfg.exponents {
        let basis = load_exponents(path)
            .with_context(|| format!("loading exponents from {}", path.display()))?;
        if basis.len() != cfg.nb {
            anyhow::bail!(
                "exponent file holds {} exponents but nb = {}",
                basis.len(),
                cfg.nb
            );
        }
        return Ok(basis);
    }
    let target = real_str(OPTIMIZE_TARGET)?;
    let opt = optimize_exponents(&sys, cfg.nb, &target)?;
    if opt.stalled {
        eprintln!("warning: exponent optimization stalled before reaching the target");
    }
    Ok(opt.basis)
}

/// `optimize`: minimize the nonrelativistic energy and write the exponent
/// file.
pub fn cmd_optimize(cfg: &RunConfig) -> Result<()> {
    echo_config(cfg);
    let sys = cfg.to_system()?;
    let target = real_str(OPTIMIZE_TARGET)?;
    let opt = optimize_exponents(&sys, cfg.nb, &target)?;
    if opt.stalled {
        eprintln!("warning: exponent optimization stalled before reaching the target");
    }
    let path = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}_nb{}.exp", cfg.system, cfg.nb)));
    save_exponents(&opt.basis, &cfg.system, &path)?;
    let exact = -sys.mu() / real(2.0);
    let gap = opt.energy.clone() - &exact;
    println!("E_nr      = {}", to_full_string(&opt.energy));
    println!("-mu/2     = {}", to_full_string(&exact));
    println!("gap       = {:.3e}", gap.to_f64());
    println!("cycles    = {}", opt.cycles);
    println!("exponents -> {}", path.display());
    Ok(())
}

/// One convergence-table row.
pub struct SolveRow {
    pub e_nr: Real,
    pub e_dc: Real,
    pub e_pt1: Option<Real>,
    pub e_pt2: Option<Real>,
    pub e_dcb: Option<Real>,
}

pub fn solve_row(cfg: &RunConfig) -> Result<SolveRow> {
    let sys = cfg.to_system()?;
    let basis = basis_for(cfg)?;
    let (e_nr, _) = solve_nonrelativistic(&sys, &basis)?;
    let dc = solve_projected(&sys, &basis, Model::Dc)?;
    if cfg.dump_matrices {
        let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        assemble_metric(&sys, &basis)?.dump_triplets(&dir.join("metric.dat"))?;
        assemble_bare(&sys, &basis)?.dump_triplets(&dir.join("bare.dat"))?;
        assemble_coulomb(&sys, &basis)?.dump_triplets(&dir.join("coulomb.dat"))?;
        assemble_breit(&sys, &basis)?.dump_triplets(&dir.join("breit.dat"))?;
    }
    let want_breit = cfg.model == "dcb" && cfg.breit != "none";
    let (e_pt1, e_pt2) = if want_breit && matches!(cfg.breit.as_str(), "pt1" | "pt2" | "all") {
        let corr = breit_corrections(&dc, 0)?;
        let pt2 = if cfg.breit == "pt1" { None } else { Some(corr.e_pt2) };
        (Some(corr.e_pt1), pt2)
    } else {
        (None, None)
    };
    let e_dcb = if want_breit && matches!(cfg.breit.as_str(), "variational" | "all") {
        Some(solve_projected(&sys, &basis, Model::Dcb)?.ground_energy().clone())
    } else {
        None
    };
    Ok(SolveRow {
        e_nr,
        e_dc: dc.ground_energy().clone(),
        e_pt1,
        e_pt2,
        e_dcb,
    })
}

/// `solve`: print the row (grouped digits) and optionally write CSV/JSON.
pub fn cmd_solve(cfg: &RunConfig) -> Result<()> {
    echo_config(cfg);
    let row = solve_row(cfg)?;
    let decimals = if row.e_nr.clone().abs() > real(10.0) { 11 } else { 13 };
    println!("nb = {}", cfg.nb);
    println!("E_nr     = {}", grouped(&row.e_nr, decimals));
    println!("E_DC     = {}", grouped(&row.e_dc, decimals));
    if let Some(v) = &row.e_pt1 {
        println!("E_DC<B>  = {}", grouped(v, decimals));
    }
    if let Some(v) = &row.e_pt2 {
        println!("E_DCB2   = {}", grouped(v, decimals));
    }
    if let Some(v) = &row.e_dcb {
        println!("E_DCB    = {}", grouped(v, decimals));
    }
    if let Some(out) = &cfg.out {
        let csv_path = out.with_extension("csv");
        let mut csv = String::from("nb,e_nr,e_dc,e_dc_pt1,e_dc_pt2,e_dcb\n");
        let opt = |v: &Option<Real>| v.as_ref().map(|x| to_full_string(x)).unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            cfg.nb,
            to_full_string(&row.e_nr),
            to_full_string(&row.e_dc),
            opt(&row.e_pt1),
            opt(&row.e_pt2),
            opt(&row.e_dcb)
        )?;
        fs::write(&csv_path, csv)?;
        let json_path = out.with_extension("json");
        let json = serde_json::json!({
            "nb": cfg.nb,
            "e_nr": to_full_string(&row.e_nr),
            "e_dc": to_full_string(&row.e_dc),
            "e_dc_pt1": row.e_pt1.as_ref().map(to_full_string),
            "e_dc_pt2": row.e_pt2.as_ref().map(to_full_string),
            "e_dcb": row.e_dcb.as_ref().map(to_full_string),
        });
        fs::write(&json_path, serde_json::to_string_pretty(&json)?)?;
        println!("row -> {} / {}", csv_path.display(), json_path.display());
    }
    Ok(())
}

fn scan_model_for(cfg: &RunConfig) -> ScanModel {
    match (cfg.model.as_str(), cfg.breit.as_str()) {
        ("dc", _) | (_, "none") => ScanModel::Dc,
        (_, "pt1") => ScanModel::DcPt1,
        (_, "pt2") => ScanModel::DcPt2,
        _ => ScanModel::Dcb,
    }
}

pub fn write_scan_csv(scan: &AlphaScan, path: &PathBuf) -> Result<()> {
    let mut csv = String::from("alpha_inverse,alpha,model,energy_hartree\n");
    for p in &scan.points {
        writeln!(
            csv,
            "{},{},{},{}",
            to_full_string(&p.alpha_inv),
            to_full_string(&p.alpha_inv.clone().recip()),
            scan.model.label(),
            to_full_string(&p.energy)
        )?;
    }
    fs::write(path, csv)?;
    Ok(())
}

pub fn fit_json(fitres: &FitResult) -> serde_json::Value {
    serde_json::json!({
        "eps0": to_full_string(&fitres.eps0),
        "eps2": to_full_string(&fitres.eps2),
        "eps3": to_full_string(&fitres.eps3),
        "eps4log": fitres.eps4log.as_ref().map(to_full_string),
        "eps4": to_full_string(&fitres.eps4),
        "rms_residual": to_full_string(&fitres.rms_residual),
        "points_used": fitres.points_used,
    })
}

/// `scan-fit`: run the alpha scan, write the CSV, fit, write the JSON.
pub fn cmd_scan_fit(cfg: &RunConfig) -> Result<()> {
    echo_config(cfg);
    let sys = cfg.to_system()?;
    let basis = basis_for(cfg)?;
    let model = scan_model_for(cfg);
    let scan = run_scan(&sys, &basis, model, cfg.scan_from, cfg.scan_to, cfg.scan_step)?;
    let fitres = fit(&scan, !cfg.no_log_term)?;
    let stem = cfg.out.clone().unwrap_or_else(|| PathBuf::from("scan"));
    let csv_path = stem.with_extension("csv");
    write_scan_csv(&scan, &csv_path)?;
    let json_path = stem.with_extension("json");
    fs::write(
        &json_path,
        serde_json::to_string_pretty(&fit_json(&fitres))?,
    )?;
    println!("model        = {}", scan.model.label());
    println!("points       = {}", fitres.points_used);
    println!("eps0         = {}", grouped(&fitres.eps0, 12));
    println!("eps2         = {}", grouped(&fitres.eps2, 6));
    println!("eps3         = {}", grouped(&fitres.eps3, 4));
    if let Some(v) = &fitres.eps4log {
        println!("eps4'        = {}", grouped(v, 4));
    }
    println!("eps4         = {}", grouped(&fitres.eps4, 3));
    println!("rms residual = {:.3e}", fitres.rms_residual.to_f64());
    println!("scan -> {}", csv_path.display());
    println!("fit  -> {}", json_path.display());
    Ok(())
}

/// Relative importance ratios (ppm) of the interaction ladders.
pub struct RatioReport {
    pub dc_vs_nr: Real,
    pub pt1_vs_dc: Real,
    pub pt2_vs_pt1: Real,
    pub dcb_vs_pt2: Real,
}

pub fn ratio_report(cfg: &RunConfig) -> Result<RatioReport> {
    let sys = cfg.to_system()?;
    let basis = basis_for(cfg)?;
    let (e_nr, _) = solve_nonrelativistic(&sys, &basis)?;
    let dc = solve_projected(&sys, &basis, Model::Dc)?;
    let corr = breit_corrections(&dc, 0)?;
    let e_dcb = solve_projected(&sys, &basis, Model::Dcb)?.ground_energy().clone();
    let ppm = real(1e6);
    let e_dc = dc.ground_energy().clone();
    let ratio = |num: Real, den: &Real| -> Real { num / den.clone().abs() * &ppm };
    Ok(RatioReport {
        dc_vs_nr: ratio(e_dc.clone() - &e_nr, &e_nr),
        pt1_vs_dc: ratio(corr.e_pt1.clone() - &e_dc, &e_dc),
        pt2_vs_pt1: ratio(corr.e_pt2.clone() - &corr.e_pt1, &corr.e_pt1),
        dcb_vs_pt2: ratio(e_dcb - &corr.e_pt2, &corr.e_pt2),
    })
}

/// Fitted coefficients next to the analytic reference values, with the
/// `delta = reference - fitted` columns; cells without an analytic value
/// stay blank.
pub fn cmd_compare(cfg: &RunConfig) -> Result<()> {
    echo_config(cfg);
    let sys = cfg.to_system()?;
    let basis = basis_for(cfg)?;
    let report = nrqed::nrqed_report(&sys)?;

    // which scans to run, following the breit selector
    let mut models = vec![ScanModel::Dc];
    match cfg.breit.as_str() {
        "none" => {}
        "pt1" => models.push(ScanModel::DcPt1),
        "pt2" => models.push(ScanModel::DcPt2),
        "variational" => models.push(ScanModel::Dcb),
        _ => {
            models.push(ScanModel::DcPt1);
            models.push(ScanModel::Dcb);
        }
    }
    println!("fitted coefficients vs analytic reference (delta = ref - fit):");
    for model in models {
        let scan = run_scan(&sys, &basis, model, cfg.scan_from, cfg.scan_to, cfg.scan_step)?;
        let fitres = fit_extended(&scan, !cfg.no_log_term, false)?;
        let (ref2, ref3, ref4l) = match model {
            ScanModel::Dc => (
                Some(nrqed::e2_dc(&sys)),
                Some(report.e3_c0.clone()),
                report.a4log.clone(),
            ),
            ScanModel::DcPt1 => (
                Some(nrqed::e2_dcb(&sys)),
                report
                    .e3_b
                    .clone()
                    .map(|b| report.e3_c0.clone() + b),
                None,
            ),
            ScanModel::DcPt2 | ScanModel::Dcb => (Some(nrqed::e2_dcb(&sys)), None, None),
        };
        let cell = |v: &Option<Real>| -> String {
            v.as_ref().map(|x| grouped(x, 6)).unwrap_or_default()
        };
        let delta = |r: &Option<Real>, f: &Real| -> String {
            r.as_ref()
                .map(|x| format!("{:+.1e}", (x.clone() - f).to_f64()))
                .unwrap_or_default()
        };
        println!("  {}:", model.label());
        println!(
            "    eps2: fit {}  ref {}  delta {}",
            grouped(&fitres.eps2, 6),
            cell(&ref2),
            delta(&ref2, &fitres.eps2)
        );
        println!(
            "    eps3: fit {}  ref {}  delta {}",
            grouped(&fitres.eps3, 4),
            cell(&ref3),
            delta(&ref3, &fitres.eps3)
        );
        if let Some(e4l) = &fitres.eps4log {
            println!(
                "    eps4': fit {}  ref {}  delta {}",
                grouped(e4l, 4),
                cell(&ref4l),
                delta(&ref4l, e4l)
            );
        }
    }

    let ratios = ratio_report(cfg)?;
    println!("relative importance (ppm):");
    println!("  (E_DC - E_nr)/|E_nr|        = {}", grouped(&ratios.dc_vs_nr, 4));
    println!("  (E_DC<B> - E_DC)/|E_DC|     = {}", grouped(&ratios.pt1_vs_dc, 4));
    println!("  (E_DCB2 - E_DC<B>)/|E_DC<B>| = {}", grouped(&ratios.pt2_vs_pt1, 4));
    println!("  (E_DCB - E_DCB2)/|E_DCB2|   = {}", grouped(&ratios.dcb_vs_pt2, 4));
    Ok(())
}
