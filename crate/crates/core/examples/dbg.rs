use std::time::Instant;
use nopair_core::nopair::{solve_projected, Model};
use nopair_core::perturbation::breit_corrections;
use nopair_core::precision::{real_str, to_full_string};
use nopair_core::system::{optimize_exponents, SystemPreset, TwoBodySystem};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let nb: usize = args[1].parse().unwrap();
    let preset = SystemPreset::from_name(&args[2]).unwrap();
    let sys = TwoBodySystem::preset(preset);
    let t0 = Instant::now();
    let opt = optimize_exponents(&sys, nb, &real_str("1e-12").unwrap()).unwrap();
    eprintln!("optimize: {:?} cycles={} evals={}", t0.elapsed(), opt.cycles, opt.evaluations);
    println!("E_nr  = {}", to_full_string(&opt.energy));
    let t0 = Instant::now();
    let dc = solve_projected(&sys, &opt.basis, Model::Dc).unwrap();
    let corr = breit_corrections(&dc, 0).unwrap();
    let dcb = solve_projected(&sys, &opt.basis, Model::Dcb).unwrap();
    eprintln!("solves: {:?}", t0.elapsed());
    println!("E_DC  = {}", to_full_string(dc.ground_energy()));
    println!("E_PT1 = {}", to_full_string(&corr.e_pt1));
    println!("E_PT2 = {}", to_full_string(&corr.e_pt2));
    println!("E_DCB = {}", to_full_string(dcb.ground_energy()));
}
