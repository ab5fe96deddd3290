use std::fmt::Write as _;

use anyhow::Result;
use rssgeo::noise::{noise_moments, NoiseParams};

use super::prepare_out;
use crate::args::MomentsArgs;
use crate::export::write_text;

pub fn moments(args: &MomentsArgs) -> Result<()> {
    let mut csv = String::from("sigma_db,mu0,sigma0_sq,second_moment,epsilon_factor\n");
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>12}",
        "sigma_db", "mu0", "sigma0_sq", "mu0²+σ0²", "C·sqrt"
    );
    for &s in &args.sigmas {
        NoiseParams::new(s)?;
        let m = noise_moments(s);
        let second = m.second_moment();
        let factor = args.termination_c * second.sqrt();
        writeln!(csv, "{s},{},{},{second},{factor}", m.mu0, m.sigma0_sq)?;
        println!(
            "{s:>8} {:>12.6} {:>12.6} {second:>12.6} {factor:>12.6}",
            m.mu0, m.sigma0_sq
        );
    }
    if let Some(dir) = &args.out {
        prepare_out(dir)?;
        write_text(&dir.join("moments.csv"), &csv)?;
    }
    Ok(())
}
