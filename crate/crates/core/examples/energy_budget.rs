//! Energy ledgers for both solvers at two time steps.

use strata::boussinesq::{run_boussinesq, BoussinesqConfig};
use strata::diagnostics::energy_balance;
use strata::harness::{generate_initial_data, Spectrum};
use strata::pe::{run_pe, PeConfig};
use strata::spectral::Grid;

fn main() -> strata::Result<()> {
    let grid = Grid::cubic(16)?;
    let spectrum = Spectrum {
        cutoff: 4,
        ..Spectrum::default()
    };
    let (v0, rho0) = generate_initial_data(11, &spectrum, &grid)?;
    let t_end = 0.1;

    for dt in [2e-3, 1e-3, 5e-4] {
        let b = run_boussinesq(&BoussinesqConfig::new(0.1, dt, t_end), &v0, &rho0)?;
        let p = run_pe(&PeConfig::new(dt, t_end), &v0, &rho0)?;
        let lb = energy_balance(&b.records)?;
        let lp = energy_balance(&p.records)?;
        println!(
            "dt {dt:.0e}: boussinesq E {:.5} -> {:.5}, residual {:.3e}; pe residual {:.3e}",
            lb.energy[0],
            lb.energy.last().unwrap(),
            lb.relative_residual(),
            lp.relative_residual()
        );
    }
    let p = run_pe(&PeConfig::new(1e-3, t_end), &v0, &rho0)?;
    energy_balance(&p.records)?.write_csv(std::io::stdout().lock())
}
