#![cfg(feature = "parallel")]

use birkhoff::nth::{solve_fss, AnchorMode, SolveOptions};
use birkhoff::par::Execution;
use birkhoff::problems;
use birkhoff::spectra::{roots_of_unity, sector_ordering};
use birkhoff::system::{solve_system_all, SystemOptions};
use birkhoff::verify::{dyadic, expansion_errors};

#[test]
fn nth_solve_is_identical_in_both_modes() {
    let spec = problems::smooth_n3();
    let frame = sector_ordering(&roots_of_unity(3).unwrap(), 1).unwrap();
    let opts = SolveOptions {
        anchors: AnchorMode::Anchored,
        cells: 64,
        ..SolveOptions::default()
    };
    let rho = frame.rho(24.0);
    let a = solve_fss(&spec, &frame, rho, &opts, Execution::Sequential).unwrap();
    let b = solve_fss(&spec, &frame, rho, &opts, Execution::Parallel).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.z, y.z);
        assert_eq!(x.iterations, y.iterations);
    }
}

#[test]
fn system_solve_is_identical_in_both_modes() {
    let spec = problems::diag_system_2x2(1);
    let frame = sector_ordering(&spec.root_system().unwrap().roots, 0).unwrap();
    let opts = SystemOptions {
        cells: 64,
        ..SystemOptions::default()
    };
    let rho = frame.rho(20.0);
    let a = solve_system_all(&spec, &frame, rho, &opts, Execution::Sequential).unwrap();
    let b = solve_system_all(&spec, &frame, rho, &opts, Execution::Parallel).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.w, y.w);
    }
}

#[test]
fn sweep_is_identical_in_both_modes() {
    let spec = problems::constant_potential_n2();
    let frame = sector_ordering(&roots_of_unity(2).unwrap(), 0).unwrap();
    let moduli = dyadic(8.0, 2.0, 4).unwrap();
    let run =
        |exec| expansion_errors(&spec, &frame, &moduli, 1, AnchorMode::Plain, 64, exec).unwrap();
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}
