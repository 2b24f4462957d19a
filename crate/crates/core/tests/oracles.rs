//! Values computed independently at 40 significant digits and frozen here.

use approx::assert_relative_eq;
use hlweak_core::counterexample::{build_g, k_of_n, CounterexampleParams};
use hlweak_core::weaklimit::{
    criterion_ratio, delta_k, doubling_diagnostic, level_set_delta, shift_ratio, sweep_delta,
};
use hlweak_core::{preset, DistributionMeasure, GridSpec};

fn mu(name: &str) -> DistributionMeasure {
    preset(name, None).unwrap()
}

#[test]
fn distribution_values() {
    assert_relative_eq!(mu("expweight").h(1.0), 1.718281828459045235, max_relative = 1e-15);
    assert_relative_eq!(mu("expweight").h(2.0), 6.389056098930650227, max_relative = 1e-15);
    assert_relative_eq!(mu("logweight").h(6.0), 1.945910149055313305, max_relative = 1e-15);
    assert_eq!(mu("periodic").h(2.25), 2.5);
    assert_eq!(mu("flatgap").h(1.5), 1.0);
}

#[test]
fn delta_level_sets() {
    let cases = [
        ("expweight", 0.0, 1e-2, 9.049875621120890270),
        ("logweight", 0.0, 1e-1, 9.306898218339271555),
        ("periodic", 0.0, 1e-2, 50.0),
        ("lebesgue", 0.0, 1e-2, 50.0),
    ];
    for (name, y, lam, want) in cases {
        let got = level_set_delta(&mu(name), y, lam).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-13);
    }
}

#[test]
fn logweight_level_sets_overflowing_positions() {
    // x_R is near e^{1000}; only the log-domain path can reach it.
    let lam = 1e-3;
    let want = [(0.0, 0.99930685281944005469), (1.0, 1.0), (5.0, 1.0010986122886681097)];
    for (y, w) in want {
        let got = lam * level_set_delta(&mu("logweight"), y, lam).unwrap();
        assert_relative_eq!(got, w, max_relative = 1e-12);
    }
}

#[test]
fn sweep_rows() {
    let g = GridSpec::geometric(1e-6, 0.5, 1).unwrap();
    let r = sweep_delta(&mu("expweight"), 0.0, &g).unwrap();
    assert_relative_eq!(r.rows[0].lambda_mass.lo, 0.00099900049999987500006, max_relative = 1e-9);
    let g = GridSpec::geometric(1e-4, 0.5, 1).unwrap();
    let r = sweep_delta(&mu("logweight"), 0.0, &g).unwrap();
    assert_relative_eq!(r.rows[0].lambda_mass.lo, 0.99993068528194400547, max_relative = 1e-12);
}

#[test]
fn criterion_and_shift_ratios() {
    let c = |name: &str, y: f64, r: f64| criterion_ratio(&mu(name), y, r).unwrap();
    assert_relative_eq!(c("logweight", 1.0, 1e6), 0.95222534068606747465, max_relative = 1e-13);
    assert_relative_eq!(c("logweight", 0.0, 1e9), 0.96763476780742109326, max_relative = 1e-13);
    assert_relative_eq!(c("logweight", 1.0, 1e9), 0.96763476783001205578, max_relative = 1e-13);
    assert_relative_eq!(c("expweight", 0.0, 10.0), 4.5397868702434394505e-5, max_relative = 1e-13);
    assert_relative_eq!(c("expweight", 0.0, 30.0), 9.3576229688392989538e-14, max_relative = 1e-13);
    assert_relative_eq!(c("flatgap", 0.0, 10.0), 9.0 / 19.0, max_relative = 1e-15);
    let r30 = 2f64.powi(30);
    assert_relative_eq!(c("periodic", 0.0, r30), 0.5, max_relative = 1e-15);
    assert_relative_eq!(c("periodic", 1.0, r30), 0.50000000023283064376, max_relative = 1e-13);
    assert_relative_eq!(c("periodic", 5.0, r30), 0.50000000116415322098, max_relative = 1e-13);
    assert_relative_eq!(c("periodic", 5.0, r30 + 0.25), 0.50000000116415322044, max_relative = 1e-13);

    let s = |name: &str, y: f64, r: f64| shift_ratio(&mu(name), y, r).unwrap();
    assert_relative_eq!(s("logweight", 2.0, 1e4), 0.99997828551158273010, max_relative = 1e-13);
    assert_relative_eq!(s("expweight", 1.0, 20.0), 0.36787943986854473926, max_relative = 1e-13);
}

#[test]
fn delta_k_closed_forms() {
    let e = mu("expweight");
    let want = [(1e-3, 0.030638584039112749143), (1e-4, 0.0099004999875006249609), (1e-5, 0.0031522934715171519008)];
    let mut prev = f64::INFINITY;
    for (lam, w) in want {
        let d = delta_k(&e, 1.0, lam, 1e9).unwrap();
        assert!(d.certified);
        assert_relative_eq!(d.lo, w, max_relative = 1e-12);
        assert!(d.lo < prev);
        prev = d.lo;
    }
    let l = mu("logweight");
    for (lam, w) in [(1e-1, 0.89014785070693575531), (1e-2, 0.98901387711331890309)] {
        let d = delta_k(&l, 2.0, lam, f64::INFINITY).unwrap();
        assert_relative_eq!(d.lo, w, max_relative = 1e-12);
    }
}

#[test]
fn lebesgue_delta_k_is_constant_in_lambda() {
    let leb = mu("lebesgue");
    for k in [0.25, 0.5, 0.9, 1.0, 1.5, 3.0] {
        let want = if k <= 1.0 { 1.0 / (2.0 * k) } else { 1.0 / (1.0 + k) };
        for lam in [1e-2, 1e-3, 1e-4] {
            let d = delta_k(&leb, k, lam, 1e9).unwrap();
            assert!(d.certified, "k={k} λ={lam}: {d:?}");
            assert!(d.lo <= want + 1e-9 && d.hi >= want - 1e-9, "k={k} λ={lam}: {d:?}");
        }
    }
}

#[test]
fn logweight_doubling_brute_force_maximum() {
    let xs: Vec<f64> = (0..20).map(|i| 2f64.powi(i)).collect();
    let rs: Vec<f64> = (0..30).map(|j| 0.01 * 2f64.powi(j)).collect();
    let d = doubling_diagnostic(&mu("logweight"), &xs, &rs);
    assert_relative_eq!(d.c_est, 9.2287625169618397264, max_relative = 1e-12);
    assert_eq!(d.violations, 0);
}

#[test]
fn harmonic_block_lengths() {
    let got: Vec<u64> = (2..12).map(|n| k_of_n(n).unwrap()).collect();
    assert_eq!(got, [2, 4, 6, 7, 9, 11, 12, 14, 16, 18]);
}

#[test]
fn first_blocks_of_default_construction() {
    let g = build_g(CounterexampleParams { x0: 2.0, n1: 2, blocks: 3 }).unwrap();
    let b = &g.block_meta;
    assert_eq!((b[0].n, b[0].k, b[0].x), (2, 2, 2.0));
    assert_eq!((b[1].n, b[1].k, b[1].x), (4, 6, 12.0));
    assert_relative_eq!(b[1].v, 29.0 / 12.0, max_relative = 1e-15);
    assert_eq!((b[2].n, b[2].x), (10, 832.0));
}
