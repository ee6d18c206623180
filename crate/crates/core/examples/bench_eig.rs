use dirac_spectra::c64;
use dirac_spectra::linalg::eig::dense_eigenvalues;
use dirac_spectra::linalg::mat2::Mat2C;
use dirac_spectra::operator::{build_truncated_dirac, Potential};
use dirac_spectra::spectral_map::MassParam;
use std::time::Instant;

fn main() {
    let m = MassParam::new(1.0).unwrap();
    let mut state = 99u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(7);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let sites: Vec<(i64, Mat2C)> = (0..4)
        .map(|s| {
            (
                s - 2,
                Mat2C::new(
                    c64(next(), next()),
                    c64(next(), next()),
                    c64(next(), next()),
                    c64(next(), next()),
                ),
            )
        })
        .collect();
    let v = Potential::from_sites(&sites).scale(3.0);
    for n_sites in [100usize, 200, 300] {
        let a = build_truncated_dirac(m, &v, n_sites).unwrap();
        let t0 = Instant::now();
        let eigs = dense_eigenvalues(&a).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        let tr: dirac_spectra::Complex64 = (0..a.nrows()).map(|i| a[(i, i)]).sum();
        let sum: dirac_spectra::Complex64 = eigs.iter().sum();
        println!(
            "N={n_sites} dim={} time={dt:.2}s trace_err={:.2e}",
            a.nrows(),
            (tr - sum).norm()
        );
    }
}
