use nalgebra::DMatrix;
use std::io::Write;
fn main() {
    let companion = DMatrix::from_row_slice(
        4, 4,
        &[0.0, 0.0, 0.0, -0.3, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0],
    );
    for eps in [1e-12, 1e-10, 1e-8] {
        print!("eps={eps:.1e}: "); std::io::stdout().flush().unwrap();
        match nalgebra::linalg::Schur::try_new(companion.clone(), eps, 5_000) {
            Some(s) => {
                let ev = s.complex_eigenvalues();
                println!("ok {:?}", ev.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>());
            }
            None => println!("FAILED"),
        }
    }
}
