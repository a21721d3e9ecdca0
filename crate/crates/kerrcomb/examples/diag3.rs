use kerrcomb::*;
use std::io::Write;
use std::time::Instant;
fn main() {
    let w = base_wave(0.5, 64).unwrap();
    let (_, jlh) = assemble_full_linearization(&w.grid.clone(), &w).unwrap();
    print!("JLh 128x128 h=0 schur: "); std::io::stdout().flush().unwrap();
    let t0 = Instant::now();
    match nalgebra::linalg::Schur::try_new(jlh.entries.clone(), 1e-14, 200_000) {
        Some(_) => println!("ok in {:?}", t0.elapsed()),
        None => println!("FAILED after {:?}", t0.elapsed()),
    }
    // stable branch h=1e-3 (alpha != 0)
    let grid = base_wave(0.5, 64).unwrap().grid;
    let profiles = continue_branch(&grid, 0.5, 0.7, -1, &[1e-3]).unwrap();
    let (_, jlh2) = assemble_full_linearization(&grid, &profiles[0]).unwrap();
    print!("JLh 128x128 h=1e-3 schur: "); std::io::stdout().flush().unwrap();
    let t0 = Instant::now();
    match nalgebra::linalg::Schur::try_new(jlh2.entries.clone(), 1e-14, 200_000) {
        Some(_) => println!("ok in {:?}", t0.elapsed()),
        None => println!("FAILED after {:?}", t0.elapsed()),
    }
}
