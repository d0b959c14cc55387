//! Writes a generated test matrix in Matrix Market format, for feeding the
//! benchmark CLI without downloading collection files.
//!
//! Usage: make_test_matrix <kind> <n> <density> <seed> <out.mtx>
//! where kind is one of: m-matrix, h-matrix, spd, positive-definite,
//! laplacian (n is rounded to a square grid).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use precond_core::matgen::{
    grid_laplacian, random_h_matrix, random_m_matrix, random_positive_definite, random_spd_matrix,
};
use precond_core::write_matrix_market;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 6 {
        eprintln!("usage: {} <kind> <n> <density> <seed> <out.mtx>", args[0]);
        std::process::exit(1);
    }
    let kind = args[1].as_str();
    let n: usize = args[2].parse().expect("n must be an integer");
    let density: f64 = args[3].parse().expect("density must be a real");
    let seed: u64 = args[4].parse().expect("seed must be an integer");
    let out = &args[5];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = match kind {
        "m-matrix" => random_m_matrix(n, density, 0.2, &mut rng),
        "h-matrix" => random_h_matrix(n, density, 0.2, &mut rng),
        "spd" => random_spd_matrix(n, density, 0.2, &mut rng),
        "positive-definite" => random_positive_definite(n, density, 0.2, &mut rng),
        "laplacian" => {
            let side = (n as f64).sqrt().round().max(2.0) as usize;
            grid_laplacian(side, side)
        }
        other => {
            eprintln!("unknown kind '{other}'");
            std::process::exit(1);
        }
    };
    write_matrix_market(&a, out).expect("write failed");
    println!("wrote {out} (n = {}, nnz = {})", a.n(), a.nnz());
}
