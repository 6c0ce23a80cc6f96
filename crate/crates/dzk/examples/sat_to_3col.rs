//! Reducing a 3-CNF to 3-colorability.
//!
//! `cargo run --example sat_to_3col -- formula.cnf` reads DIMACS; without an
//! argument a small formula is used.

use dzk::coloring::{is_colorable, sat_to_3col, Cnf};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(p) => std::fs::read_to_string(p).expect("readable file"),
        None => "p cnf 3 3\n1 2 -3 0\n-1 2 0\n-2 3 0\n".to_string(),
    };
    let cnf = Cnf::parse_dimacs(&text).expect("valid DIMACS");
    let g = sat_to_3col(&cnf).unwrap();
    println!("{} variables, {} clauses -> {} nodes, {} edges, max degree {}", cnf.vars, cnf.clauses.len(), g.n(), g.edges().len(), g.max_degree());
    println!("satisfiable {}, 3-colorable {}", cnf.satisfiable(), is_colorable(&g, 3));
}
