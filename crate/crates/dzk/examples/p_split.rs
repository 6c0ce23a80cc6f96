//! Splitting a coloring sum into small Sumcheck instances.

use dzk::coloring::pick_field;
use dzk::netsim::Network;
use dzk::roundopt::{p_split, BandColoring, CorruptSplit, HonestSplit, SubSolver};

fn main() {
    let net = Network::cycle(5);
    let m = pick_field(net.n(), 1);
    let f = BandColoring::new(&net, 2, m).unwrap();
    let (ell, t) = (3, 2);

    for solver in [SubSolver::Plain, SubSolver::FoldDcs, SubSolver::Zk] {
        let mut prover = HonestSplit { f: &f, ell };
        let out = p_split(&f, 0, ell, t, 8, &mut prover, solver, usize::MAX).unwrap();
        println!("{solver:?}: accept {} claims {:?} largest h {} monomials", out.accept, out.claims, out.max_monomials);
    }

    let mut cheat = CorruptSplit { inner: HonestSplit { f: &f, ell }, which: 2 };
    let out = p_split(&f, 0, ell, t, 8, &mut cheat, SubSolver::Plain, usize::MAX).unwrap();
    println!("corrupted h2: accept {} sub-instance verdicts {:?}", out.accept, out.sub_accept);
}
