mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlattice::dsl::parse;
use qlattice::execute::{execute_step, suggested_order, ExecOptions, ExecutionState, Status};
use qlattice::instantiate::{build_lattice, LatticeOptions};
use qlattice::testkit::random_graph;

#[test]
fn pruned_instances_are_really_empty() {
    let mut pruned = 0;
    let mut lattices = 0;
    let mut seed = 0;
    while lattices < 60 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let directed = rng.gen();
        let src = common::random_source(&mut rng, directed);
        let qr = parse(&src).unwrap_or_else(|d| panic!("{src}\n{d:?}")).query;
        let opts = LatticeOptions {
            directed: Some(directed),
            ..Default::default()
        };
        let Ok(l) = build_lattice(&qr, &opts) else {
            continue;
        };
        lattices += 1;
        let g = random_graph(&mut rng, 7, 0.35, directed, 0.1);
        let mut state = ExecutionState::new(&l);
        for step in suggested_order(&l) {
            execute_step(&l, &g, &mut state, &step, &ExecOptions { limit: 1, time_budget: None }).unwrap();
        }
        for inst in &l.instances {
            let found = common::exists(&inst.pattern.concretize(), &g);
            match state.status(&inst.id).unwrap() {
                Status::PrunedEmpty { cause } => {
                    pruned += 1;
                    assert!(!found, "seed {seed}: {} pruned but has a match\n{src}", inst.id);
                    assert_eq!(state.status(cause), Some(&Status::Empty));
                    assert!(common::witness_reaches(&l, cause, &inst.id), "seed {seed}: {} unreachable", inst.id);
                }
                Status::Empty => assert!(!found, "seed {seed}: {}", inst.id),
                Status::Found { .. } => assert!(found, "seed {seed}: {}", inst.id),
                other => panic!("seed {seed}: {} left {other:?}", inst.id),
            }
        }
    }
    assert!(pruned >= 20, "only {pruned} pruned instances over {lattices} lattices");
}
