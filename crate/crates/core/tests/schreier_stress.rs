mod common;

use irsym::families::hypercube;
use irsym::oracle::{brute_force_automorphisms, OracleMode};
use irsym::perm::Permutation;
use irsym::schreier::SchreierStructure;
use num_bigint::BigUint;
use rand::Rng;

/// Cube symmetries generating the whole group: a coordinate swap, a
/// coordinate cycle and a bit flip.
fn cube_generators() -> Vec<Permutation> {
    let on_bits =
        |f: &dyn Fn(u32) -> u32| Permutation::from_images((0..8).map(f).collect()).unwrap();
    let bit = |v: u32, i: u32| (v >> i) & 1;
    vec![
        on_bits(&|v| bit(v, 1) | bit(v, 0) << 1 | bit(v, 2) << 2),
        on_bits(&|v| bit(v, 2) | bit(v, 0) << 1 | bit(v, 1) << 2),
        on_bits(&|v| v ^ 1),
    ]
}

fn random_product(gens: &[Permutation], rng: &mut impl Rng) -> Permutation {
    let mut p = Permutation::identity(8);
    for _ in 0..rng.gen_range(1..=12) {
        p = p.then(&gens[rng.gen_range(0..gens.len())]);
    }
    p
}

/// One trial: 8 threads share 10,000 sifts. Returns the final order.
fn trial(seed: u64, base: &[u32]) -> BigUint {
    let gens = cube_generators();
    let s = SchreierStructure::new(8, base).unwrap();
    std::thread::scope(|scope| {
        for t in 0..8u64 {
            let (s, gens) = (&s, &gens);
            scope.spawn(move || {
                let mut rng = common::rng(seed * 8 + t);
                for i in 0..1250 {
                    s.sift(&random_product(gens, &mut rng));
                    if i % 250 == 0 {
                        s.check_invariants().unwrap();
                    }
                }
            });
        }
    });
    s.check_invariants().unwrap();
    assert!(s
        .generators()
        .iter()
        .all(|g| hypercube(3).is_automorphism(g)));
    s.group_order()
}

#[test]
fn cube_generators_are_cube_symmetries() {
    let q3 = hypercube(3);
    assert!(cube_generators().iter().all(|g| q3.is_automorphism(g)));
}

#[test]
fn concurrent_sifting_recovers_the_cube_group() {
    let expected = BigUint::from(
        brute_force_automorphisms(&hypercube(3), OracleMode::Pruned)
            .unwrap()
            .order(),
    );
    let bases: [&[u32]; 2] = [&[0, 1, 2], &[7, 3, 5, 6]];
    let mut full = 0;
    for seed in 0..100 {
        if trial(seed, bases[seed as usize % 2]) == expected {
            full += 1;
        }
    }
    assert!(full >= 95, "order {expected} in {full}/100 trials");
}
