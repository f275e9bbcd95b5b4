use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use antibracket::algebra::{random_endo, Algebra, Parity, Signature};
use antibracket::antibrackets::{hierarchy_with, Method};
use antibracket::exec::{set_strategy, Strategy};
use antibracket::multiop::{nr_bracket, Multiplications};

fn strategies() -> Vec<(&'static str, Strategy)> {
    let mut out = vec![("sequential", Strategy::Sequential)];
    if cfg!(feature = "parallel") {
        out.push(("parallel", Strategy::Parallel));
    }
    out
}

fn hierarchies(c: &mut Criterion) {
    antibracket::exec::init_workers();
    let alg = Algebra::new(Signature::commutative(2, 2, 4)).unwrap();
    let mults = Multiplications::new(&alg);
    let f = random_endo(&alg, 1, Parity::Odd);
    let mut group = c.benchmark_group("hierarchy_n5_p2q2d4");
    group.sample_size(10);
    for method in [Method::Direct, Method::Akman, Method::Corollary] {
        for (name, strategy) in strategies() {
            group.bench_with_input(BenchmarkId::new(format!("{method:?}"), name), &strategy, |b, &s| {
                set_strategy(Some(s));
                b.iter(|| hierarchy_with(&f, 5, method, &mults).unwrap());
            });
        }
    }
    group.finish();
    set_strategy(None);
}

fn brackets(c: &mut Criterion) {
    let alg = Algebra::new(Signature::commutative(2, 2, 4)).unwrap();
    let mults = Multiplications::new(&alg);
    let f = random_endo(&alg, 2, Parity::Odd);
    let g = random_endo(&alg, 3, Parity::Even);
    let hf = hierarchy_with(&f, 3, Method::Akman, &mults).unwrap();
    let hg = hierarchy_with(&g, 3, Method::Akman, &mults).unwrap();
    let mut group = c.benchmark_group("nr_bracket_phi2_phi3");
    group.sample_size(10);
    for (name, strategy) in strategies() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &strategy, |b, &s| {
            set_strategy(Some(s));
            b.iter(|| nr_bracket(hf.get(2), hg.get(3)).unwrap());
        });
    }
    group.finish();
    set_strategy(None);
}

criterion_group!(benches, hierarchies, brackets);
criterion_main!(benches);
