use criterion::{black_box, criterion_group, criterion_main, Criterion};
use findim_core::module::{presentation, random_mat, ModuleHandle};
use findim_core::resolution::{minimal_resolution, projective_dimension, DEFAULT_CAP};
use findim_core::ring::{make_utn, RingHandle};
use findim_core::scalar::{Domain, Field};
use findim_core::snf::smith_normal_form;
use findim_core::{derived, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_snf(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = random_mat(Domain::Int, 12, 12, &mut rng, 20);
    c.bench_function("snf 12x12 integer", |b| {
        b.iter(|| smith_normal_form(black_box(&m)).unwrap())
    });
}

fn bench_resolution(c: &mut Criterion) {
    let ut3 = RingHandle::Triangular(make_utn(Field::Rational, 3).unwrap());
    let simple = derived::simple_modules(&ut3).unwrap().remove(0);
    let ModuleHandle::FdRep(rep) = simple else { unreachable!() };
    c.bench_function("minimal resolution of a UT3 simple", |b| {
        b.iter(|| minimal_resolution(black_box(&rep), DEFAULT_CAP).unwrap())
    });

    let z = RingHandle::Integers;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rels = random_mat(Domain::Int, 6, 6, &mut rng, 30);
    let m = presentation(&z, 6, rels).unwrap();
    c.bench_function("integer presentation pd", |b| {
        b.iter(|| projective_dimension(black_box(&m), DEFAULT_CAP).unwrap())
    });
}

fn bench_tor(c: &mut Criterion) {
    let z = RingHandle::Integers;
    let a = presentation(&z, 1, Mat::from_i64(Domain::Int, &[&[360]])).unwrap();
    let b2 = presentation(&z, 1, Mat::from_i64(Domain::Int, &[&[756]])).unwrap();
    c.bench_function("tor_1 of large cyclic integer modules", |bch| {
        bch.iter(|| derived::tor(1, black_box(&a), black_box(&b2)).unwrap())
    });

    let kk = ModuleHandle::Koszul(findim_core::module::KoszulModule {
        field: Field::Rational,
        vars: 3,
        subset: vec![0, 1, 2],
        shift: 0,
    });
    c.bench_function("tor_2 of the residue field over three variables", |bch| {
        bch.iter(|| derived::tor(2, black_box(&kk), black_box(&kk)).unwrap())
    });
}

criterion_group!(benches, bench_snf, bench_resolution, bench_tor);
criterion_main!(benches);
