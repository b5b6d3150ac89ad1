use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tdhf_bench::{fermionic_state, one_body_density, system};
use tdhf_core::fock::{closure_defect, compressed_f_minus, reduced_density};
use tdhf_core::hierarchy::{error_term, remainder_r};
use tdhf_core::nbody::{ExactFlow, Representation};
use tdhf_core::tdhf::{tdhf_step, TdhfState};
use tdhf_core::tensor::{partial_trace, tensor_power, trace_norm};

fn tensor_kernels(c: &mut Criterion) {
    let f = one_body_density(4);
    c.bench_function("tensor_power d=4 n=4", |b| b.iter(|| tensor_power(black_box(&f), 4)));
    let big = tensor_power(&f, 4).unwrap();
    c.bench_function("partial_trace 256 -> 16", |b| b.iter(|| partial_trace(black_box(&big), 2)));
    let m = tensor_power(&f, 3).unwrap().into_matrix();
    c.bench_function("trace_norm 64x64", |b| b.iter(|| trace_norm(black_box(&m))));
}

fn fock_kernels(c: &mut Criterion) {
    let sys = system(8, 4);
    c.bench_function("fock hamiltonian d=8 N=4", |b| {
        b.iter(|| sys.hamiltonian(black_box(Representation::Antisym)))
    });
    let rho = fermionic_state(8, 4);
    c.bench_function("two-body marginal d=8 N=4", |b| b.iter(|| reduced_density(black_box(&rho), 2)));
    c.bench_function("closure defect n=2 d=8 N=4", |b| b.iter(|| closure_defect(black_box(&rho), 2)));
    let f = one_body_density(8);
    c.bench_function("compressed F_3 d=8", |b| b.iter(|| compressed_f_minus(black_box(f.matrix()), 3)));
}

fn dynamics_kernels(c: &mut Criterion) {
    let sys = system(8, 4);
    let rho = fermionic_state(8, 4).to_operator();
    c.bench_function("exact flow setup d=8 N=4", |b| b.iter(|| ExactFlow::new(&sys, black_box(&rho))));
    let flow = ExactFlow::new(&sys, &rho).unwrap();
    c.bench_function("exact state d=8 N=4", |b| b.iter(|| flow.state(black_box(0.5))));
    let state = TdhfState::new(&sys, one_body_density(8), 1e-3).unwrap();
    c.bench_function("tdhf step d=8", |b| b.iter(|| tdhf_step(&sys, black_box(&state), 1e-3)));
}

fn hierarchy_kernels(c: &mut Criterion) {
    let sys = system(4, 3);
    let f = one_body_density(4);
    c.bench_function("remainder n=3 d=4", |b| b.iter(|| remainder_r(&sys, black_box(&f), 3)));
    let sys = system(8, 4);
    let rho = fermionic_state(8, 4).to_operator();
    c.bench_function("error term n=1 d=8 N=4", |b| b.iter(|| error_term(&sys, black_box(&rho), 1)));
}

criterion_group!(benches, tensor_kernels, fock_kernels, dynamics_kernels, hierarchy_kernels);
criterion_main!(benches);
