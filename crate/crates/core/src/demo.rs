//! Shared reference system for unit tests: two Wiener branches in parallel
//! feed-forward closed around a Wiener feedback branch, with mild cubic
//! nonlinearities. The feedback block carries one sample of delay so the
//! loop stays free of algebraic cycles.

use crate::systems::{
    build_ff_fb_parallel, wiener, BlockGraph, RationalTF, StaticNl,
};

pub fn g1() -> RationalTF {
    RationalTF::new(vec![0.15, 0.1], vec![1.0, -0.9], 0).unwrap()
}

pub fn g2() -> RationalTF {
    RationalTF::new(vec![0.12, 0.11], vec![1.0, -0.77], 0).unwrap()
}

pub fn g3() -> RationalTF {
    RationalTF::new(vec![0.2, 0.15], vec![1.0, -0.72], 1).unwrap()
}

pub fn f1() -> StaticNl {
    StaticNl::polynomial(vec![0.0, 1.0, 0.0, -0.3]).unwrap()
}

pub fn f2() -> StaticNl {
    StaticNl::polynomial(vec![0.0, 1.0, 0.5, 0.5]).unwrap()
}

pub fn f3() -> StaticNl {
    StaticNl::polynomial(vec![0.0, 1.0, 0.2, 0.8]).unwrap()
}

pub fn demo_graph() -> BlockGraph {
    build_ff_fb_parallel(
        vec![wiener(g1(), f1()), wiener(g2(), f2())],
        vec![wiener(g3(), f3())],
    )
    .unwrap()
}

/// Same layout with every even polynomial coefficient zeroed: odd-symmetric,
/// so the response to r_dc = 0 is exactly 0.
pub fn demo_graph_odd() -> BlockGraph {
    let odd1 = StaticNl::polynomial(vec![0.0, 1.0, 0.0, -0.3]).unwrap();
    let odd2 = StaticNl::polynomial(vec![0.0, 1.0, 0.0, 0.5]).unwrap();
    let odd3 = StaticNl::polynomial(vec![0.0, 1.0, 0.0, 0.8]).unwrap();
    build_ff_fb_parallel(
        vec![wiener(g1(), odd1), wiener(g2(), odd2)],
        vec![wiener(g3(), odd3)],
    )
    .unwrap()
}

/// Demo layout with the feedback delay removed: every loop is algebraic.
pub fn demo_graph_no_delay() -> BlockGraph {
    let g3_no_delay = RationalTF::new(vec![0.2, 0.15], vec![1.0, -0.72], 0).unwrap();
    build_ff_fb_parallel(
        vec![wiener(g1(), f1()), wiener(g2(), f2())],
        vec![wiener(g3_no_delay, f3())],
    )
    .unwrap()
}
