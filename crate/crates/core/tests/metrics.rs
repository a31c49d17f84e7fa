mod common;

use common::*;
use onebit::metrics::evaluate;
use onebit::model::{SensingEnsemble, SparseSignal};
use rand::Rng;

fn unit(v: Vec<f64>) -> Vec<f64> {
    SparseSignal::normalized(v).unwrap().into_values()
}

#[test]
fn metric_invariants() {
    let mut rng = rng(51);
    let a = SensingEnsemble::generate(80, 30, 1).unwrap();
    for _ in 0..200 {
        let x = unit(random_sparse(&mut rng, 30));
        let e = unit(random_sparse(&mut rng, 30));
        let m = evaluate(&x, &e, &a).unwrap();

        let sym_diff = (0..30).filter(|&i| (x[i] != 0.0) != (e[i] != 0.0)).count();
        assert_eq!(m.per, sym_diff as f64 / 30.0);

        let sq: f64 = x.iter().zip(&e).map(|(p, q)| (p - q).powi(2)).sum();
        assert!((m.mse * 30.0 - sq).abs() <= 1e-15);

        let back = evaluate(&e, &x, &a).unwrap();
        assert!((m.ae - back.ae).abs() <= 1e-15);
        let dot: f64 = x.iter().zip(&e).map(|(p, q)| p * q).sum();
        assert!((m.ae - dot.clamp(-1.0, 1.0).acos() / std::f64::consts::PI).abs() <= 1e-7);

        // Hamming error only sees signs of A·e.
        let c = rng.random_range(0.1..10.0);
        let scaled: Vec<f64> = e.iter().map(|v| c * v).collect();
        let sx: Vec<bool> = a.apply(&x).unwrap().iter().map(|v| *v >= 0.0).collect();
        let se: Vec<bool> = a.apply(&scaled).unwrap().iter().map(|v| *v >= 0.0).collect();
        let he = sx.iter().zip(&se).filter(|(p, q)| p != q).count() as f64 / 80.0;
        assert_eq!(m.he, he);

        assert!((0.0..=1.0).contains(&m.per) && (0.0..=1.0).contains(&m.ae));
        assert!((0.0..=1.0).contains(&m.he) && m.mae >= 0.0);
    }
}

#[test]
fn antipodal_and_identical() {
    let a = SensingEnsemble::generate(50, 10, 2).unwrap();
    let x = unit((0..10).map(|i| (i as f64).sin()).collect());
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    assert_eq!(evaluate(&x, &x, &a).unwrap().ae, 0.0);
    let m = evaluate(&x, &neg, &a).unwrap();
    assert_eq!(m.ae, 1.0);
    assert!((m.mse - 0.4).abs() <= 1e-15);
}
