use mub6::families::{continue_vector, degeneracy_matrices, orbit_table};
use mub6::fourier::{build_f, reduced_system_residual, c_from_phase_vector};
use mub6::linalg::{inner_product, unbiasedness_residual, ComplexMatrix6, Vector6};
use mub6::vecsearch::{find_unbiased_vectors, SearchSettings};
use mub6::{Error, FourierParams, PhaseVector};

fn residual_to_both(v: &Vector6, params: FourierParams) -> f64 {
    build_f(params)
        .columns()
        .iter()
        .chain(ComplexMatrix6::identity().columns().iter())
        .map(|c| unbiasedness_residual(v, c))
        .fold(0.0, f64::max)
}

fn origin_vectors() -> Vec<PhaseVector> {
    let catalog = find_unbiased_vectors(FourierParams::new(0.0, 0.0), &SearchSettings::default()).unwrap();
    assert_eq!(catalog.vectors.len(), 48);
    catalog.vectors
}

#[test]
fn all_origin_vectors_are_non_degenerate() {
    let f = build_f(FourierParams::new(0.0, 0.0));
    for v in origin_vectors() {
        let dm = degeneracy_matrices(&v.to_vector(), &f);
        assert!(dm.column_sum_residual() < 1e-12);
        assert_eq!(dm.rank_n, 5, "singular values {:?}", dm.singular_values);
    }
}

#[test]
fn continuation_preserves_the_count_near_the_origin() {
    let path: Vec<FourierParams> = (0..=10).map(|i| FourierParams::new(0.001 * i as f64, 0.0005 * i as f64)).collect();
    let end = *path.last().unwrap();
    let mut endpoints: Vec<PhaseVector> = Vec::new();
    for v in origin_vectors() {
        let out = continue_vector(&v, &path, 1e-10).unwrap();
        assert_eq!(out.len(), path.len());
        let last = *out.last().unwrap();
        assert!(residual_to_both(&last.to_vector(), end) < 1e-10);
        assert!(reduced_system_residual(&c_from_phase_vector(&last), end).max() < 1e-8);
        endpoints.push(last);
    }
    for i in 0..endpoints.len() {
        for j in 0..i {
            assert!(endpoints[i].distance(&endpoints[j]) > 1e-5, "endpoints {i} and {j} coincide");
        }
    }
}

#[test]
fn constant_path_is_stationary() {
    let v = origin_vectors()[7];
    let p = FourierParams::new(0.0, 0.0);
    let out = continue_vector(&v, &[p, p, p], 1e-10).unwrap();
    for w in &out {
        assert!(w.distance(&v) < 1e-9);
    }
}

#[test]
fn degenerate_start_is_rejected() {
    // the degenerate roots at (1/6, 0) have rank(N) < 5
    let params = FourierParams::new(1.0 / 6.0, 0.0);
    let catalog = find_unbiased_vectors(params, &SearchSettings::default()).unwrap();
    let f = build_f(params);
    let degenerate = catalog
        .vectors
        .iter()
        .find(|v| !degeneracy_matrices(&v.to_vector(), &f).is_non_degenerate())
        .expect("a degenerate vector at (1/6, 0)");
    let path = [params, FourierParams::new(0.16, 0.001)];
    assert!(matches!(continue_vector(degenerate, &path, 1e-6), Err(Error::Degenerate { .. })));
}

#[test]
fn orbit_tables_at_generic_points() {
    for (a, b) in [(0.043, 0.011), (0.121, 0.037), (0.155, 0.06)] {
        let params = FourierParams::new(a, b);
        let catalog = find_unbiased_vectors(params, &SearchSettings { trials: 1500, ..Default::default() }).unwrap();
        for v in catalog.vectors.iter().take(6) {
            let table = orbit_table(&v.to_vector(), params).unwrap();
            for row in &table {
                for x in row {
                    assert!(residual_to_both(x, params) < 1e-8);
                }
                for i in 0..3 {
                    for j in 0..i {
                        assert!(inner_product(&row[i], &row[j]).norm() < 1e-10);
                    }
                }
            }
            for col in 0..3 {
                assert!(inner_product(&table[0][col], &table[1][col]).norm() < 1e-10);
            }
        }
    }
}
