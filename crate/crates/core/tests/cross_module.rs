use hypergeo::development::{canonical_sequence, develop, CrossingSequence, GeodesicClass};
use hypergeo::euclid::{midline, trace};
use hypergeo::hyperbolic::classify;
use hypergeo::solver::{check_theorem1, check_theorem2, construct_midpoint, solve_class, Verdict};
use hypergeo::tetra::{rotation_group, TetraMetric};

fn equivalent(a: &CrossingSequence, b: &CrossingSequence) -> bool {
    a.len() == b.len()
        && rotation_group().iter().any(|perm| {
            let r = a.relabeled(perm);
            (0..r.len()).any(|k| r.rotated(k).edges() == b.edges())
        })
}

#[test]
fn flat_g2_line_solves_to_g2() {
    let tr = trace(&midline(0, 1).unwrap(), 1).unwrap();
    for alpha in [0.1, 0.5, 1.0] {
        let m = TetraMetric::new(alpha).unwrap();
        let from_lattice = solve_class(&tr.sequence, &m).unwrap().closed().unwrap();
        let built = construct_midpoint(GeodesicClass::G2, &m).unwrap();
        assert_eq!(from_lattice.sequence, built.sequence);
        for (x, y) in from_lattice.crossings.iter().zip(&built.crossings) {
            assert_eq!(x.edge, y.edge);
            assert!((x.t - y.t).abs() < 1e-9);
        }
        assert!((from_lattice.total_length - built.total_length).abs() < 1e-9);
    }
}

#[test]
fn flat_lines_carry_the_canonical_classes() {
    let cases = [((0, 1), GeodesicClass::G2), ((1, 1), GeodesicClass::G3), ((2, 1), GeodesicClass::G32)];
    for ((p, q), class) in cases {
        let tr = trace(&midline(p, q).unwrap(), 1).unwrap();
        assert!(equivalent(&tr.sequence, &canonical_sequence(class)), "({p}, {q})");
    }
}

#[test]
fn translation_length_equals_total_length() {
    for k in 1..=10 {
        let m = TetraMetric::new(0.1 * k as f64).unwrap();
        for class in GeodesicClass::ALL {
            let seq = canonical_sequence(class);
            let l = classify(&develop(&seq, &m).unwrap().holonomy.unwrap())
                .unwrap()
                .translation_length
                .unwrap();
            let g = solve_class(&seq, &m).unwrap().closed().unwrap();
            assert!((l - g.total_length).abs() < 1e-9, "{class} {k}");
        }
    }
}

#[test]
fn longer_flat_lines_satisfy_the_necessary_conditions() {
    let m = TetraMetric::new(0.5).unwrap();
    for (p, q) in [(1, 3), (3, 1), (2, 3)] {
        let tr = trace(&midline(p, q).unwrap(), 1).unwrap();
        let g = solve_class(&tr.sequence, &m).unwrap().closed().unwrap();
        if g.simple {
            assert_eq!(check_theorem1(&g).verdict, Verdict::Holds, "({p}, {q})");
            assert_eq!(check_theorem2(&g).verdict, Verdict::Holds, "({p}, {q})");
        }
    }
}
