use std::f64::consts::PI;

use num::{BigRational, Zero};
use proptest::prelude::*;

use hypercox::arith::form::{determinant, RatMatrix};
use hypercox::arith::hilbert::candidate_primes;
use hypercox::arith::{
    commensurability_class, hasse_invariant, hilbert_symbol, span_input_of, MultiQuad, Place, QuadraticFormInvariant,
    RationalQuadraticForm,
};
use hypercox::assembly::{face_cycles, n_complex, w_complex};
use hypercox::coxeter::{
    build_diagram, coxeter_group_order, enumerate_strata, gram_matrix, CoxeterDiagram, EdgeLabel, StrataComplex,
    StrataMode,
};
use hypercox::family::{
    angle_eta, angle_phi, angle_psi, angle_theta, p_polytope, pairing_isometries, q_polytope, symmetry_generators, t1,
    tbar, verify_symmetry, FamilyTime, Regime, T2,
};
use hypercox::lorentz::{minkowski_product, pair_relation, project_to_wall, solve_vertex, SpaceLikeVector, Vector};
use hypercox::volume::{closed_form_volume, poincare_volume, schlafli_integrate};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn combinatorics(s: &StrataComplex) -> (Vec<[usize; 2]>, Vec<Vec<usize>>, Vec<(Vec<usize>, String)>) {
    (
        s.faces.iter().map(|f| f.walls).collect(),
        s.edges.iter().map(|e| e.walls.clone()).collect(),
        s.vertices.iter().map(|v| (v.walls.clone(), format!("{:?}", v.kind))).collect(),
    )
}

fn strata_at(t: f64, mode: StrataMode) -> StrataComplex {
    enumerate_strata(&p_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap(), mode).unwrap()
}

// ---------------------------------------------------------------- exact arithmetic

const RADICANDS: [u64; 7] = [1, 2, 3, 5, 6, 10, 15];

fn multiquad() -> impl Strategy<Value = MultiQuad> {
    proptest::collection::vec((-6i64..=6, 1i64..=4), RADICANDS.len()).prop_map(|cs| {
        cs.into_iter().zip(RADICANDS).fold(MultiQuad::zero(), |acc, ((n, d), r)| &acc + &MultiQuad::term(q(n, d), r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiquad_ring_axioms(a in multiquad(), b in multiquad(), c in multiquad()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), MultiQuad::one());
        }
        let f = a.to_f64() * b.to_f64();
        prop_assert!(((&a * &b).to_f64() - f).abs() < 1e-9 * (1.0 + f.abs()));
    }

    #[test]
    fn hilbert_bilinear(a in nonzero(), b1 in nonzero(), b2 in nonzero(), v in 0usize..5) {
        let place = [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(7)][v];
        let lhs = hilbert_symbol(&a, &(&b1 * &b2), place).unwrap();
        let rhs = hilbert_symbol(&a, &b1, place).unwrap() * hilbert_symbol(&a, &b2, place).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(hilbert_symbol(&a, &b1, place).unwrap(), hilbert_symbol(&b1, &a, place).unwrap());
    }

    #[test]
    fn hilbert_product_formula(a in nonzero(), b in nonzero()) {
        let mut prod = hilbert_symbol(&a, &b, Place::Infinity).unwrap();
        for p in candidate_primes(&a, &b).unwrap() {
            prod *= hilbert_symbol(&a, &b, Place::Prime(p)).unwrap();
        }
        prop_assert_eq!(prod, 1);
    }

    #[test]
    fn diagonalization_reconstructs(entries in proptest::collection::vec((-9i64..=9, 1i64..=5), 15)) {
        let mut m: RatMatrix = vec![vec![BigRational::zero(); 5]; 5];
        let mut it = entries.into_iter();
        for i in 0..5 {
            for j in i..5 {
                let (n, d) = it.next().unwrap();
                m[i][j] = q(n, d);
                m[j][i] = q(n, d);
            }
        }
        prop_assume!(!determinant(&m).is_zero());
        let form = RationalQuadraticForm::new(m.clone()).unwrap();
        let d = form.diagonalize().unwrap();
        prop_assert_eq!(d.reconstruct().unwrap(), m);
        let h1 = hasse_invariant(&d.entries).unwrap();
        let h2 = hasse_invariant(&d.squarefree_entries().unwrap()).unwrap();
        prop_assert_eq!(h1, h2);
    }
}

fn nonzero() -> impl Strategy<Value = BigRational> {
    (-500i64..=500, 1i64..=30).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| q(n, d))
}

fn quotient_forms() -> Vec<(QuadraticFormInvariant, RationalQuadraticForm)> {
    [FamilyTime::one(), FamilyTime::t1(), FamilyTime::tbar()]
        .into_iter()
        .map(|t| {
            let input = span_input_of(&q_polytope::<MultiQuad>(&t).unwrap()).unwrap();
            let r = commensurability_class(&input, None).unwrap();
            (r.invariant, r.form)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn invariants_survive_congruence(entries in proptest::collection::vec((-4i64..=4, 1i64..=3), 25)) {
        let t: RatMatrix = entries.chunks(5).map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect();
        prop_assume!(!determinant(&t).is_zero());
        for (inv, form) in quotient_forms() {
            let moved = QuadraticFormInvariant::of_form(&form.congruent(&t)).unwrap();
            prop_assert_eq!(&moved.hasse, &inv.hasse);
            prop_assert_eq!(&moved.witt, &inv.witt);
            prop_assert_eq!(moved.determinant_class, inv.determinant_class);
            prop_assert_eq!(moved.signature, inv.signature);
        }
    }
}

#[test]
fn supplied_basis_matches_automatic() {
    let input = span_input_of(&q_polytope::<MultiQuad>(&FamilyTime::t1()).unwrap()).unwrap();
    let auto = commensurability_class(&input, None).unwrap();
    let names: Vec<String> = auto.basis.iter().map(|v| format!("({})*{}", v.coef, input.names[v.node])).collect();
    let parsed = hypercox::arith::parse_basis(&input, &names.join(", ")).unwrap();
    let again = commensurability_class(&input, Some(parsed)).unwrap();
    assert_eq!(again.invariant, auto.invariant);
}

// ---------------------------------------------------------------- Lorentzian geometry

fn spacelike() -> impl Strategy<Value = SpaceLikeVector<f64>> {
    proptest::collection::vec(-3.0f64..3.0, 5)
        .prop_filter_map("space-like", |c| SpaceLikeVector::new(Vector(c)).ok().filter(|v| v.vector().norm2() > 0.1))
}

proptest! {
    #[test]
    fn pair_relation_symmetric(v in spacelike(), w in spacelike()) {
        let a = pair_relation(&v, &w);
        let b = pair_relation(&w, &v);
        prop_assert_eq!(a, b);
        let ip = minkowski_product(v.vector(), w.vector()).unwrap();
        let alpha = -ip / (v.vector().norm2() * w.vector().norm2()).sqrt();
        if let Some(th) = a.angle() {
            prop_assert!((th.cos() - alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_idempotent(v in proptest::collection::vec(-3.0f64..3.0, 5), w in spacelike()) {
        let p = project_to_wall(&Vector(v), &w);
        let pp = project_to_wall(&p, &w);
        let scale = 1.0 + p.euclid_norm();
        prop_assert!(minkowski_product(&p, w.vector()).unwrap().abs() < 1e-9 * scale);
        prop_assert!(p.0.iter().zip(&pp.0).all(|(a, b)| (a - b).abs() < 1e-9 * scale));
    }
}

#[test]
fn exact_projection_is_orthogonal() {
    let w = SpaceLikeVector::new(Vector(vec![MultiQuad::one(), MultiQuad::from_int(2), MultiQuad::zero(), MultiQuad::one(), MultiQuad::zero()])).unwrap();
    let v = Vector(vec![MultiQuad::from_int(3), MultiQuad::one(), MultiQuad::from_int(-1), MultiQuad::zero(), MultiQuad::from_int(2)]);
    let p = project_to_wall(&v, &w);
    assert!(minkowski_product(&p, w.vector()).unwrap().is_zero());
    assert_eq!(project_to_wall(&p, &w), p);
}

#[test]
fn vertices_lie_on_their_walls() {
    let p = p_polytope::<f64>(&FamilyTime::new(0.8).unwrap()).unwrap();
    let s = enumerate_strata(&p, StrataMode::Geometric).unwrap();
    for (_, v) in s.finite_vertices() {
        let ns: Vec<Vector<f64>> = v.walls.iter().map(|&w| p.normals[w].vector().clone()).collect();
        let x = solve_vertex(&ns).expect("finite vertex");
        for n in &ns {
            assert!(minkowski_product(&x.coords, n).unwrap().abs() < 1e-9);
        }
    }
}

// ---------------------------------------------------------------- the family

#[test]
fn angles_monotone() {
    let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
    for w in grid.windows(2) {
        assert!(angle_theta(w[1]).unwrap() < angle_theta(w[0]).unwrap());
    }
    let above: Vec<f64> = (1..=1000).map(|i| t1() + (1.0 - t1()) * i as f64 / 1000.0).collect();
    for w in above.windows(2) {
        assert!(angle_phi(w[1]).unwrap() > angle_phi(w[0]).unwrap());
    }
}

proptest! {
    #[test]
    fn psi_relation(t in 0.001f64..0.7745) {
        let c = angle_theta(t).unwrap().cos();
        prop_assert!((angle_psi(t).unwrap().cos() - c / (1.0 - c)).abs() < 1e-12);
    }

    #[test]
    fn eta_sine_law(t in 0.001f64..0.707) {
        let th = angle_theta(t).unwrap();
        let c = th.cos();
        let lhs = angle_eta(t).unwrap().sin().powi(2) / th.sin().powi(2);
        let rhs = (1.0 - 3.0 * c) / ((1.0 - 2.0 * c).powi(2) * (1.0 + c));
        // 1 + cos θ cancels as t -> 0.
        prop_assert!((lhs - rhs).abs() < 1e-14 / (1.0 + c) * (1.0 + rhs.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn symmetries_preserve_normals(t in 0.05f64..1.0) {
        let vs = p_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap().vectors();
        let g = symmetry_generators();
        for iso in [&g.l, &g.m, &g.n, &g.r] {
            prop_assert!(verify_symmetry(iso, &vs).is_ok());
        }
        for (_, s) in pairing_isometries() {
            prop_assert!(verify_symmetry(&s, &vs).is_ok());
        }
    }

    #[test]
    fn backends_agree(t in 0.5774f64..1.0) {
        let d = strata_at(t, StrataMode::Diagram);
        let g = strata_at(t, StrataMode::Geometric);
        prop_assert_eq!(combinatorics(&d), combinatorics(&g));
    }

    #[test]
    fn strata_are_simple(t in 0.05f64..1.0) {
        let s = strata_at(t, StrataMode::Geometric);
        prop_assert!(s.edges.iter().all(|e| e.walls.len() == 3));
        prop_assert!(s.finite_vertices().all(|(_, v)| v.walls.len() == 4));
    }

    #[test]
    fn poincare_matches_closed_form(t in 0.05f64..1.0) {
        let p = p_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap();
        let s = enumerate_strata(&p, StrataMode::Geometric).unwrap();
        prop_assert!((poincare_volume(&p, &s).unwrap() - closed_form_volume(t).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn quotient_is_a_24th(t in 0.7072f64..1.0) {
        let q = q_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap();
        let s = enumerate_strata(&q, StrataMode::Geometric).unwrap();
        let ratio = closed_form_volume(t).unwrap() / poincare_volume(&q, &s).unwrap();
        prop_assert!((ratio - 24.0).abs() < 1e-8);
    }
}

#[test]
fn exact_presets_agree_across_backends() {
    for (n, d) in [(1, 1), (3, 5), (1, 2), (2, 5), (1, 3)] {
        let t = FamilyTime::exact(q(n, d)).unwrap();
        let p = p_polytope::<MultiQuad>(&t).unwrap();
        enumerate_strata(&p, StrataMode::Both).unwrap_or_else(|e| panic!("t^2 = {n}/{d}: {e}"));
    }
}

#[test]
fn combinatorics_constant_on_regimes() {
    for (a, b) in [(0.9, 0.99), (0.72, 0.76), (0.2, 0.6), (0.05, 0.7)] {
        assert_eq!(combinatorics(&strata_at(a, StrataMode::Geometric)), combinatorics(&strata_at(b, StrataMode::Geometric)), "{a} vs {b}");
    }
}

fn diagram_of(n: usize, edges: &[(usize, usize, u64)]) -> CoxeterDiagram {
    let mut labels = vec![vec![EdgeLabel::RightAngle; n]; n];
    let mut alpha = vec![vec![0.0; n]; n];
    for &(a, b, m) in edges {
        labels[a][b] = EdgeLabel::Angle(PI / m as f64);
        labels[b][a] = labels[a][b];
        alpha[a][b] = (PI / m as f64).cos();
        alpha[b][a] = alpha[a][b];
    }
    CoxeterDiagram { nodes: (0..n).map(|i| i.to_string()).collect(), alpha, labels }
}

#[test]
fn group_order_multiplicative() {
    // A3 (24), B3 (48), H3 (120), A1 (2), I2(5) (10)
    let parts: [(usize, Vec<(usize, usize, u64)>, u64); 5] = [
        (3, vec![(0, 1, 3), (1, 2, 3)], 24),
        (3, vec![(0, 1, 3), (1, 2, 4)], 48),
        (3, vec![(0, 1, 3), (1, 2, 5)], 120),
        (1, vec![], 2),
        (2, vec![(0, 1, 5)], 10),
    ];
    for (n1, e1, o1) in &parts {
        for (n2, e2, o2) in &parts {
            let mut edges = e1.clone();
            edges.extend(e2.iter().map(|&(a, b, m)| (a + n1, b + n1, m)));
            let d = diagram_of(n1 + n2, &edges);
            assert_eq!(coxeter_group_order(&d).unwrap(), o1 * o2);
        }
    }
}

#[test]
fn quotient_diagram_is_acute() {
    for t in [1.0, 0.9, t1(), 0.75, T2, 0.65, tbar(), 0.4, 0.1] {
        let q = q_polytope::<f64>(&FamilyTime::new(t).unwrap()).unwrap();
        assert!(build_diagram(&gram_matrix(&q).unwrap()).is_acute(), "t = {t}");
    }
}

// ---------------------------------------------------------------- volume

#[test]
fn volume_is_c1_across_critical_times() {
    // One-sided dV/dθ staying inside its regime.
    let below = |tc: f64, h: f64| {
        (closed_form_volume(tc - h).unwrap() - closed_form_volume(tc - 2.0 * h).unwrap())
            / (angle_theta(tc - h).unwrap() - angle_theta(tc - 2.0 * h).unwrap())
    };
    let above = |tc: f64, h: f64| {
        (closed_form_volume(tc + 2.0 * h).unwrap() - closed_form_volume(tc + h).unwrap())
            / (angle_theta(tc + 2.0 * h).unwrap() - angle_theta(tc + h).unwrap())
    };
    // Quotients approach their limit like √h, so extrapolate from h and h/100.
    let limit = |d: &dyn Fn(f64) -> f64| (10.0 * d(1e-7) - d(1e-5)) / 9.0;
    for tc in [t1(), T2] {
        let left = closed_form_volume(tc - 1e-12).unwrap();
        let right = closed_form_volume(tc + 1e-12).unwrap();
        assert!((left - right).abs() < 1e-9, "C0 at {tc}");
        let l = limit(&|h| below(tc, h));
        let r = limit(&|h| above(tc, h));
        assert!((l - r).abs() < 1e-5 * (1.0 + l.abs()), "C1 at {tc}: {l} vs {r}");
    }
}

#[test]
fn schlafli_from_either_end() {
    for r in [Regime::High, Regime::Middle] {
        let (a, b) = r.span().unwrap();
        let samples: Vec<f64> = (1..=100).map(|i| a + (b - a) * i as f64 / 101.0).collect();
        for start in [a, b] {
            let c = schlafli_integrate(r, start, closed_form_volume(start).unwrap(), &samples).unwrap();
            for p in &c.points {
                assert!((p.vol - closed_form_volume(p.t).unwrap()).abs() < 1e-6, "{r:?} from {start}: t = {}", p.t);
            }
        }
    }
}

#[test]
fn w_volume_endpoints() {
    let c = 4.0 * PI * PI / 3.0;
    for (t, want) in [(FamilyTime::one(), 32.0 * PI * PI / 3.0), (FamilyTime::tbar(), 20.0 * PI * PI / 3.0)] {
        let chi = hypercox::assembly::complex_euler_char(&w_complex(&t).unwrap()).unwrap();
        let v = c * (*chi.numer() as f64 / *chi.denom() as f64);
        assert!((v - want).abs() < 1e-9);
        assert!((8.0 * closed_form_volume(t.t).unwrap() - want).abs() < 1e-9);
    }
}

// ---------------------------------------------------------------- assembly

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn face_cycles_partition_the_faces(t in 0.78f64..0.99, n in any::<bool>()) {
        let ft = FamilyTime::new(t).unwrap();
        let c = if n { n_complex(&ft).unwrap() } else { w_complex(&ft).unwrap() };
        let cycles = face_cycles(&c).unwrap();
        let total: f64 = cycles.iter().map(|cy| cy.angle).sum();
        let faces: f64 = c.strata.faces.iter().map(|f| f.angle).sum();
        prop_assert!((total - c.copies.len() as f64 * faces).abs() < 1e-8);
        let entries: usize = cycles.iter().map(|cy| cy.len()).sum();
        prop_assert_eq!(entries, c.copies.len() * c.strata.faces.len());
        let (th, ph) = (angle_theta(t).unwrap(), angle_phi(t).unwrap());
        let allowed = if n { [6.0 * th, 4.0 * ph] } else { [2.0 * th, 4.0 * ph] };
        for cy in cycles.iter().filter(|cy| cy.is_singular()) {
            prop_assert!(allowed.iter().any(|a| (cy.angle - a).abs() < 1e-9), "angle {}", cy.angle);
        }
    }
}
