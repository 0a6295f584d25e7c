mod common;

use common::*;
use hyperpoly::higgs::{
    check_strong_parabolicity, det_rational, evaluate, residues_sum_to_zero, stability, to_higgs,
    LineSubbundle,
};
use hyperpoly::hyperpolygon::{
    act, act_tangent, d_moment, infinitesimal_action, is_in_level_set, is_tangent,
    linearization_matrix, moment_matrix, orbit_basis, pairings, random_group_element,
    sample_level_set, tangent_basis, HyperpolygonPoint, LieAlgebraElement, TangentVector,
};
use hyperpoly::linalg::{Covector2, Matrix2, Vector2};
use hyperpoly::poly::{
    poly_gcd, rf_eval, rf_is_square, squarefree_decomposition, Polynomial, RationalFunction,
};
use hyperpoly::scalar::{RandomScalar, Scalar};
use hyperpoly::symplectic::{
    canonical_lift, exterior_derivative_of_liouville, higgs_one_form, higgs_one_form_pullback,
    invariance_defect, liouville_one_form, liouville_two_form, pushforward_deformation,
    random_lift, random_tangent, reduced_two_form, serre_pair, trace_pairing,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn point(n: usize, seed: u64) -> (HyperpolygonPoint<Q>, rand_chacha::ChaCha8Rng) {
    let mut rng = rng(seed);
    let p = sample_level_set::<Q, _>(n, &mut rng).unwrap();
    (p, rng)
}

fn small_poly() -> impl Strategy<Value = Polynomial<Q>> {
    prop::collection::vec((-5i64..=5, -2i64..=2), 0..5)
        .prop_map(|c| Polynomial::new(c.into_iter().map(|(re, im)| Q::from_ints(re, im)).collect()))
}

fn nonzero_poly() -> impl Strategy<Value = Polynomial<Q>> {
    small_poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn nonzero_vector(rng: &mut rand_chacha::ChaCha8Rng) -> Vector2<Q> {
    loop {
        let v = Vector2::new(Q::sample(rng), Q::sample(rng));
        if !v.is_zero() {
            return v;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampler_lands_in_level_set(n in 4usize..=7, seed in any::<u64>()) {
        let (p, _) = point(n, seed);
        prop_assert!(is_in_level_set(&p));
    }

    #[test]
    fn action_preserves_level_set(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let g = random_group_element::<Q, _>(n, &mut rng);
        prop_assert!(is_in_level_set(&act(&g, &p)));
    }

    #[test]
    fn moment_map_is_equivariant(n in 3usize..=6, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = HyperpolygonPoint::new(
            (0..n).map(|_| Covector2::new(Q::sample(&mut rng), Q::sample(&mut rng))).collect(),
            (0..n).map(|_| nonzero_vector(&mut rng)).collect(),
        ).unwrap();
        let g = random_group_element::<Q, _>(n, &mut rng);
        let moved = act(&g, &p);
        let conj = g.matrix_inverse().clone() * moment_matrix(&p) * g.matrix().clone();
        prop_assert_eq!(moment_matrix(&moved), conj);
        prop_assert_eq!(pairings(&moved), pairings(&p));
    }

    #[test]
    fn linearization_matrix_matches_d_moment(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let flat: Vec<Q> = (0..4 * n).map(|_| Q::sample(&mut rng)).collect();
        let t = TangentVector::from_flat(&flat);
        let (m, pairs) = d_moment(&p, &t);
        let mut expected = m.entries().to_vec();
        expected.extend(pairs);
        prop_assert_eq!(linearization_matrix(&p).mul_vec(&flat), expected);
    }

    #[test]
    fn orbit_directions_are_tangent(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let d = Q::sample(&mut rng);
        let a = Matrix2::new(d.clone(), Q::sample(&mut rng), Q::sample(&mut rng), -d);
        let s = (0..n).map(|_| Q::sample(&mut rng)).collect();
        let xi = LieAlgebraElement::new(a, s).unwrap();
        prop_assert!(is_tangent(&p, &infinitesimal_action(&xi, &p)));
        for o in orbit_basis(&p) {
            prop_assert!(is_tangent(&p, &o));
        }
    }

    #[test]
    fn tangent_basis_lies_in_kernel(n in 4usize..=6, seed in any::<u64>()) {
        let (p, _) = point(n, seed);
        for t in tangent_basis(&p) {
            prop_assert!(is_tangent(&p, &t));
        }
    }

    #[test]
    fn polynomial_ring_laws(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() - a.clone(), Polynomial::zero());
    }

    #[test]
    fn division_with_remainder(a in small_poly(), d in nonzero_poly()) {
        let (q, r) = a.div_rem(&d);
        prop_assert_eq!(q * d.clone() + r.clone(), a);
        prop_assert!(r.is_zero() || r.degree() < d.degree());
    }

    #[test]
    fn gcd_divides_and_is_maximal(a in nonzero_poly(), b in nonzero_poly(), c in nonzero_poly()) {
        let g = poly_gcd(&(a.clone() * c.clone()), &(b.clone() * c.clone())).unwrap();
        prop_assert!((a.clone() * c.clone()).exact_div(&g).is_some());
        prop_assert!((b.clone() * c.clone()).exact_div(&g).is_some());
        prop_assert!(g.exact_div(&c.monic()).is_some());
        prop_assert_eq!(g.leading().cloned(), Some(Q::one()));
    }

    #[test]
    fn squarefree_factors_multiply_back(a in nonzero_poly(), b in nonzero_poly()) {
        let p = (a.clone() * b.clone() * b.clone()).monic();
        let factors = squarefree_decomposition(&p).unwrap();
        let product = factors.iter().enumerate().fold(Polynomial::one(), |acc, (i, f)| acc * f.pow(i as u32 + 1));
        prop_assert_eq!(product, p);
        for f in &factors {
            prop_assert_eq!(poly_gcd(f, &f.derivative()).unwrap().degree(), Some(0));
        }
    }

    #[test]
    fn squares_are_detected(num in nonzero_poly(), den in nonzero_poly()) {
        let g = RationalFunction::new(num, den);
        let (is_square, root) = rf_is_square(&(g.clone() * g.clone())).unwrap();
        prop_assert!(is_square);
        let root = root.unwrap();
        prop_assert_eq!(root.clone() * root, g.clone() * g);
    }

    #[test]
    fn saturation_is_idempotent(p in nonzero_poly(), q in nonzero_poly(), c in nonzero_poly()) {
        let l = LineSubbundle::saturate(p.clone() * c.clone(), q.clone() * c.clone()).unwrap();
        let (sp, sq) = l.section();
        let again = LineSubbundle::saturate(sp.clone(), sq.clone()).unwrap();
        prop_assert_eq!(&again, &l);
        prop_assert_eq!(l, LineSubbundle::saturate(p, q).unwrap());
    }

    #[test]
    fn residues_are_strongly_parabolic(n in 4usize..=7, seed in any::<u64>()) {
        let (p, _) = point(n, seed);
        let h = to_higgs(&p, &standard(n), &thirds(n)).unwrap();
        prop_assert!(residues_sum_to_zero(&h));
        prop_assert!(check_strong_parabolicity(&h));
        for (r, l) in h.residues().iter().zip(h.lines()) {
            prop_assert!((r.clone() * r.clone()).is_zero());
            prop_assert!(r.apply(l).is_zero());
        }
    }

    #[test]
    fn serre_pairing_ignores_the_lift(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let h = to_higgs(&p, &standard(n), &thirds(n)).unwrap();
        let t = random_tangent(&tangent_basis(&p), n, &mut rng);
        let d = pushforward_deformation(&p, &t);
        for i in 0..n {
            let (r, line, motion) = (&h.residues()[i], &h.lines()[i], &d.line_motion[i]);
            let canonical = serre_pair(r, line, motion).unwrap();
            let lift = random_lift(line, motion, &mut rng).unwrap();
            // same class in Hom(ℓ, C²/ℓ)
            prop_assert!((lift.apply(line) - motion.clone()).wedge(line).is_zero());
            prop_assert_eq!(trace_pairing(r, &lift), canonical.clone());
            prop_assert_eq!(trace_pairing(r, &canonical_lift(line, motion).unwrap()), canonical);
        }
    }

    #[test]
    fn liouville_two_form_is_antisymmetric_and_bilinear(n in 3usize..=6, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mut draw = || TangentVector::from_flat(&(0..4 * n).map(|_| Q::sample(&mut rng)).collect::<Vec<_>>());
        let (s, t, r) = (draw(), draw(), draw());
        let c = Q::from_ints(3, -2);
        prop_assert_eq!(liouville_two_form(&s, &t), -liouville_two_form(&t, &s));
        prop_assert_eq!(
            liouville_two_form(&s.scale(&c).add(&r), &t),
            c * liouville_two_form(&s, &t) + liouville_two_form(&r, &t)
        );
    }

    #[test]
    fn two_form_is_group_invariant(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let basis = tangent_basis(&p);
        let (s, t) = (random_tangent(&basis, n, &mut rng), random_tangent(&basis, n, &mut rng));
        let g = random_group_element::<Q, _>(n, &mut rng);
        prop_assert!(invariance_defect(&g, &s, &t).is_zero());
        prop_assert!(is_tangent(&act(&g, &p), &act_tangent(&g, &s)));
    }

    #[test]
    fn orbit_directions_are_null(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let t = random_tangent(&tangent_basis(&p), n, &mut rng);
        for o in orbit_basis(&p) {
            prop_assert!(liouville_two_form(&o, &t).is_zero());
        }
    }

    #[test]
    fn gauge_directions_pair_to_zero(n in 4usize..=6, seed in any::<u64>()) {
        let (p, _) = point(n, seed);
        let h = to_higgs(&p, &standard(n), &thirds(n)).unwrap();
        for o in orbit_basis(&p) {
            prop_assert!(higgs_one_form(&h, &pushforward_deformation(&p, &o)).unwrap().is_zero());
        }
    }

    #[test]
    fn one_form_pulls_back_to_liouville(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let t = random_tangent(&tangent_basis(&p), n, &mut rng);
        prop_assert_eq!(higgs_one_form_pullback(&p, &t).unwrap(), liouville_one_form(&p, &t));
    }

    #[test]
    fn reduced_form_is_derivative_of_liouville(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let basis = tangent_basis(&p);
        let (s, t) = (random_tangent(&basis, n, &mut rng), random_tangent(&basis, n, &mut rng));
        prop_assert_eq!(reduced_two_form(&p, &s, &t).unwrap(), exterior_derivative_of_liouville(&p, &s, &t));
    }

    #[test]
    fn determinant_agrees_pointwise(n in 4usize..=6, seed in any::<u64>(), re in -40i64..40, im in -3i64..3) {
        let (p, _) = point(n, seed);
        let h = to_higgs(&p, &standard(n), &thirds(n)).unwrap();
        let x = Q::new(BigRational::new(re.into(), 7.into()), BigRational::from_integer(im.into()));
        let det = det_rational(&h).unwrap();
        match evaluate(&h, &x) {
            Ok(m) => prop_assert_eq!(rf_eval(&det, &x).unwrap(), m.det()),
            Err(_) => prop_assert!(h.points().as_slice().contains(&x)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stability_is_group_invariant(n in 4usize..=6, seed in any::<u64>()) {
        let (p, mut rng) = point(n, seed);
        let g = random_group_element::<Q, _>(n, &mut rng);
        let before = stability(&to_higgs(&p, &standard(n), &thirds(n)).unwrap()).unwrap();
        let after = stability(&to_higgs(&act(&g, &p), &standard(n), &thirds(n)).unwrap()).unwrap();
        prop_assert_eq!(before.stable, after.stable);
        prop_assert_eq!(before.semistable, after.semistable);
        prop_assert_eq!(before.max_pardeg, after.max_pardeg);
    }

    #[test]
    fn approx_one_form_matches_within_tolerance(n in 4usize..=6, seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = sample_level_set::<C, _>(n, &mut rng).unwrap();
        let t = random_tangent(&tangent_basis(&p), n, &mut rng);
        let lhs = higgs_one_form_pullback(&p, &t).unwrap();
        let rhs = liouville_one_form(&p, &t);
        let scale: f64 = p.ys().iter().zip(&t.v).map(|(y, v)| y.norm() * v.norm()).sum();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(1.0));
    }
}
