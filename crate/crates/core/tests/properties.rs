//! Property tests for the algebraic core and the measurement harness.

use std::sync::Arc;

use carleman::basis_fn::{Evaluable, ExpNeg, Recip1p, SharedFn};
use carleman::char_transform::r_seq;
use carleman::combinatorics::compositions;
use carleman::expansion::{compose_step, product_step, CertifiedExpansion};
use carleman::sector::{GridSpec, Sector};
use carleman::series::{compose, convolve, power_coeffs};
use carleman::verify::{measure_remainders, Grid};
use carleman::weight_seq::equivalence_fit;
use carleman::{io, Mpf, Precision, Rational, Real, Scalar, TwoParamFit, WeightSequence};
use num_complex::Complex;
use num_traits::Zero;
use proptest::prelude::*;

type Cq = Complex<Rational>;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn cq(re: i64, im: i64) -> Cq {
    Complex::new(q(re), q(im))
}

fn series(max_len: usize) -> impl Strategy<Value = Vec<Cq>> {
    prop::collection::vec((-6i64..=6, -3i64..=3), 1..=max_len)
        .prop_map(|v| v.into_iter().map(|(re, im)| cq(re, im)).collect())
}

/// Log-convex rational sequence `M_0 = 1`, with nondecreasing quotients `m_k = (base + s_k) / 2`.
fn lc_sequence(depth: usize) -> impl Strategy<Value = WeightSequence<Rational>> {
    (1i64..=4, prop::collection::vec(0i64..=3, depth)).prop_map(|(base, steps)| {
        let mut values = vec![q(1)];
        let mut m = q(base);
        for s in steps {
            m += frac(s, 2);
            let next = values.last().unwrap().clone() * m.clone();
            values.push(next);
        }
        WeightSequence::custom(values).unwrap()
    })
}

/// Sum over all `k`-tuples of indices below `n` of the products of coefficients.
fn brute_power(f: &[Cq], k: usize, n: usize) -> Vec<Cq> {
    let mut out = vec![Cq::zero(); n];
    let mut idx = vec![0usize; k];
    loop {
        let s: usize = idx.iter().sum();
        if s < n {
            let term = idx
                .iter()
                .fold(cq(1, 0), |acc, &i| acc * f.get(i).cloned().unwrap_or_else(Cq::zero));
            out[s] = out[s].clone() + term;
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn naive_compose(g: &[Cq], f: &[Cq], n: usize) -> Vec<Cq> {
    let mut out = vec![Cq::zero(); n];
    let mut fk = vec![Cq::zero(); n];
    fk[0] = cq(1, 0);
    for gk in g.iter().take(n) {
        for (o, c) in out.iter_mut().zip(&fk) {
            *o = o.clone() + gk.clone() * c.clone();
        }
        let mut next = vec![Cq::zero(); n];
        for (i, a) in fk.iter().enumerate() {
            for (j, b) in f.iter().enumerate().take(n - i) {
                next[i + j] = next[i + j].clone() + a.clone() * b.clone();
            }
        }
        fk = next;
    }
    out
}

/// An expansion over `G^1` whose certificate is `(A, 1)` with `A` the largest `|c_n|` bound.
fn gevrey_expansion(coeffs: Vec<Cq>) -> CertifiedExpansion<Rational> {
    let m = WeightSequence::<Rational>::gevrey(1.0, coeffs.len() + 1, Precision::default()).unwrap();
    let a = coeffs
        .iter()
        .map(|c| c.re.abs() + c.im.abs())
        .fold(q(1), |a, b| if b > a { b } else { a });
    CertifiedExpansion::new(coeffs, m, a, q(1), Sector::s_alpha(1.0).unwrap()).unwrap()
}

fn s1_grid(n_r: usize, n_theta: usize, r_max: f64) -> Grid {
    Grid::new(
        Sector::s_alpha(1.0).unwrap(),
        GridSpec {
            n_r,
            n_theta,
            r_min: 1e-3,
            r_max,
            margin: 0.05,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_commutes(a in series(8), b in series(8)) {
        let n = a.len().min(b.len());
        prop_assert_eq!(convolve(&a, &b, n), convolve(&b, &a, n));
    }

    #[test]
    fn convolution_associates(a in series(6), b in series(6), c in series(6)) {
        let n = a.len().min(b.len()).min(c.len());
        prop_assert_eq!(
            convolve(&convolve(&a, &b, n), &c, n),
            convolve(&a, &convolve(&b, &c, n), n)
        );
    }

    #[test]
    fn powers_match_tuple_enumeration(f in series(6), k in 1usize..=4) {
        let n = f.len();
        prop_assert_eq!(power_coeffs(&f, k, n), brute_power(&f, k, n));
    }

    #[test]
    fn composition_matches_naive_substitution(g in series(7), mut f in series(7)) {
        f[0] = Cq::zero();
        let n = g.len().min(f.len());
        prop_assert_eq!(compose(&g, &f, n), naive_compose(&g, &f, n));
    }

    #[test]
    fn product_step_is_monotone_and_vanishes(
        c in 1i64..=5, h1 in 1i64..=50, h2 in 1i64..=50, d in 1i64..=20, s in 2i64..=1000,
    ) {
        let (c, a1, a2, b1) = (q(c), frac(h1, 7), frac(h2, 7), frac(h1 + d, 7));
        let base = product_step(&c, &a1, &a2);
        prop_assert!(product_step(&c, &b1, &a2) > base.clone());
        prop_assert!(product_step(&c, &a2, &b1) > product_step(&c, &a2, &a1));
        // scaling both inputs by 1/s scales the output by 1/s
        let scaled = product_step(&c, &(a1 / q(s)), &(a2 / q(s)));
        prop_assert_eq!(scaled, base / q(s));
    }

    #[test]
    fn compose_step_is_monotone_and_vanishes(
        b in 1i64..=5, a in 1i64..=5, h1 in 1i64..=50, h2 in 1i64..=50, d in 1i64..=20, s in 2i64..=1000,
    ) {
        let (b, a, x1, x2) = (q(b), q(a), frac(h1, 7), frac(h2, 7));
        let base = compose_step(&b, &x1, &a, &x2);
        prop_assert!(compose_step(&b, &(x1.clone() + frac(d, 7)), &a, &x2) > base.clone());
        prop_assert!(compose_step(&b, &x1, &a, &(x2.clone() + frac(d, 7))) > base.clone());
        let scaled = compose_step(&b, &(x1 / q(s)), &a, &(x2 / q(s)));
        prop_assert!(scaled <= base / q(s));
    }

    #[test]
    fn operations_keep_the_coefficient_bound(f in series(8), g in series(8), mut inner in series(8)) {
        let ef = gevrey_expansion(f);
        let eg = gevrey_expansion(g);
        let alg = ef.seq().check_alg(ef.seq().depth()).unwrap().constant().clone();
        let prod = ef.product(&eg, &alg).unwrap();
        prop_assert!(prod.coefficient_bound_holds());

        inner[0] = Cq::zero();
        let ei = gevrey_expansion(inner);
        let depth = ef.order().min(ei.order());
        let fdb = ei.seq().check_fdb(depth).unwrap();
        let comp = ef.compose(&ei, &fdb.a_fit, &fdb.h_fit).unwrap();
        prop_assert!(comp.coefficient_bound_holds());
        prop_assert!(ei.shift_subtract().coefficient_bound_holds());
    }

    #[test]
    fn composition_sums_match_enumeration(m in lc_sequence(9), j in 1usize..=9, extra in 0usize..=9) {
        let n = (j + extra).min(9);
        let brute = compositions(n, j)
            .iter()
            .map(|c| c.iter().fold(q(1), |acc, &k| acc * m.values()[k].clone()))
            .fold(q(0), |a, b| a + b);
        prop_assert_eq!(m.composition_sum(j, n).unwrap(), brute);
    }

    #[test]
    fn fdb_partitions_agree_with_compositions(m in lc_sequence(8)) {
        let fit = m.check_fdb(8).unwrap();
        prop_assert_eq!(fit.ratios, m.fdb_ratios_over_compositions(8).unwrap());
    }

    #[test]
    fn quotients_rebuild_the_sequence(m in lc_sequence(20)) {
        let rebuilt = m.quotients().partial_products();
        prop_assert_eq!(rebuilt.as_slice(), m.values());
    }

    #[test]
    fn log_convex_sequences_are_algebra_closed(m in lc_sequence(16)) {
        prop_assert!(m.is_log_convex().flag);
        let alg = m.check_alg(16).unwrap();
        prop_assert!(alg.ratios.iter().all(|r| *r <= q(1)));
        // M_j^(1/j) nondecreasing, i.e. M_j^(j+1) <= M_{j+1}^j
        let v = m.values();
        for j in 1..16 {
            prop_assert!(v[j].powi(j as i64 + 1) <= v[j + 1].powi(j as i64));
        }
    }

    #[test]
    fn equivalence_is_antisymmetric(m in lc_sequence(12), l in lc_sequence(12)) {
        let ml = equivalence_fit(&m, &l, 12).unwrap();
        let lm = equivalence_fit(&l, &m, 12).unwrap();
        prop_assert_eq!(ml.log_low, -lm.log_high);
        prop_assert_eq!(ml.log_high, -lm.log_low);
    }

    #[test]
    fn fr1_dominates_its_ratios(r in prop::collection::vec(1e-6f64..1e6, 1..40)) {
        let fit = TwoParamFit::fr1(r.clone());
        prop_assert!(fit.holds());
        let exact = TwoParamFit::fr1(r.iter().map(|x| Rational::from_f64(*x)).collect());
        prop_assert!(exact.holds());
    }

    #[test]
    fn grid_points_lie_in_the_sector(
        alpha in 0.1f64..4.0, n_r in 1usize..12, n_theta in 1usize..12, margin in 0.01f64..0.9,
    ) {
        let s = Sector::s_alpha(alpha).unwrap();
        let spec = GridSpec { n_r, n_theta, r_min: 1e-4, r_max: 50.0, margin };
        let pts = s.sample_grid(&spec).unwrap();
        prop_assert_eq!(pts.len(), n_r * n_theta);
        prop_assert!(pts.iter().all(|p| s.contains(p)));
        prop_assert_eq!(pts, s.sample_grid(&spec).unwrap());
    }

    #[test]
    fn numbers_serialize_as_round_tripping_strings(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..8)) {
        let v = io::stringify_numbers(serde_json::json!({ "xs": xs }));
        let back: Vec<f64> = v["xs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().parse().unwrap())
            .collect();
        prop_assert_eq!(back, xs);
    }
}

/// Log-convex sequence with integer quotients `base + floor(k * slope / 4)`, in MPFR.
fn lc_sequence_mp(base: i64, slope: i64, depth: usize, prec: Precision) -> WeightSequence<Mpf> {
    let mut values = vec![Mpf::int_prec(1, prec)];
    for k in 0..depth as i64 {
        let m = Mpf::int_prec(base + k * slope / 4, prec);
        let next = values.last().unwrap().clone() * m;
        values.push(next);
    }
    WeightSequence::custom(values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn r_values_respect_the_lemma_bounds(base in 1i64..=6, slope in 1i64..=12, j in 0usize..=30) {
        let prec = Precision::from_bits(256);
        let m = lc_sequence_mp(base, slope, 90, prec);
        let mj = m.get(j).unwrap().clone();
        let tol = mj.clone() * Mpf::from_f64((-((j + 30) as f64)).exp2());
        let r = r_seq(&m, j, &tol).unwrap();
        prop_assert!(r.lower() >= mj.clone() * Mpf::from_f64((-(j as f64)).exp2()));
        prop_assert!(r.upper() <= mj * Mpf::from_i64(2));
    }

    #[test]
    fn refining_the_grid_never_lowers_a_sup(n_r in 1usize..6, n_theta in 1usize..5, r_max in 0.5f64..20.0) {
        let prec = Precision::from_digits(30);
        let f: SharedFn<Mpf> = Arc::new(Recip1p);
        let m = WeightSequence::<Mpf>::gevrey(1.0, 8, prec).unwrap();
        let coeffs = f.coefficients(8, prec).unwrap();
        let grid = s1_grid(n_r, n_theta, r_max);
        let coarse = measure_remainders(f.as_ref(), &coeffs, &m, &grid, 8, prec).unwrap();
        let fine = measure_remainders(f.as_ref(), &coeffs, &m, &grid.refined(), 8, prec).unwrap();
        for (c, r) in coarse.w.iter().zip(&fine.w) {
            prop_assert!(r >= c);
        }
    }

    #[test]
    fn reports_are_dominated_by_their_fit(n_r in 2usize..8, n_theta in 1usize..5, r_max in 0.5f64..20.0) {
        let prec = Precision::from_digits(30);
        let f = ExpNeg;
        let m = WeightSequence::<Mpf>::gevrey(1.0, 10, prec).unwrap();
        let coeffs = Evaluable::<Mpf>::coefficients(&f, 10, prec).unwrap();
        let rep = measure_remainders(&f, &coeffs, &m, &s1_grid(n_r, n_theta, r_max), 10, prec).unwrap();
        prop_assert!(rep.within(rep.fit.a, rep.fit.h));
        // e^{-z} lies in the class with (A, h) = (1, 1) over G^1 on S_1
        prop_assert!(rep.within(1.0 + 1e-9, 1.0));
        prop_assert_eq!(rep.w.len(), 11);
        prop_assert!(rep.w[0] <= 1.0 && rep.w.iter().all(|w| *w >= 0.0));
    }
}
