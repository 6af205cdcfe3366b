use deltajet::elliptic::{cochar_recurrence, count_points, hasse_ok, valuation_profile, ProfileBranch};
use deltajet::gm::psi_eval;
use deltajet::jet::gm_ctx;
use deltajet::limits::{perfection_reduce, LimitElement};
use deltajet::{JetCtx, JetPoly, Monomial, Padic5, Padic7, PadicLike, Scalar, EXACT};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

type Terms = Vec<([i64; 3], i64)>;

fn poly(ctx: &JetCtx, terms: &Terms) -> JetPoly<Padic5> {
    JetPoly::from_terms(
        ctx.clone(),
        terms.iter().map(|(e, c)| {
            let mut m = Monomial::ONE;
            m.0[..3].copy_from_slice(e);
            (m, Padic5::exact(*c))
        }),
    )
}

fn terms(max_exp: [i64; 3], n: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec(((0..=max_exp[0], 0..=max_exp[1], 0..=max_exp[2]).prop_map(|(a, b, c)| [a, b, c]), -3000i64..3000), 1..=n)
}

/// `t, delta t, delta^2 t, ...` with the identity Frobenius on Z.
fn delta_point(t: i64, n: usize, prec: i64) -> Vec<Padic5> {
    let mut v = vec![BigInt::from(t)];
    for _ in 0..n {
        let x = v.last().unwrap();
        let d: BigInt = (x - num_traits::pow(x.clone(), 5)) / 5;
        v.push(d);
    }
    v.into_iter().map(|x| Padic5::with_prec(x, prec)).collect()
}

fn close(a: &Padic5, b: &Padic5, k: i64) -> bool {
    let d = a.clone() - b.clone();
    d.is_zero() || d.val_lower() >= k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn padic_ring_laws(a in -10_000i64..10_000, b in -10_000i64..10_000, c in -10_000i64..10_000, k in 1i64..12) {
        let (x, y, z) = (Padic5::with_prec(a, k), Padic5::with_prec(b, k), Padic5::with_prec(c, k));
        prop_assert_eq!((x.clone() + y.clone()) * z.clone(), x.clone() * z.clone() + y.clone() * z.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        if x.is_unit() {
            let inv = x.inverse(k).unwrap();
            prop_assert_eq!(x * inv, Padic5::with_prec(1, k));
        }
    }

    #[test]
    fn ratio_is_exact_when_divisible(n in -5000i64..5000, d in 1i64..200) {
        let q = Padic7::from_ratio(&BigInt::from(n * d), &BigInt::from(d), EXACT).unwrap();
        prop_assert_eq!(q, Padic7::exact(n));
    }

    #[test]
    fn word_product_matches_exact_product(f in terms([4, 3, 2], 6), g in terms([4, 3, 2], 6), k in 1i64..9) {
        let exact = JetCtx::new("T", 2);
        let capped = exact.clone().with_prec(k);
        let want = poly(&exact, &f).mul(&poly(&exact, &g)).with_prec(k);
        let got = poly(&capped, &f).mul(&poly(&capped, &g));
        prop_assert!(got.equals(&want), "{} vs {}", got.to_text(), want.to_text());
    }

    #[test]
    fn split_power_matches_power(f in terms([3, 2, 1], 4), k in 2i64..8) {
        let ctx = JetCtx::new("T", 2).with_prec(k);
        let f = poly(&ctx, &f);
        prop_assert!(f.pow_split(5).equals(&f.pow(5)));
    }

    #[test]
    fn delta_commutes_with_phi(f in terms([2, 2, 1], 3)) {
        let ctx = JetCtx::new("T", 2).with_prec(7);
        let f = poly(&ctx, &f);
        let a = f.phi().unwrap().delta().unwrap();
        let b = f.delta().unwrap().phi().unwrap();
        prop_assert!(a.sub(&b.with_order(a.ctx().order)).min_val().is_none_or(|v| v >= 6));
    }

    #[test]
    fn delta_at_delta_points(f in terms([3, 2, 1], 4), t in -20i64..20) {
        let ctx = JetCtx::new("T", 2).with_prec(7);
        let f = poly(&ctx, &f);
        let pt = delta_point(t, 3, 9);
        let fv = f.eval(&pt, None).unwrap();
        let want = (fv.clone() - fv.pow(5)).div_exact(1).unwrap();
        prop_assert!(close(&f.delta().unwrap().eval(&pt, None).unwrap(), &want, 6));
    }

    #[test]
    fn text_round_trip(f in terms([5, 3, 2], 5), k in 1i64..10) {
        let ctx = JetCtx::new("T", 2).with_prec(k);
        let f = poly(&ctx, &f);
        let back = JetPoly::<Padic5>::parse(&f.to_text(), &ctx).unwrap();
        prop_assert!(back.equals(&f));
    }

    #[test]
    fn psi_is_additive(u in 1i64..390_625, v in 1i64..390_625) {
        prop_assume!(u % 5 != 0 && v % 5 != 0);
        let (a, b) = (Padic5::with_prec(u, 8), Padic5::with_prec(v, 8));
        let d = psi_eval(&(a.clone() * b.clone())).unwrap() - psi_eval(&a).unwrap() - psi_eval(&b).unwrap();
        prop_assert!(d.is_zero() || d.val_lower() >= 6);
    }

    #[test]
    fn reduction_is_multiplicative(f in terms([3, 2, 0], 3), g in terms([3, 2, 0], 3), i in 0u32..3, j in 0u32..3) {
        let ctx = gm_ctx(1, 6);
        let u = LimitElement::<5>::new(poly(&ctx, &f), i);
        let v = LimitElement::<5>::new(poly(&ctx, &g), j);
        let lhs = perfection_reduce(&u.mul(&v).unwrap(), 6).unwrap();
        let rhs = perfection_reduce(&u, 6).unwrap().mul(&perfection_reduce(&v, 6).unwrap());
        prop_assert!(lhs.equals(&rhs));
        prop_assert!(perfection_reduce(&u.shift(1).unwrap(), 6).unwrap().equals(&perfection_reduce(&u, 6).unwrap()));
    }

    #[test]
    fn recurrence_profile_follows_lambda1(l1 in -50i64..50) {
        let seq = cochar_recurrence::<Padic5>(5, Padic5::exact(1), Padic5::exact(l1), 24);
        let r = valuation_profile(&seq).unwrap();
        let want = if l1 % 5 == 0 { ProfileBranch::Divisible } else { ProfileBranch::Unit };
        prop_assert_eq!(r.branch, want);
    }

    #[test]
    fn point_counts_obey_hasse(a in 0i64..7, b in 0i64..7) {
        prop_assume!((4 * a * a * a + 27 * b * b) % 7 != 0);
        let ap = 8 - count_points(7, a, b) as i64;
        prop_assert!(hasse_ok(7, ap));
    }
}
