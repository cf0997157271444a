use proptest::prelude::*;

use recollement::harbater::{HarbaterElement, Poly};
use recollement::periodic::{Qi, Tps, Window};
use recollement::scalars::{rational, ExactScalar, PAdic, Rational};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rational(n, d))
}

fn gaussian() -> impl Strategy<Value = Qi> {
    (small_rational(), small_rational()).prop_map(|(a, b)| Qi::new(a, b))
}

proptest! {
    #[test]
    fn gaussian_display_parses_back(z in gaussian()) {
        prop_assert_eq!(z.to_string().parse::<Qi>().unwrap(), z.clone());
        // real values come back in the smaller field
        let s = ExactScalar::Gaussian(z.clone());
        let back = s.to_string().parse::<ExactScalar>().unwrap();
        prop_assert_eq!(back.to_string(), s.to_string());
        prop_assert_eq!(matches!(back, ExactScalar::Gaussian(_)), !z.is_real());
    }

    #[test]
    fn padic_display_parses_back(n in -5000i64..5000, d in 1i64..50, prec in 1u32..12) {
        let x = PAdic::from_rational(&rational(n, d * 7 + 1), 5, prec);
        prop_assert_eq!(x.to_string().parse::<PAdic>().unwrap(), x);
    }

    #[test]
    fn tps_display_parses_back(c in prop::collection::vec(gaussian(), 0..8), extra in 0usize..4) {
        let order = c.len() + extra + 1;
        let f = Tps::new(c, order);
        prop_assert_eq!(f.to_string().parse::<Tps>().unwrap(), f);
    }

    #[test]
    fn window_json_round_trip(t in prop::collection::vec((-6i64..6, gaussian()), 0..8), cut in prop::option::of(-8i64..0)) {
        let w = Window::from_terms(t, cut);
        let text = serde_json::to_string(&w.to_json()).unwrap();
        prop_assert_eq!(Window::from_json_str(&text).unwrap(), w);
    }

    #[test]
    fn harbater_display_parses_back(
        num in prop::collection::vec(-9i64..9, 1..5),
        den in prop::collection::vec(-9i64..9, 0..3),
        shift in -3i64..3,
    ) {
        let mut d = vec![1];
        d.extend(den);
        let t_pow = Poly::t().pow(shift.unsigned_abs() as u32);
        let (n, d) = if shift >= 0 {
            (Poly::from_ints(&num).mul(&t_pow), Poly::from_ints(&d))
        } else {
            (Poly::from_ints(&num), Poly::from_ints(&d).mul(&t_pow))
        };
        prop_assume!(!n.is_zero());
        let f = HarbaterElement::rational_fn(n, d).unwrap();
        prop_assert_eq!(f.to_string().parse::<HarbaterElement>().unwrap(), f);
    }
}

#[test]
fn series_form_parses_back() {
    let f: HarbaterElement = "2 ; 1, -1/2, 1/4 ; bound 3 1/2".parse().unwrap();
    assert_eq!(f.to_string().parse::<HarbaterElement>().unwrap(), f);
}
