use exdist::cover::{balls_meet, egg_yolk_cover, five_b_cover, random_family, verify_cover, LinearKind};
use exdist::geom::{Ball, Point};
use proptest::prelude::*;

fn ball() -> impl Strategy<Value = Ball> {
    (-5.0f64..5.0, -5.0f64..5.0, 0.05f64..2.0).prop_map(|(x, y, r)| Ball::new(Point::new2(x, y), r).unwrap())
}

proptest! {
    #[test]
    fn five_b_is_disjoint_and_covers(balls in prop::collection::vec(ball(), 1..40)) {
        let kept = five_b_cover(&balls);
        for (a, &i) in kept.iter().enumerate() {
            for &j in &kept[a + 1..] {
                prop_assert!(!balls_meet(&balls[i], &balls[j]));
            }
        }
        for b in &balls {
            // Independent float check: some kept ball at least as large lies within
            // reach, so b sits inside its 5-fold dilate.
            let hit = kept.iter().any(|&k| {
                let c = &balls[k];
                c.radius >= b.radius && b.center.dist(&c.center) <= b.radius + c.radius
                    && b.center.dist(&c.center) + b.radius <= 5.0 * c.radius
            });
            prop_assert!(hit, "{b:?} uncovered");
        }
    }

    #[test]
    fn balls_meet_is_symmetric(a in ball(), b in ball()) {
        prop_assert_eq!(balls_meet(&a, &b), balls_meet(&b, &a));
        let d = a.center.dist(&b.center);
        let s = a.radius + b.radius;
        if (d - s).abs() > 1e-9 * s {
            prop_assert_eq!(balls_meet(&a, &b), d < s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn egg_yolk_cover_postconditions(seed in any::<u64>(), regions in 0usize..10, which in 0usize..3) {
        let (kind, m) = [(LinearKind::Identity, 2.0), (LinearKind::Stretch, 4.0), (LinearKind::RotationScale, 8.0)][which];
        let fam = random_family(kind, m, regions, 32, seed).unwrap();
        let cover = egg_yolk_cover(&fam).unwrap();
        prop_assert!(verify_cover(&fam, &cover).all());
        // The construction treats the two sides alike.
        let inv = fam.inverted();
        let back = egg_yolk_cover(&inv).unwrap();
        prop_assert!(verify_cover(&inv, &back).all());
    }
}
