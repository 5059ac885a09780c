use crate::geom::Ball;
use crate::sets::rat::q;

/// Open balls `a`, `b` intersect, decided exactly on the float inputs.
pub fn balls_meet(a: &Ball, b: &Ball) -> bool {
    let mut d2 = q(0.0);
    for k in 0..3 {
        let d = q(a.center.0[k]) - q(b.center.0[k]);
        d2 += &d * &d;
    }
    let s = q(a.radius) + q(b.radius);
    d2 < &s * &s
}

/// Greedy disjointed subcollection: balls in order of decreasing radius (ties by
/// index), each kept if it misses every ball kept so far. Every input ball meets a
/// kept ball at least as large, so it lies in its 3-fold (hence 5-fold) dilate.
pub fn five_b_cover(balls: &[Ball]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&i, &j| balls[j].radius.total_cmp(&balls[i].radius).then(i.cmp(&j)));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if kept.iter().all(|&k| !balls_meet(&balls[i], &balls[k])) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    #[test]
    fn single_and_duplicate() {
        let b = Ball::new(Point::new2(0.0, 0.0), 1.0).unwrap();
        assert_eq!(five_b_cover(&[b]), vec![0]);
        assert_eq!(five_b_cover(&[b, b]), vec![0]);
        assert!(five_b_cover(&[]).is_empty());
    }

    #[test]
    fn tangent_balls_are_disjoint() {
        let a = Ball::new(Point::new2(0.0, 0.0), 1.0).unwrap();
        let b = Ball::new(Point::new2(2.0, 0.0), 1.0).unwrap();
        assert!(!balls_meet(&a, &b));
        assert_eq!(five_b_cover(&[a, b]), vec![0, 1]);
    }
}
