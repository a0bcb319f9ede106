//! Two planar conformal gradients are never rank-one connected: for
//! `Fᵢ = aᵢ id + bᵢ J`, `det(F₁ − F₂) = (a₁−a₂)² + (b₁−b₂)²`.

use hyperlab::field::{cso2, jump_check, RANK_TOL};
use hyperlab::sampling::{random_cso2, rng};
use hyperlab::tensor::Mat2;

fn main() {
    let laminate = jump_check(&Mat2::identity(), &Mat2::from_rows([[1.0, 1.0], [0.0, 1.0]]), RANK_TOL);
    println!("id vs id + e1(x)e2: rank {}, singular values {:?}", laminate.rank, laminate.difference_singular_values);

    let mut r = rng(2024);
    let mut min_det = f64::INFINITY;
    let mut ranks = [0usize; 3];
    for _ in 0..100_000 {
        let ((a1, b1), (a2, b2)) = (random_cso2(&mut r), random_cso2(&mut r));
        let j = jump_check(&cso2(a1, b1), &cso2(a2, b2), RANK_TOL);
        ranks[j.rank] += 1;
        min_det = min_det.min(j.det_difference);
    }
    println!("100000 conformal pairs: ranks 0/1/2 = {ranks:?}, smallest det(F1 - F2) = {min_det:.3e}");
}
