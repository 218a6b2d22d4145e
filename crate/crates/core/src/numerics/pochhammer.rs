use super::Scalar;

/// Rising factorial `x (x+1) ... (x+k-1)`; `1` when `k == 0`.
pub fn pochhammer<S: Scalar>(x: &S, k: usize) -> S {
    let mut acc = S::one();
    let mut factor = x.clone();
    for _ in 0..k {
        if factor.is_zero() {
            return S::zero();
        }
        acc = acc * &factor;
        factor = factor + S::one();
    }
    acc
}

/// `prod_j (x_j)_k`, the bracket notation `[x]_k`.
pub fn pochhammer_product<S: Scalar>(xs: &[S], k: usize) -> S {
    xs.iter()
        .fold(S::one(), |acc, x| acc * pochhammer(x, k))
}
