/// Nontrivial solution of `z² ≡ a x² + b y²` mod p^5 with a unit coordinate.
pub fn hilbert_oracle(a: i64, b: i64, p: i64) -> i8 {
    let m = p.pow(5);
    let mut square = vec![false; m as usize];
    let mut unit_square = vec![false; m as usize];
    for z in 0..m {
        let r = (z * z % m) as usize;
        square[r] = true;
        unit_square[r] |= z % p != 0;
    }
    for x in 0..m {
        for y in 0..m {
            let r = (a * x * x + b * y * y).rem_euclid(m) as usize;
            let unit_xy = x % p != 0 || y % p != 0;
            if (unit_xy && square[r]) || unit_square[r] {
                return 1;
            }
        }
    }
    -1
}
