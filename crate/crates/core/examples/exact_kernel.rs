//! Exact rank, kernel, solve and inverse over the rationals.

use piforge::exactlin::{
    fmt_rational, frac, int, invert, kernel_basis, rref, solve, QMatrix, Rational,
};

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rational).collect();
    format!("({})", parts.join(", "))
}

fn main() {
    // Columns are the dimensions of m [M], k [M T^-2], t [T].
    let a = QMatrix::from_i64(&[&[1, 1, 0], &[0, -2, 1]]);
    let r = rref(&a);
    println!("matrix: {a}");
    println!("rank {} with pivot columns {:?}", r.rank, r.pivot_cols);
    for v in kernel_basis(&a) {
        println!("kernel vector {}", show(&v));
    }
    let x = solve(&a, &[int(1), int(0)]).expect("b is in the column space");
    println!("solve a x = (1, 0): x = {}", show(&x));

    let m = QMatrix::from_rows(2, vec![vec![int(2), int(0)], vec![int(0), frac(1, 2)]]).unwrap();
    println!("inverse of\n{m}\nis\n{}", invert(&m).unwrap());
    let singular = QMatrix::from_i64(&[&[1, 1], &[1, 1]]);
    println!(
        "inverse of a rank-1 matrix: {:?}",
        invert(&singular).unwrap_err()
    );
}
