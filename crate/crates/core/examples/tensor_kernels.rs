//! The two numerical primitives: axis contraction and sign-fixed QR.
//!
//! cargo run -p sphere-dmrg --example tensor_kernels

use sphere_dmrg::tensor::{column_orthonormality_defect, contract, qr_orthonormalize, Tensor};

fn main() -> sphere_dmrg::Result<()> {
    // (2, 3, 2) contracted with (3, 2) over the middle/first axes -> (2, 2, 2)
    let a = Tensor::new(vec![2, 3, 2], (0..12).map(f64::from).collect())?;
    let b = Tensor::matrix(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0])?;
    let c = contract(&a, &[1], &b, &[0])?;
    println!("contract {:?} x {:?} -> {:?}", a.shape(), b.shape(), c.shape());
    println!("  data = {:?}", c.data());

    let dot = contract(
        &Tensor::vector(vec![1.0, 2.0])?,
        &[0],
        &Tensor::vector(vec![3.0, 4.0])?,
        &[0],
    )?;
    println!("[1, 2] . [3, 4] = {}", dot.scalar_value());

    let m = Tensor::matrix(4, 2, vec![1.0, 2.0, 3.0, -1.0, 0.5, 4.0, -2.0, 1.0])?;
    let (q, t) = qr_orthonormalize(&m)?;
    println!("qr of a 4x2 matrix:");
    println!("  |q^T q - I|_max = {:e}", column_orthonormality_defect(&q)?);
    println!("  |q t - m|_max   = {:e}", q.matmul(&t)?.max_abs_diff(&m));
    println!("  diag(t)         = [{}, {}]", t.get(&[0, 0]), t.get(&[1, 1]));

    let singular = Tensor::matrix(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0])?;
    match qr_orthonormalize(&singular) {
        Err(e) => println!("rank-deficient input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
