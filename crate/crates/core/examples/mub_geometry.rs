//! Computational, Fourier and chirp bases: unbiasedness and the Weyl relations.

use qrac::linalg::{
    computational_basis, fourier_basis, mub_overlap_check, omega, third_mub, weyl_x, weyl_z,
    Operator,
};

fn main() -> qrac::error::Result<()> {
    println!(" d   Z/F        Z/T        F/T        ZX - wXZ");
    for d in 2..=16 {
        let z = computational_basis(d)?;
        let f = fourier_basis(d)?;
        let t = third_mub(d)?;
        let (x, zz) = (weyl_x(d)?, weyl_z(d)?);
        let xz = &x * &zz;
        let wxz = Operator::from_fn(d, |i, j| omega(d) * xz.get(i, j));
        let commutation = (&zz * &x).max_abs_diff(&wxz);
        println!(
            "{d:>2}   {:.2e}   {:.2e}   {:.2e}   {:.2e}",
            mub_overlap_check(&z, &f)?,
            mub_overlap_check(&z, &t)?,
            mub_overlap_check(&f, &t)?,
            commutation
        );
    }
    println!("\nodd composite d (9, 15) break Fourier/chirp unbiasedness");
    Ok(())
}
