//! Generalized automorphisms: nonsingular transformation matrices `T` that
//! map the code onto itself, together with the weight-over-permutation
//! bookkeeping used to rank them as ensemble paths.

use std::path::Path;

use crate::code::{self, LinearCode};
use crate::gf2::BitMatrix;
use crate::Error;

/// The exponents the ensemble construction draws from: the group generated
/// by `T` under multiplication and inversion, truncated to `T^±1`, `T^±2`.
pub const SUPPORTED_EXPONENTS: [i32; 4] = [1, -1, 2, -2];

/// A nonsingular transformation matrix with its cached inverse and
/// weight over permutation.
#[derive(Clone, Debug)]
pub struct GenAutomorphism {
    t: BitMatrix,
    t_inv: BitMatrix,
    delta: usize,
    is_permutation: bool,
}

impl GenAutomorphism {
    /// Wraps `t`, computing the inverse; fails if `t` is singular.
    pub fn new(t: BitMatrix) -> Result<Self, Error> {
        assert!(t.is_square(), "transformation matrix must be square");
        let t_inv = t.inverse().ok_or(Error::Singular)?;
        Ok(Self::from_parts(t, t_inv))
    }

    /// Wraps a pre-inverted pair; `t * t_inv = I` is the caller's contract
    /// (checked in debug builds).
    fn from_parts(t: BitMatrix, t_inv: BitMatrix) -> Self {
        debug_assert_eq!(t.mul(&t_inv), BitMatrix::identity(t.rows()));
        let delta = weight_over_permutation(&t);
        debug_assert!(delta >= 0, "nonsingular matrices have at least n ones");
        let is_permutation = is_permutation_matrix(&t);
        GenAutomorphism {
            t,
            t_inv,
            delta: delta as usize,
            is_permutation,
        }
    }

    pub fn identity(n: usize) -> Self {
        let i = BitMatrix::identity(n);
        Self::from_parts(i.clone(), i)
    }

    pub fn t(&self) -> &BitMatrix {
        &self.t
    }

    pub fn t_inv(&self) -> &BitMatrix {
        &self.t_inv
    }

    /// Weight over permutation, total ones minus n.
    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn is_permutation(&self) -> bool {
        self.is_permutation
    }

    pub fn n(&self) -> usize {
        self.t.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.t == BitMatrix::identity(self.n())
    }
}

/// Weight over permutation of a square matrix: total ones minus n.
/// Zero exactly for permutation matrices.
pub fn weight_over_permutation(t: &BitMatrix) -> i64 {
    assert!(t.is_square(), "weight over permutation needs a square matrix");
    t.count_ones() as i64 - t.rows() as i64
}

fn is_permutation_matrix(t: &BitMatrix) -> bool {
    if !t.is_square() || weight_over_permutation(t) != 0 {
        return false;
    }
    let n = t.rows();
    (0..n).all(|r| t.row_weight(r) == 1) && (0..n).all(|c| (0..n).filter(|&r| t.get(r, c)).count() == 1)
}

/// True iff `t` is nonsingular and maps the code into itself, checked on the
/// generator basis: `h * (t * g) = 0` for every basis vector `g`.
pub fn verify_automorphism(t: &BitMatrix, code: &LinearCode) -> bool {
    assert!(
        t.is_square() && t.rows() == code.n(),
        "transformation matrix must be {n}x{n} for a length-{n} code",
        n = code.n()
    );
    if t.inverse().is_none() {
        return false;
    }
    code.generator()
        .iter()
        .all(|g| code::syndrome(code.h(), &t.mul_vec(g)).is_zero())
}

/// `t` raised to a supported exponent (1, -1, 2, -2).
pub fn power(t: &BitMatrix, exponent: i32) -> Result<BitMatrix, Error> {
    let t_inv = || t.inverse().ok_or(Error::Singular);
    match exponent {
        1 => Ok(t.clone()),
        -1 => t_inv(),
        2 => Ok(t.mul(t)),
        -2 => {
            let inv = t_inv()?;
            Ok(inv.mul(&inv))
        }
        other => Err(Error::InvalidConfig(format!(
            "unsupported automorphism exponent {other}; supported: {SUPPORTED_EXPONENTS:?}"
        ))),
    }
}

/// Expands `t` into the requested powers, each wrapped with its cached
/// inverse and weight over permutation.
pub fn automorphism_powers(
    t: &BitMatrix,
    exponents: &[i32],
) -> Result<Vec<GenAutomorphism>, Error> {
    let t_inv = t.inverse().ok_or(Error::Singular)?;
    exponents
        .iter()
        .map(|&e| {
            let (fwd, inv) = match e {
                1 => (t.clone(), t_inv.clone()),
                -1 => (t_inv.clone(), t.clone()),
                2 => (t.mul(t), t_inv.mul(&t_inv)),
                -2 => (t_inv.mul(&t_inv), t.mul(t)),
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unsupported automorphism exponent {other}; supported: {SUPPORTED_EXPONENTS:?}"
                    )))
                }
            };
            Ok(GenAutomorphism::from_parts(fwd, inv))
        })
        .collect()
}

/// Loads a transformation matrix from a dense 0/1 text file and verifies it
/// against the code. Unverified matrices are refused unless `force` is set
/// (useful for deliberately non-automorphic graph-construction inputs).
pub fn load_transformation(
    path: &Path,
    code: &LinearCode,
    force: bool,
) -> Result<GenAutomorphism, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let t = code::parse_dense(&text)?;
    if t.rows() != code.n() || t.cols() != code.n() {
        return Err(Error::InvalidCode(format!(
            "transformation matrix is {}x{}, expected {n}x{n}",
            t.rows(),
            t.cols(),
            n = code.n()
        )));
    }
    if !force && !verify_automorphism(&t, code) {
        return Err(Error::NotAnAutomorphism(format!(
            "{} does not map the code into itself (pass --force to use it anyway)",
            path.display()
        )));
    }
    GenAutomorphism::new(t)
}

/// Exhaustive permutation-automorphism search over S_n, for n <= 8.
///
/// A test oracle: returns every permutation matrix (identity included) that
/// maps the code into itself.
pub fn find_permutation_automorphisms(code: &LinearCode) -> Result<Vec<BitMatrix>, Error> {
    let n = code.n();
    if n > 8 {
        return Err(Error::EnumerationTooLarge { k: n, cap: 8 });
    }
    let mut found = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut t = BitMatrix::zeros(n, n);
        for (j, &i) in p.iter().enumerate() {
            t.set(j, i, true);
        }
        if code
            .generator()
            .iter()
            .all(|g| code::syndrome(code.h(), &t.mul_vec(g)).is_zero())
        {
            found.push(t);
        }
    });
    Ok(found)
}

fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::for_each_codeword;
    use std::collections::HashSet;

    fn t_example() -> BitMatrix {
        BitMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 1], vec![1, 0, 1]])
    }

    fn h_example() -> BitMatrix {
        BitMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 0]])
    }

    fn repetition_code(n: usize) -> LinearCode {
        let mut rows = Vec::new();
        for i in 0..n - 1 {
            let mut row = vec![0u8; n];
            row[i] = 1;
            row[i + 1] = 1;
            rows.push(row);
        }
        LinearCode::from_pcm(BitMatrix::from_rows(&rows)).unwrap()
    }

    #[test]
    fn delta_of_identity_is_zero() {
        assert_eq!(weight_over_permutation(&BitMatrix::identity(5)), 0);
    }

    #[test]
    fn delta_of_example_matrix() {
        assert_eq!(weight_over_permutation(&t_example()), 2);
    }

    #[test]
    fn identity_is_always_an_automorphism() {
        let code = LinearCode::from_pcm(h_example()).unwrap();
        assert!(verify_automorphism(&BitMatrix::identity(3), &code));
    }

    #[test]
    fn example_matrix_is_not_an_automorphism_of_example_code() {
        let code = LinearCode::from_pcm(h_example()).unwrap();
        assert!(!verify_automorphism(&t_example(), &code));
    }

    #[test]
    fn cyclic_shift_preserves_repetition_code() {
        let code = repetition_code(3);
        let shift = BitMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert!(verify_automorphism(&shift, &code));
    }

    #[test]
    fn power_one_is_t_itself() {
        assert_eq!(power(&t_example(), 1).unwrap(), t_example());
    }

    #[test]
    fn powers_multiply_to_identity() {
        let auts = automorphism_powers(&t_example(), &[1, -1]).unwrap();
        assert_eq!(auts[0].t().mul(auts[1].t()), BitMatrix::identity(3));
    }

    #[test]
    fn square_of_example_matrix() {
        let expected = BitMatrix::from_rows(&[vec![1, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(power(&t_example(), 2).unwrap(), expected);
    }

    #[test]
    fn unsupported_exponent_is_rejected() {
        assert!(matches!(
            power(&t_example(), 3),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        assert!(matches!(GenAutomorphism::new(m.clone()), Err(Error::Singular)));
        assert!(matches!(
            automorphism_powers(&m, &[1]),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn permutation_search_finds_cyclic_group_of_repetition_code() {
        let code = repetition_code(3);
        let found = find_permutation_automorphisms(&code).unwrap();
        // Every permutation fixes {000, 111}.
        assert_eq!(found.len(), 6);
    }

    #[test]
    fn permutation_search_rejects_large_n() {
        let code = repetition_code(9);
        assert!(find_permutation_automorphisms(&code).is_err());
    }

    #[test]
    fn verified_automorphism_is_injective_on_codewords() {
        let code = repetition_code(3);
        let shift = BitMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert!(verify_automorphism(&shift, &code));
        let mut images = HashSet::new();
        let mut count = 0;
        for_each_codeword(code.generator(), |x| {
            let image = shift.mul_vec(x);
            assert!(code.is_codeword(&image));
            images.insert(image.to_bits());
            count += 1;
        });
        assert_eq!(images.len(), count);
    }

    mod properties {
        use super::*;
        use rand::rngs::StdRng;
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};

        fn random_permutation(rng: &mut StdRng, n: usize) -> BitMatrix {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut t = BitMatrix::zeros(n, n);
            for (j, &i) in perm.iter().enumerate() {
                t.set(j, i, true);
            }
            t
        }

        fn random_unit_upper_triangular(rng: &mut StdRng, n: usize) -> BitMatrix {
            let mut t = BitMatrix::identity(n);
            for r in 0..n {
                for c in r + 1..n {
                    if rng.gen::<bool>() {
                        t.set(r, c, true);
                    }
                }
            }
            t
        }

        #[test]
        fn delta_zero_iff_permutation() {
            let mut rng = StdRng::seed_from_u64(21);
            for _ in 0..50 {
                let n = rng.gen_range(2..=16);
                let p = GenAutomorphism::new(random_permutation(&mut rng, n)).unwrap();
                assert_eq!(p.delta(), 0);
                assert!(p.is_permutation());

                let u = GenAutomorphism::new(random_unit_upper_triangular(&mut rng, n)).unwrap();
                assert_eq!(u.delta() == 0, u.is_permutation());
                assert_eq!(u.is_permutation(), u.is_identity());
            }
        }

        #[test]
        fn cached_inverse_is_consistent_for_all_powers() {
            let mut rng = StdRng::seed_from_u64(22);
            for _ in 0..20 {
                let n = rng.gen_range(2..=12);
                let t = random_unit_upper_triangular(&mut rng, n);
                for aut in automorphism_powers(&t, &SUPPORTED_EXPONENTS).unwrap() {
                    assert_eq!(aut.t().mul(aut.t_inv()), BitMatrix::identity(n));
                }
            }
        }

        #[test]
        fn verified_maps_send_codewords_to_codewords() {
            let code = repetition_code(5);
            let mut rng = StdRng::seed_from_u64(23);
            for _ in 0..10 {
                let t = random_permutation(&mut rng, 5);
                assert!(verify_automorphism(&t, &code));
                for_each_codeword(code.generator(), |x| {
                    assert!(code.is_codeword(&t.mul_vec(x)));
                });
            }
        }
    }
}
