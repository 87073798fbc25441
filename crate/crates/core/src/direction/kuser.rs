//! Direction sets for the K-user interference channel.
//!
//! Transmitter `i` uses every monomial `prod h_jl^{s_jl}` with `s_jj = 0`,
//! `0 <= s_ji <= n-1` on its own column and `0 <= s_jl <= n` elsewhere. The
//! interference hull relaxes the column bound to `n` for every transmitter.

use super::monomial::{DirectionSet, GainSymbol, Monomial};
use crate::error::{Error, Result};

/// Default cap on the number of enumerated directions.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

fn check_grid(k: usize, n: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "K must be at least 2, got {k}"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 1, got {n}"
        )));
    }
    Ok(())
}

/// `n^{K-1} (n+1)^{(K-1)^2}`, or `None` on overflow.
pub fn kuser_direction_count(k: usize, n: u32) -> Option<u128> {
    let km1 = u32::try_from(k - 1).ok()?;
    let a = (n as u128).checked_pow(km1)?;
    let b = (n as u128 + 1).checked_pow(km1.checked_mul(km1)?)?;
    a.checked_mul(b)
}

/// `(n+1)^{K(K-1)}`, or `None` on overflow.
pub fn interference_hull_count(k: usize, n: u32) -> Option<u128> {
    let e = u32::try_from(k * (k - 1)).ok()?;
    (n as u128 + 1).checked_pow(e)
}

fn capped(what: &'static str, count: Option<u128>, cap: u128) -> Result<()> {
    match count {
        Some(c) if c <= cap => Ok(()),
        Some(c) => Err(Error::CapExceeded {
            what,
            requested: c,
            cap,
        }),
        None => Err(Error::CapExceeded {
            what,
            requested: u128::MAX,
            cap,
        }),
    }
}

/// Enumerates all exponent assignments over the off-diagonal gains, with the
/// per-symbol upper bound supplied by `bound`.
fn enumerate_off_diagonal(k: usize, bound: impl Fn(usize, usize) -> u32) -> DirectionSet {
    let vars: Vec<(GainSymbol, u32)> = (1..=k)
        .flat_map(|j| (1..=k).map(move |l| (j, l)))
        .filter(|(j, l)| j != l)
        .map(|(j, l)| (GainSymbol::h(j, l), bound(j, l)))
        .collect();

    let mut exps = vec![0u32; vars.len()];
    let mut out = Vec::new();
    loop {
        out.push(Monomial::from_exponents(
            vars.iter().zip(&exps).map(|((s, _), &e)| (*s, e)),
        ));
        // odometer, last symbol fastest
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return out.into_iter().collect();
            }
            pos -= 1;
            if exps[pos] < vars[pos].1 {
                exps[pos] += 1;
                break;
            }
            exps[pos] = 0;
        }
    }
}

/// Transmit directions of user `i` (1-based).
pub fn generate_kuser_directions(k: usize, n: u32, i: usize, cap: u128) -> Result<DirectionSet> {
    check_grid(k, n)?;
    if i < 1 || i > k {
        return Err(Error::InvalidParameter(format!(
            "transmitter index {i} outside 1..={k}"
        )));
    }
    capped("transmit directions", kuser_direction_count(k, n), cap)?;
    Ok(enumerate_off_diagonal(
        k,
        |_, l| if l == i { n - 1 } else { n },
    ))
}

/// The hull `T_r` containing every received interference direction.
pub fn interference_hull(k: usize, n: u32, cap: u128) -> Result<DirectionSet> {
    check_grid(k, n)?;
    capped("interference hull", interference_hull_count(k, n), cap)?;
    Ok(enumerate_off_diagonal(k, |_, _| n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::monomial::received_directions;

    const CAP: u128 = DEFAULT_ENUMERATION_CAP;

    #[test]
    fn three_user_one() {
        assert_eq!(generate_kuser_directions(3, 1, 1, CAP).unwrap().len(), 16);
        assert_eq!(interference_hull(3, 1, CAP).unwrap().len(), 64);
    }

    #[test]
    fn small_grids() {
        assert_eq!(generate_kuser_directions(2, 1, 1, CAP).unwrap().len(), 2);
        assert_eq!(generate_kuser_directions(4, 1, 2, CAP).unwrap().len(), 512);
        assert_eq!(interference_hull(2, 1, CAP).unwrap().len(), 4);
        assert_eq!(interference_hull(3, 2, CAP).unwrap().len(), 729);
    }

    #[test]
    fn own_column_is_bounded_by_n_minus_one() {
        let t = generate_kuser_directions(3, 2, 2, CAP).unwrap();
        for m in &t {
            for j in 1..=3 {
                assert_eq!(m.exponent(GainSymbol::h(j, j)), 0);
                if j != 2 {
                    assert!(m.exponent(GainSymbol::h(j, 2)) <= 1);
                }
            }
        }
    }

    #[test]
    fn cross_gain_arrivals_stay_inside_hull() {
        let (k, n) = (3, 2);
        let hull = interference_hull(k, n, CAP).unwrap();
        for tx in 1..=k {
            let t = generate_kuser_directions(k, n, tx, CAP).unwrap();
            for rx in (1..=k).filter(|&rx| rx != tx) {
                assert!(received_directions(&t, GainSymbol::h(rx, tx)).is_subset(&hull));
            }
            let desired = received_directions(&t, GainSymbol::h(tx, tx));
            assert!(desired.is_disjoint(&hull));
        }
    }

    #[test]
    fn cap_is_enforced_before_enumeration() {
        let err = generate_kuser_directions(6, 5, 1, CAP).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
        let err = interference_hull(3, 2, 100).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                what: "interference hull",
                requested: 729,
                cap: 100
            }
        );
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(generate_kuser_directions(1, 1, 1, CAP).is_err());
        assert!(generate_kuser_directions(3, 0, 1, CAP).is_err());
        assert!(generate_kuser_directions(3, 1, 4, CAP).is_err());
        assert!(interference_hull(3, 0, CAP).is_err());
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = serde_json::to_string(&generate_kuser_directions(3, 1, 2, CAP).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_kuser_directions(3, 1, 2, CAP).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
