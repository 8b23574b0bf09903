use crate::error::{Error, Result};
use crate::users::{User, UserSet};

/// The `size` users of `ground ∖ tau` that cyclically follow `s` in
/// ascending order.
pub fn beta_set(ground: &[User], tau: UserSet, s: User, size: usize) -> Result<Vec<User>> {
    let mut rest: Vec<User> = ground.iter().copied().filter(|u| !tau.contains(*u)).collect();
    rest.sort_unstable();
    let pos = rest
        .iter()
        .position(|&u| u == s)
        .ok_or_else(|| Error::InvalidConfig(format!("user {s} is not in ground minus tau")))?;
    if size + 1 > rest.len() {
        return Err(Error::InsufficientGround { available: rest.len() - 1, requested: size });
    }
    Ok((1..=size).map(|i| rest[(pos + i) % rest.len()]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[User]) -> UserSet {
        v.iter().copied().collect()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(beta_set(&[1, 2, 3, 4], UserSet::EMPTY, 1, 2).unwrap(), vec![2, 3]);
        assert_eq!(beta_set(&[1, 2, 3, 4], UserSet::EMPTY, 3, 2).unwrap(), vec![4, 1]);
        assert_eq!(beta_set(&[1, 4, 5], UserSet::EMPTY, 1, 1).unwrap(), vec![4]);
    }

    #[test]
    fn skips_tau() {
        assert_eq!(beta_set(&[6, 7, 8, 9], set(&[7]), 6, 1).unwrap(), vec![8]);
        assert_eq!(beta_set(&[6, 7, 8, 9], set(&[7]), 9, 2).unwrap(), vec![6, 8]);
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            beta_set(&[1, 2, 3], set(&[2]), 1, 2),
            Err(Error::InsufficientGround { available: 1, requested: 2 })
        ));
        assert!(beta_set(&[1, 2, 3], set(&[2]), 2, 1).is_err());
    }

    proptest! {
        #[test]
        fn window_properties(n in 2u32..12, t in 0u32..6, l in 1u32..6, seed in 0u32..1000) {
            prop_assume!(t + l <= n);
            let ground: Vec<User> = (1..=n).collect();
            // a pseudo-random τ of size t
            let mut pool = ground.clone();
            let mut tau = UserSet::EMPTY;
            let mut x = seed;
            for _ in 0..t {
                x = x.wrapping_mul(1103515245).wrapping_add(12345);
                let u = pool.remove((x as usize / 7) % pool.len());
                tau = tau.with(u);
            }
            let size = (l - 1) as usize;
            let mut appearances = vec![0usize; n as usize + 1];
            for s in pool.iter().copied() {
                let b = beta_set(&ground, tau, s, size).unwrap();
                prop_assert_eq!(b.len(), size);
                let bs: UserSet = b.iter().copied().collect();
                prop_assert_eq!(bs.len(), size);
                prop_assert!(bs.intersection(tau.with(s)).is_empty());
                for u in b {
                    appearances[u as usize] += 1;
                }
            }
            // every uncached user is a successor exactly L-1 times
            for &u in &pool {
                prop_assert_eq!(appearances[u as usize], size);
            }
        }
    }
}
