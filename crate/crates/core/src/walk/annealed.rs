use std::collections::BTreeMap;

use super::WalkError;
use crate::env::EnvironmentLaw;

/// Upper limit on the number of atom assignments an exact enumeration visits.
pub const MAX_ENUMERATION_TERMS: u64 = 10_000_000;

/// Per departure site: (right jumps, left jumps).
fn jump_counts(path: &[i64]) -> Result<BTreeMap<i64, (i32, i32)>, WalkError> {
    if path.is_empty() {
        return Err(WalkError::InvalidPath);
    }
    let mut counts = BTreeMap::new();
    for w in path.windows(2) {
        let c = counts.entry(w[0]).or_insert((0, 0));
        match w[1] - w[0] {
            1 => c.0 += 1,
            -1 => c.1 += 1,
            _ => return Err(WalkError::InvalidPath),
        }
    }
    Ok(counts)
}

fn atoms(law: &EnvironmentLaw) -> Result<Vec<(f64, f64)>, WalkError> {
    law.validate()?;
    match law {
        EnvironmentLaw::Deterministic { p } => Ok(vec![(*p, 1.0)]),
        EnvironmentLaw::FiniteSupport { atoms } => Ok(atoms.clone()),
        EnvironmentLaw::UniformInterval { .. } => Err(WalkError::UnsupportedLaw),
    }
}

/// Annealed probability of a path started at `path[0]`, by enumerating every
/// assignment of support atoms to the departure sites.
pub fn annealed_path_probability(law: &EnvironmentLaw, path: &[i64]) -> Result<f64, WalkError> {
    let atoms = atoms(law)?;
    let counts: Vec<(i32, i32)> = jump_counts(path)?.into_values().collect();
    let terms = (atoms.len() as f64).powi(counts.len() as i32);
    if terms > MAX_ENUMERATION_TERMS as f64 {
        return Err(WalkError::SupportTooLarge { terms, limit: MAX_ENUMERATION_TERMS });
    }
    // factor[s][a]: weight times step probabilities of atom `a` at site `s`
    let factor: Vec<Vec<f64>> = counts
        .iter()
        .map(|&(r, l)| atoms.iter().map(|&(p, w)| w * p.powi(r) * (1.0 - p).powi(l)).collect())
        .collect();
    let k = atoms.len();
    let mut digits = vec![0usize; counts.len()];
    let mut total = 0.0;
    loop {
        total += digits.iter().enumerate().map(|(s, &a)| factor[s][a]).product::<f64>();
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return Ok(total);
            }
            digits[pos] += 1;
            if digits[pos] < k {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Same quantity as a product of per-site moments `E[p^r q^l]`; valid for
/// every law, including continuous ones.
pub fn annealed_path_probability_factorized(law: &EnvironmentLaw, path: &[i64]) -> Result<f64, WalkError> {
    law.validate()?;
    Ok(jump_counts(path)?
        .into_values()
        .map(|(r, l)| law.expect(|p| p.powi(r) * (1.0 - p).powi(l)))
        .product())
}

/// Annealed probabilities of stepping to `next` after each of two prefixes
/// that end at the same site.
pub fn annealed_markov_violation(
    law: &EnvironmentLaw,
    prefix_a: &[i64],
    prefix_b: &[i64],
    next: i64,
) -> Result<(f64, f64), WalkError> {
    let (Some(&end_a), Some(&end_b)) = (prefix_a.last(), prefix_b.last()) else {
        return Err(WalkError::InvalidPrefixes);
    };
    if end_a != end_b || (next - end_a).abs() != 1 {
        return Err(WalkError::InvalidPrefixes);
    }
    if let [(p, _)] = atoms(law)?[..] {
        // a frozen environment: the walk is Markov
        let step = if next > end_a { p } else { 1.0 - p };
        return Ok((step, step));
    }
    let conditional = |prefix: &[i64]| -> Result<f64, WalkError> {
        let base = annealed_path_probability(law, prefix)?;
        if base <= 0.0 {
            return Err(WalkError::ZeroProbability);
        }
        let mut extended = prefix.to_vec();
        extended.push(next);
        Ok(annealed_path_probability(law, &extended)? / base)
    };
    Ok((conditional(prefix_a)?, conditional(prefix_b)?))
}
