use super::Clustering;
use crate::error::{Error, Result};

/// Shannon entropy (natural log) of a partition.
pub fn entropy(c: &Clustering) -> f64 {
    let n = c.len() as f64;
    c.sizes()
        .into_iter()
        .filter(|&s| s > 0)
        .map(|s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information (natural log) between two partitions of the same set.
pub fn mutual_information(c: &Clustering, d: &Clustering) -> Result<f64> {
    if c.len() != d.len() {
        return Err(Error::Input(format!("partitions cover {} and {} nodes", c.len(), d.len())));
    }
    let n = c.len() as f64;
    let mut table = vec![0usize; c.groups * d.groups];
    for (&a, &b) in c.assignment.iter().zip(&d.assignment) {
        table[a * d.groups + b] += 1;
    }
    let (rows, cols) = (c.sizes(), d.sizes());
    let mut mi = 0.0;
    for a in 0..c.groups {
        for b in 0..d.groups {
            let nij = table[a * d.groups + b];
            if nij == 0 {
                continue;
            }
            let nij = nij as f64;
            mi += nij / n * (n * nij / (rows[a] as f64 * cols[b] as f64)).ln();
        }
    }
    Ok(mi.max(0.0))
}

/// `2 I(C, D) / (H(C) + H(D))`, or 1 when both partitions are trivial.
pub fn nmi(c: &Clustering, d: &Clustering) -> Result<f64> {
    let mi = mutual_information(c, d)?;
    let denom = entropy(c) + entropy(d);
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * mi / denom).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(a: &[usize]) -> Clustering {
        let g = a.iter().max().map_or(0, |m| m + 1);
        Clustering::new(a.to_vec(), g).unwrap()
    }

    #[test]
    fn self_nmi_is_one() {
        let c = part(&[0, 0, 1, 2, 2, 1]);
        assert!((nmi(&c, &c).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn relabeled_split_is_one() {
        let c = part(&[0, 0, 1, 1]);
        let d = part(&[1, 1, 0, 0]);
        assert!((nmi(&c, &d).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn independent_balanced_partitions_are_zero() {
        let c = part(&[0, 0, 1, 1]);
        let d = part(&[0, 1, 0, 1]);
        assert!(nmi(&c, &d).unwrap().abs() < 1e-15);
    }

    #[test]
    fn trivial_partitions() {
        let one = part(&[0, 0, 0]);
        assert_eq!(nmi(&one, &one).unwrap(), 1.0);
        assert_eq!(nmi(&one, &part(&[0, 1, 2])).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_sizes() {
        assert!(matches!(nmi(&part(&[0, 1]), &part(&[0, 1, 1])), Err(Error::Input(_))));
    }
}
