use std::collections::{BTreeSet, HashMap};

use super::BitangentRecord;
use crate::numkernel::{singular_values, RankCertificate, ToleranceProfile};
use crate::plane::{constraint_matrix, ProjPoint};
use crate::{Error, Result};

/// Outcome of the conic test on the 8 contact points of four bitangents.
#[derive(Debug, Clone)]
pub struct Syzygy {
    pub syzygetic: bool,
    pub certificate: RankCertificate,
}

/// Four bitangents are syzygetic iff their 8 contact points lie on a conic.
pub fn is_syzygetic(quad: [&BitangentRecord; 4], profile: &ToleranceProfile) -> Result<Syzygy> {
    let points: Vec<ProjPoint> = quad.iter().flat_map(|b| b.contacts.iter().cloned()).collect();
    for (i, p) in points.iter().enumerate() {
        if points[i + 1..].iter().any(|q| p.distance(q) < profile.eps_point) {
            return Err(Error::NonGeneric("contact points of the quadruple coincide".into()));
        }
    }
    let sv = singular_values(&constraint_matrix(2, &points, &[]));
    let certificate = RankCertificate::from_spectrum(sv, profile.eps_rank);
    let gray = certificate.claimed_rank == 6
        && certificate.singular_values[5] < profile.eps_rank.sqrt() * certificate.singular_values[0];
    if gray || !certificate.accepted(profile.eps_rank) {
        return Err(Error::AmbiguousRank {
            context: "conic through 8 contact points".into(),
            certificate,
        });
    }
    Ok(Syzygy {
        syzygetic: certificate.claimed_rank <= 5,
        certificate,
    })
}

/// A two-torsion class, given by its 6 bitangent pairs (indices into the
/// bitangent list). Equality ignores the representative.
#[derive(Debug, Clone)]
pub struct TwoTorsionClass {
    pairs: [(usize, usize); 6],
    representative: (usize, usize),
}

impl PartialEq for TwoTorsionClass {
    fn eq(&self, other: &Self) -> bool {
        self.pairs == other.pairs
    }
}

impl Eq for TwoTorsionClass {}

fn ordered(p: (usize, usize)) -> (usize, usize) {
    (p.0.min(p.1), p.0.max(p.1))
}

impl TwoTorsionClass {
    pub fn new(pairs: Vec<(usize, usize)>, representative: (usize, usize)) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().map(ordered).collect();
        pairs.sort();
        pairs.dedup();
        let representative = ordered(representative);
        if pairs.len() != 6 {
            return Err(Error::CountMismatch {
                what: "bitangent pairs in a two-torsion class".into(),
                expected: 6,
                found: pairs.len(),
            });
        }
        let support: BTreeSet<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        if support.len() != 12 {
            return Err(Error::CountMismatch {
                what: "bitangents in the support of a two-torsion class".into(),
                expected: 12,
                found: support.len(),
            });
        }
        if !pairs.contains(&representative) {
            return Err(Error::InvalidInput("representative pair is not in the class".into()));
        }
        Ok(Self {
            pairs: pairs.try_into().expect("six pairs"),
            representative,
        })
    }

    pub fn pairs(&self) -> &[(usize, usize); 6] {
        &self.pairs
    }

    pub fn representative(&self) -> (usize, usize) {
        self.representative
    }

    pub fn with_representative(&self, pair: (usize, usize)) -> Result<Self> {
        Self::new(self.pairs.to_vec(), pair)
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.contains(&ordered(pair))
    }

    /// The 12 bitangents occurring in the class.
    pub fn support(&self) -> BTreeSet<usize> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// The bitangent paired with `b` in this class.
    pub fn partner(&self, b: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&(x, y)| {
            if x == b {
                Some(y)
            } else if y == b {
                Some(x)
            } else {
                None
            }
        })
    }
}

/// The class of the bitangent pair `pair`: all pairs syzygetic with it.
pub fn alpha_class(bt: &[BitangentRecord], pair: (usize, usize), profile: &ToleranceProfile) -> Result<TwoTorsionClass> {
    let (i, j) = ordered(pair);
    if i == j || j >= bt.len() {
        return Err(Error::InvalidInput(format!(
            "bitangent pair ({i}, {j}) must name two distinct bitangents out of {}",
            bt.len()
        )));
    }
    let mut pairs = vec![(i, j)];
    for k in 0..bt.len() {
        for l in k + 1..bt.len() {
            if [k, l].iter().any(|x| *x == i || *x == j) {
                continue;
            }
            if is_syzygetic([&bt[i], &bt[j], &bt[k], &bt[l]], profile)?.syzygetic {
                pairs.push((k, l));
            }
        }
    }
    TwoTorsionClass::new(pairs, (i, j))
}

/// All 63 classes with a lookup from pairs to class index.
#[derive(Debug, Clone)]
pub struct ClassTable {
    pub classes: Vec<TwoTorsionClass>,
    index: HashMap<(usize, usize), usize>,
}

pub const CLASS_COUNT: usize = 63;

/// Exhaustive classification of the 378 bitangent pairs, checking that
/// every class is pairwise syzygetic and that the classes partition the pairs.
pub fn classify_all(bt: &[BitangentRecord], profile: &ToleranceProfile) -> Result<ClassTable> {
    let mut classes = Vec::new();
    let mut index = HashMap::new();
    for i in 0..bt.len() {
        for j in i + 1..bt.len() {
            if index.contains_key(&(i, j)) {
                continue;
            }
            let class = alpha_class(bt, (i, j), profile)?;
            for (a, &p) in class.pairs.iter().enumerate() {
                if index.contains_key(&p) {
                    return Err(Error::NonGeneric(format!(
                        "pair {p:?} falls into two different classes"
                    )));
                }
                for &q in &class.pairs[a + 1..] {
                    let quad = [&bt[p.0], &bt[p.1], &bt[q.0], &bt[q.1]];
                    if !is_syzygetic(quad, profile)?.syzygetic {
                        return Err(Error::NonGeneric(format!(
                            "pairs {p:?} and {q:?} of one class are not syzygetic"
                        )));
                    }
                }
            }
            for &p in &class.pairs {
                index.insert(p, classes.len());
            }
            classes.push(class);
        }
    }
    if classes.len() != CLASS_COUNT {
        return Err(Error::CountMismatch {
            what: "two-torsion classes".into(),
            expected: CLASS_COUNT,
            found: classes.len(),
        });
    }
    Ok(ClassTable { classes, index })
}

impl ClassTable {
    pub fn class_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.index.get(&ordered(pair)).copied()
    }

    /// Index of the sum of two classes, `None` for the zero class.
    pub fn sum(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        let (ca, cb) = (&self.classes[a], &self.classes[b]);
        let shared = ca.support().intersection(&cb.support()).next().copied()?;
        let x = ca.partner(shared)?;
        let y = cb.partner(shared)?;
        self.class_of((x, y))
    }

    pub fn pairing(&self, a: usize, b: usize) -> u8 {
        weil_pairing(&self.classes[a], &self.classes[b])
    }
}

/// The Weil pairing: the parity of the number of bitangents of a
/// representative pair of `b` that lie in the support of `a`.
pub fn weil_pairing(a: &TwoTorsionClass, b: &TwoTorsionClass) -> u8 {
    if a == b {
        return 0;
    }
    let support = a.support();
    let (x, y) = b.representative;
    ((support.contains(&x) as u8) + (support.contains(&y) as u8)) % 2
}

/// The Weil pairing read off the size of the common support: two distinct
/// classes share 4 bitangents when they pair to 0 and 6 when they pair to 1.
pub fn weil_pairing_by_support(a: &TwoTorsionClass, b: &TwoTorsionClass) -> Result<u8> {
    if a == b {
        return Ok(0);
    }
    match a.support().intersection(&b.support()).count() {
        4 => Ok(0),
        6 => Ok(1),
        n => Err(Error::NonGeneric(format!("two classes share {n} bitangents"))),
    }
}
