use std::sync::OnceLock;

use num_bigint::BigUint;

use crate::count::BigCount;
use crate::error::{Error, Result};

/// Largest `n` in the published table.
pub const TABLE_MAX_N: usize = 90;

/// `θ(1)` through `θ(90)` as published with the A003407 extension.
const PUBLISHED: [&str; TABLE_MAX_N] = [
    "1",
    "2",
    "4",
    "10",
    "20",
    "48",
    "104",
    "282",
    "496",
    "1066",
    "2460",
    "6128",
    "12840",
    "29380",
    "74904",
    "212728",
    "368016",
    "659296",
    "1371056",
    "2937136",
    "6637232",
    "15616616",
    "38431556",
    "96547832",
    "198410168",
    "419141312",
    "941812088",
    "2181990978",
    "5624657008",
    "14765405996",
    "41918682488",
    "121728075232",
    "207996053184",
    "360257593216",
    "639536491376",
    "1144978334240",
    "2362611440576",
    "4911144118024",
    "10417809568016",
    "22388184630824",
    "50301508651032",
    "113605533519568",
    "265157938869936",
    "622473467900178",
    "1527398824248200",
    "3784420902143392",
    "9503564310606436",
    "23991783779046768",
    "48820872045382552",
    "99986771685259808",
    "209179575852808848",
    "441563057878399888",
    "992063519708141728",
    "2241540566114243168",
    "5185168615770591200",
    "12057653703359308256",
    "31151270610676979624",
    "81046346414827952010",
    "213208971281274232760",
    "563767895033816986864",
    "1612719155955443585092",
    "4640218386156695178110",
    "13557444070821420327240",
    "39911512393313043466768",
    "67867319248960144994224",
    "115643050433241064474672",
    "199272038058617170554928",
    "344053071167567188894208",
    "608578303898604406167840",
    "1080229099508551381463536",
    "1929269192569465070403584",
    "3452997322628833453585008",
    "7096327095079914521075040",
    "14611112240136930804928288",
    "30235147387260979648843264",
    "62757445134327428602306464",
    "132956581436718531491070160",
    "282272593229156186280461264",
    "605672649054377049472147568",
    "1302375489530691442230524528",
    "2914298247043287576460093712",
    "6537258415569149903366841040",
    "14713284774210886488265138336",
    "33155372641605493828236640928",
    "77219028670778815210019118736",
    "180104653062631494787580542664",
    "421733920870430143234318231648",
    "990082990967384066255452324186",
    "2428249522507620383597702223224",
    "5963505178650560845887322154368",
];

/// The published values `θ(1..=90)`, parsed once.
#[derive(Debug)]
pub struct GroundTruthTable {
    values: Vec<BigCount>,
    big: Vec<BigUint>,
}

impl GroundTruthTable {
    pub fn published() -> &'static GroundTruthTable {
        static TABLE: OnceLock<GroundTruthTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let values: Vec<BigCount> = PUBLISHED
                .iter()
                .map(|s| {
                    s.parse()
                        .expect("embedded table entry is a decimal integer")
                })
                .collect();
            let big = values.iter().map(BigUint::from).collect();
            GroundTruthTable { values, big }
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> Result<&BigCount> {
        self.values
            .get(n.wrapping_sub(1))
            .ok_or(Error::OutsideTable { n })
    }

    /// `θ(n)` as a `BigUint`. Panics outside `1..=90`; the verifiers only
    /// index within the table.
    pub(crate) fn theta(&self, n: usize) -> &BigUint {
        &self.big[n - 1]
    }

    /// `(n, θ(n))` for `n = 1..=90`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigCount)> {
        self.values.iter().enumerate().map(|(i, v)| (i + 1, v))
    }
}

/// Published `θ(n)` for `1 <= n <= 90`.
pub fn ground_truth(n: usize) -> Result<BigCount> {
    GroundTruthTable::published().get(n).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(ground_truth(15).unwrap().to_string(), "74904");
        assert_eq!(ground_truth(17).unwrap().to_string(), "368016");
        assert_eq!(
            ground_truth(64).unwrap().to_string(),
            "39911512393313043466768"
        );
        let last = ground_truth(90).unwrap();
        assert_eq!(last.to_string(), "5963505178650560845887322154368");
        assert_eq!(last.num_digits(), 31);
    }

    #[test]
    fn bounds() {
        assert_eq!(GroundTruthTable::published().len(), 90);
        assert!(matches!(ground_truth(0), Err(Error::OutsideTable { n: 0 })));
        assert!(matches!(
            ground_truth(91),
            Err(Error::OutsideTable { n: 91 })
        ));
    }

    #[test]
    fn strictly_increasing_from_one() {
        let t = GroundTruthTable::published();
        assert!(t.iter().zip(t.iter().skip(1)).all(|((_, a), (_, b))| a < b));
    }

    #[test]
    fn first_exceeds_u64_at_57() {
        let t = GroundTruthTable::published();
        let first = t.iter().find(|(_, v)| v.bits() > 64).unwrap().0;
        assert_eq!(first, 57);
    }
}
