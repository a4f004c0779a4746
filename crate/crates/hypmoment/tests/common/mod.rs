//! Worked degree-6 sequences shared across integration tests, entered in
//! degree-lexicographic order (X^d, X^{d-1}Y, …, Y^d per degree).
#![allow(dead_code)]

use hypmoment::scalar::{parse_rat, ratio, Rat};
use hypmoment::seq::{mono_pos, BivSeq, Curve};

fn sequence_from_table(k: usize, table: &[&str]) -> BivSeq<Rat> {
    let vals: Vec<Rat> = table.iter().map(|s| parse_rat(s).expect("bad literal")).collect();
    BivSeq::from_fn(k, |i, j| vals[mono_pos(i, j)].clone())
}

/// A degree-6 sequence on `y(1 - xy) = 0` that is positive semidefinite and
/// satisfies all curve identities yet admits no representing measure.
pub fn worked_hyp1_sequence() -> (BivSeq<Rat>, Curve) {
    let table = [
        "1", "3/4", "0", "3", "1/2", "5/16", "9/2", "0", "0", "0", "33/2", "5/4", "1/2",
        "5/16", "17/64", "69/2", "0", "0", "0", "0", "0", "231/2", "17/4", "5/4", "1/2",
        "5/16", "17/64", "81/256",
    ];
    (sequence_from_table(3, &table), Curve::Hyp1)
}

/// A degree-6 sequence on `y(x + y - xy) = 0` with a nine-atom minimal
/// representing measure reached through an irrational witness.
pub fn worked_hyp2_sequence() -> (BivSeq<Rat>, Curve) {
    let table = [
        "1",
        "11/50",
        "-13/100",
        "12397/18000",
        "-11/100",
        "2947/18000",
        "1001/1250",
        "-383/18000",
        "967/18000",
        "-1117/10000",
        "117670993/64800000",
        "-1843/90000",
        "73/2250",
        "-2609/45000",
        "7105993/64800000",
        "100001/31250",
        "-295967/64800000",
        "359/30000",
        "-383/15000",
        "3349033/64800000",
        "-103093/1000000",
        "1540453883617/233280000000",
        "-1469467/324000000",
        "479473/64800000",
        "-407/30000",
        "1694473/64800000",
        "-16656967/324000000",
        "23769383617/233280000000",
    ];
    (sequence_from_table(3, &table), Curve::Hyp2 { a: ratio(-1, 1) })
}

/// A degree-6 sequence on `y(2y + x^2 - y^2) = 0` with a nine-atom minimal
/// representing measure reached at the origin of the parameter region.
pub fn worked_hyp3_sequence() -> (BivSeq<Rat>, Curve) {
    let table = [
        "1",
        "37/54",
        "2/3",
        "769/648",
        "25/54",
        "1201/648",
        "11737/7776",
        "337/648",
        "12025/7776",
        "913/216",
        "258721/93312",
        "4825/7776",
        "169153/93312",
        "9625/2592",
        "957985/93312",
        "5088937/1119744",
        "72097/93312",
        "2497225/1119744",
        "136801/31104",
        "10813225/1119744",
        "2326373/93312",
        "115846129/13436928",
        "1107625/1119744",
        "38072593/13436928",
        "2034025/373248",
        "156268657/13436928",
        "27728525/1119744",
        "826264081/13436928",
    ];
    (sequence_from_table(3, &table), Curve::Hyp3 { a: ratio(2, 1) })
}
