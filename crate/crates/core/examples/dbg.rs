use classtower::qforms::*;
fn main() {
    for d in [-111i64, -308, -644, -564, -276, -219, -292, 876, -299, -660, -1092, -55, -39] {
        let s = class_group(d).unwrap();
        println!("d={d}: h={} h2={} two_sylow={:?} inv={:?}", s.h, s.h2, s.two_sylow, s.invariant_factors);
    }
    // h2 of radicands used by the tower parameter tables
    for n in [-77i64, -161, -141, -69, -219, -111, -39, -55] {
        println!("h2(Q(sqrt({n}))) [disc {}] = {}", field_discriminant(n), h2_of_radicand(n).unwrap());
    }
}
