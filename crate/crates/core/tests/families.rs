use zeroset::condition;
use zeroset::families::{circle_base, pack_disks, replicate, scan_resolution};
use zeroset::topology::zero_set_signature;
use zeroset::Disk;

#[test]
fn replicated_field_is_one_outside_packed_disks() {
    let disk = Disk::centered(2, 2.0).unwrap();
    let packing = pack_disks(&disk, 4).unwrap();
    let f = replicate(&circle_base(2).unwrap(), &packing).unwrap();
    for p in disk.grid(1.0 / 32.0).all() {
        if packing.locate(p).is_none() {
            assert_eq!(f.value(p).unwrap(), 1.0);
        }
    }
}

#[test]
fn delta_does_not_degrade_and_betti_adds_up() {
    let base = circle_base(2).unwrap();
    let unit = Disk::centered(2, 1.0).unwrap();
    let base_delta = condition::delta_hypersurface(&base, &unit, unit.default_resolution()).unwrap().delta;
    let base_sig = zero_set_signature(&base, &unit, unit.default_resolution()).unwrap();
    let disk = Disk::centered(2, 2.0).unwrap();
    for m in [2, 4] {
        let packing = pack_disks(&disk, m).unwrap();
        let f = replicate(&base, &packing).unwrap();
        let h = scan_resolution(&disk, m);
        let d = condition::delta_hypersurface(&f, &disk, h).unwrap().delta;
        assert!(d >= base_delta * (1.0 - 1e-3), "m = {m}: {d} < {base_delta}");
        let sig = zero_set_signature(&f, &disk, h).unwrap();
        assert_eq!(sig.total_betti, packing.count() * base_sig.total_betti);
    }
}

#[test]
fn interval_packings_grow_linearly() {
    let disk = Disk::centered(1, 1.0).unwrap();
    let counts: Vec<usize> = [4, 8, 16, 32].iter().map(|&m| pack_disks(&disk, m).unwrap().count()).collect();
    for w in counts.windows(2) {
        let ratio = w[1] as f64 / w[0] as f64;
        assert!((1.6..=2.6).contains(&ratio), "{counts:?}");
    }
}
