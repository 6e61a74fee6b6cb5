use metastab::dynamics::DynamicsSpec;
use metastab::ladder::{realize, z_membership, StripAxis};
use metastab::lattice::LatticeDims;
use metastab::taxonomy::{Located, Taxonomy};
use metastab::testfn::TestFunction;

fn main() {
    let dims = LatticeDims::new(11, 12).unwrap();
    let tf = TestFunction::build(dims, DynamicsSpec::cyclic(3), vec![1], vec![2]).unwrap();
    let tax = Taxonomy::new(&tf);
    // L-tree {(0,0),(1,0),(1,1)} = bits 0,1,12 in the (1,3) strip at ell=0
    let mask: u32 = (1 << 0) | (1 << 1) | (1 << 12);
    let ltree = realize(mask, 11, dims, 3, 1, 3, 0, StripAxis::Rows);
    println!("z_membership: {:?}", z_membership(&ltree, 1, 3));
    println!("value(ltree) = {:?}", tax.value(&ltree, false));
    println!("z_value = {}", tf.z_value(1, 3, mask, false));
    // the target: L-tree with (0,1) rotated back to 2
    let target = ltree.rotate_back(dims.index(0, 1));
    println!("target site spin {}", target.get(dims.index(0, 1)));
    println!("value(target) = {:?}", tax.value(&target, false));
}
