fn main() {
    println!("metastab CLI scaffold");
}
