fn main() {
    println!("braidlat");
}
