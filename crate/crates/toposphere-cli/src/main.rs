fn main() {
    println!("toposphere");
}
