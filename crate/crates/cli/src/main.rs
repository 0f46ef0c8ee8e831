fn main() {
    println!("snake");
}
