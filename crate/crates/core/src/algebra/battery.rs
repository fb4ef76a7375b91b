use super::FiniteAlgebra;

macro_rules! files {
    ($($n:literal),* $(,)?) => {
        &[$(($n, include_str!(concat!("../../data/battery/", $n, ".json")))),*]
    };
}

const FILES: &[(&str, &str)] = files!(
    "00-chain2-identity",
    "01-chain2-trivial-operators",
    "02-chain3-shift",
    "03-diamond-identity",
    "04-diamond-swap",
    "05-chain4",
    "06-grid2x3",
    "07-boolean8",
    "08-v-poset",
    "09-n-poset",
);

/// Names and JSON sources of the fixed test battery.
pub fn battery_files() -> &'static [(&'static str, &'static str)] {
    FILES
}

pub fn battery() -> Vec<FiniteAlgebra> {
    FILES
        .iter()
        .map(|(n, src)| {
            let mut a = FiniteAlgebra::load_json(src).unwrap_or_else(|e| panic!("battery algebra {n}: {e}"));
            a.name = n.to_string();
            a
        })
        .collect()
}
