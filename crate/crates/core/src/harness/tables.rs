//! Bundled study configurations and the published power values they
//! reproduce.

use super::parse_config;
use super::PowerStudyConfig;
use crate::error::{Error, Result};

pub struct ReferenceTable {
    pub name: &'static str,
    pub config: &'static str,
    pub sample_sizes: &'static [usize],
    /// `(alternative label, power per sample size)`.
    pub values: &'static [(&'static str, &'static [f64])],
}

impl ReferenceTable {
    pub fn study(&self) -> Result<PowerStudyConfig> {
        parse_config(self.config)
    }

    pub fn reference(&self, label: &str, n: usize) -> Option<f64> {
        let col = self.sample_sizes.iter().position(|&m| m == n)?;
        self.values
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| v[col])
    }
}

const SIMPLE_SIZES: &[usize] = &[25, 50, 100, 250, 500, 1000];
const REGRESSION_SIZES: &[usize] = &[50, 100, 250, 500, 1000];

pub const REFERENCE_TABLES: &[ReferenceTable] = &[
    ReferenceTable {
        name: "a1",
        config: include_str!("../../configs/table_a1.conf"),
        sample_sizes: SIMPLE_SIZES,
        values: &[
            ("u=0", &[0.088, 0.069, 0.059, 0.053, 0.052, 0.051]),
            ("u=0.2", &[0.081, 0.064, 0.059, 0.067, 0.088, 0.134]),
            ("u=0.4", &[0.086, 0.103, 0.167, 0.359, 0.634, 0.906]),
            ("u=0.6", &[0.176, 0.315, 0.571, 0.929, 0.998, 1.000]),
            ("u=0.8", &[0.408, 0.703, 0.943, 1.000, 1.000, 1.000]),
            ("u=1", &[0.715, 0.951, 0.999, 1.000, 1.000, 1.000]),
        ],
    },
    ReferenceTable {
        name: "a2",
        config: include_str!("../../configs/table_a2.conf"),
        sample_sizes: SIMPLE_SIZES,
        values: &[
            ("sigma=1", &[0.088, 0.069, 0.059, 0.053, 0.052, 0.051]),
            ("sigma=1.05", &[0.079, 0.076, 0.094, 0.177, 0.315, 0.561]),
            ("sigma=1.1", &[0.099, 0.135, 0.238, 0.527, 0.827, 0.985]),
            ("sigma=1.15", &[0.143, 0.246, 0.453, 0.844, 0.988, 1.000]),
            ("sigma=1.2", &[0.211, 0.386, 0.674, 0.971, 1.000, 1.000]),
            ("sigma=1.5", &[0.718, 0.952, 0.999, 1.000, 1.000, 1.000]),
            ("sigma=2", &[0.984, 1.000, 1.000, 1.000, 1.000, 1.000]),
        ],
    },
    ReferenceTable {
        name: "a3",
        config: include_str!("../../configs/table_a3.conf"),
        sample_sizes: SIMPLE_SIZES,
        values: &[
            ("UniformC", &[0.069, 0.074, 0.092, 0.160, 0.277, 0.497]),
            ("UniformNC", &[0.185, 0.328, 0.585, 0.933, 0.998, 1.000]),
            ("ExpoC", &[0.244, 0.207, 0.249, 0.430, 0.687, 0.927]),
            ("ExpoNC", &[0.235, 0.430, 0.739, 0.986, 1.000, 1.000]),
            ("Cauchy(0 1)", &[0.891, 0.995, 1.000, 1.000, 1.000, 1.000]),
            ("Cauchy(0 2/pi)", &[0.408, 0.698, 0.943, 1.000, 1.000, 1.000]),
            ("T2", &[0.520, 0.827, 0.985, 1.000, 1.000, 1.000]),
            ("T3", &[0.310, 0.567, 0.865, 0.998, 1.000, 1.000]),
        ],
    },
    ReferenceTable {
        name: "a4",
        config: include_str!("../../configs/table_a4.conf"),
        sample_sizes: SIMPLE_SIZES,
        values: &[
            ("UniformC", &[0.077, 0.104, 0.202, 0.553, 0.916, 1.000]),
            ("UniformNC", &[0.358, 0.711, 0.973, 1.000, 1.000, 1.000]),
            ("ExpoC", &[0.238, 0.415, 1.000, 1.000, 1.000, 1.000]),
            ("ExpoNC", &[1.000, 1.000, 1.000, 1.000, 1.000, 1.000]),
            ("Cauchy(0 1)", &[0.172, 0.357, 0.813, 1.000, 1.000, 1.000]),
            ("Cauchy(0 2/pi)", &[0.044, 0.058, 0.138, 0.674, 0.998, 1.000]),
            ("T2", &[0.066, 0.089, 0.188, 0.681, 0.993, 1.000]),
            ("T3", &[0.048, 0.054, 0.085, 0.242, 0.660, 0.994]),
        ],
    },
    ReferenceTable {
        name: "a5",
        config: include_str!("../../configs/table_a5.conf"),
        sample_sizes: REGRESSION_SIZES,
        values: &[
            ("Size N(0 4)", &[0.063, 0.057, 0.052, 0.052, 0.051]),
            ("CLogN(0 0.94062)", &[0.156, 0.285, 0.633, 0.914, 0.997]),
            ("Cauchy(0 2/pi)", &[0.213, 0.268, 0.387, 0.472, 0.597]),
            ("MA(0.5 0.25)", &[0.300, 0.512, 0.891, 0.996, 1.000]),
            ("AR(0.5)", &[0.308, 0.550, 0.919, 0.998, 1.000]),
            ("AR(1)", &[0.962, 1.000, 1.000, 1.000, 1.000]),
            ("AR(0.5 0.25 0.125)", &[0.586, 0.899, 1.000, 1.000, 1.000]),
        ],
    },
    ReferenceTable {
        name: "a6",
        config: include_str!("../../configs/table_a6.conf"),
        sample_sizes: REGRESSION_SIZES,
        values: &[
            ("Size N(0 4)", &[0.029, 0.037, 0.042, 0.047, 0.052]),
            ("CLogN(0 0.94062)", &[0.986, 1.000, 1.000, 1.000, 1.000]),
            ("Cauchy(0 2/pi)", &[0.984, 1.000, 1.000, 1.000, 1.000]),
            ("MA(0.5 0.25)", &[0.034, 0.043, 0.052, 0.059, 0.064]),
            ("AR(0.5)", &[0.036, 0.046, 0.057, 0.061, 0.067]),
            ("AR(1)", &[0.333, 0.641, 0.887, 0.969, 0.993]),
            ("AR(0.5 0.25 0.125)", &[0.078, 0.150, 0.255, 0.304, 0.334]),
        ],
    },
];

/// Looks up a bundled table by name (`a1` … `a6`, case-insensitive, with or
/// without a `table_` prefix).
pub fn bundled_config(name: &str) -> Result<&'static ReferenceTable> {
    let key = name.trim().to_ascii_lowercase();
    let key = key.strip_prefix("table_").unwrap_or(&key);
    REFERENCE_TABLES
        .iter()
        .find(|t| t.name == key)
        .ok_or_else(|| Error::Config(format!("unknown table `{name}` (expected a1 … a6)")))
}

/// Published power for `(table, alternative label, n)`.
pub fn reference_power(table: &str, label: &str, n: usize) -> Option<f64> {
    bundled_config(table).ok()?.reference(label, n)
}
