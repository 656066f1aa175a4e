use std::process::{Command, Output};

fn kronig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn table(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains('\r'));
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd
        .records()
        .map(|r| {
            r.unwrap()
                .iter()
                .map(|c| c.parse::<f64>().unwrap())
                .collect()
        })
        .collect();
    (header, rows)
}

fn col(h: &[String], name: &str) -> usize {
    h.iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

const REFERENCE_SWEEP: &[&str] = &[
    "transmit",
    "--v-ev",
    "0.5",
    "--gamma",
    "0.1",
    "--l-nm",
    "500",
    "--n",
    "50,100,500",
    "--emin-ev",
    "0.001",
    "--emax-ev",
    "1.0",
    "--steps",
    "2000",
];

#[test]
fn transmit_reproduction_table() {
    let out = kronig(REFERENCE_SWEEP);
    let (h, rows) = table(&out);
    assert_eq!(
        h,
        [
            "E_eV",
            "E_model",
            "S_N50",
            "S_N100",
            "S_N500",
            "log10_S_N50",
            "log10_S_N100",
            "log10_S_N500",
            "S_bar"
        ]
    );
    assert_eq!(rows.len(), 2000);
    let e = col(&h, "E_eV");
    assert!(rows.windows(2).all(|w| w[1][e] > w[0][e]));
    assert_eq!(rows[0][e], 0.001);
    assert_eq!(rows[1999][e], 1.0);
    for r in &rows {
        assert!(r.iter().all(|x| x.is_finite()));
        assert!(r[2..5].iter().all(|s| (0.0..=1.0).contains(s)));
    }
    // 17 significant digits per number
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first
        .split(',')
        .all(|c| c.trim_start_matches('-').split('e').next().unwrap().len() == 18));
}

#[test]
fn output_is_deterministic() {
    let a = kronig(REFERENCE_SWEEP);
    let b = kronig(REFERENCE_SWEEP);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn free_lattice_transmits_everything() {
    let (h, rows) = table(&kronig(&[
        "transmit", "--v-ev", "0", "--n", "7,30", "--steps", "50",
    ]));
    for name in ["S_N7", "S_N30", "S_bar"] {
        let c = col(&h, name);
        assert!(rows.iter().all(|r| r[c] == 1.0));
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("kronig-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.csv");
    let out = kronig(&[
        "transmit",
        "--steps",
        "5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 6);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn model_units_bypass_conversion() {
    let (h, rows) = table(&kronig(&[
        "transmit",
        "--model-units",
        "--v-ev",
        "10",
        "--l-nm",
        "40",
        "--emin-ev",
        "1",
        "--emax-ev",
        "2",
        "--steps",
        "2",
    ]));
    assert_eq!(rows[0][col(&h, "E_model")], 1.0);
    assert!((rows[0][col(&h, "E_eV")] - 0.038).abs() < 1e-17);
}

/// Sum of gaps between consecutive listed bands above `e_o`, as a share of
/// `[e_o, e_max]`.
fn gap_share(n: &str, e_o: f64, e_max: f64) -> f64 {
    let (h, rows) = table(&kronig(&["bands", "--n", n, "--xi-steps", "9"]));
    let (bi, ei) = (col(&h, "band_index"), col(&h, "E_model"));
    let mut ranges: Vec<(f64, f64)> = Vec::new();
    for r in &rows {
        let b = r[bi] as usize;
        if ranges.len() < b {
            ranges.push((f64::INFINITY, f64::NEG_INFINITY));
        }
        let g = &mut ranges[b - 1];
        *g = (g.0.min(r[ei]), g.1.max(r[ei]));
    }
    let gaps: f64 = ranges
        .windows(2)
        .map(|w| (w[1].0 - w[0].1.max(e_o)).max(0.0))
        .sum();
    gaps / (e_max - e_o)
}

#[test]
fn band_gaps_shrink_with_cell_count() {
    let e_o = 0.1 * (0.5 / 0.038) / 1.1;
    let coarse = gap_share("50", e_o, 1.0 / 0.038);
    let fine = gap_share("200", e_o, 1.0 / 0.038);
    assert!(fine < coarse, "{fine} vs {coarse}");
}

#[test]
fn bands_table_columns() {
    let (h, rows) = table(&kronig(&[
        "bands",
        "--n",
        "50",
        "--max-bands",
        "3",
        "--xi-steps",
        "17",
    ]));
    assert_eq!(h, ["band_index", "xi", "E_model", "E_ev", "E_continuum"]);
    assert_eq!(rows.len(), 3 * 17);
    let e_o = 0.1 * (0.5 / 0.038) / 1.1;
    for r in &rows {
        let xi = r[col(&h, "xi")];
        assert!((r[col(&h, "E_continuum")] - (e_o + xi * xi)).abs() <= 1e-12 * (e_o + xi * xi));
    }
}

#[test]
fn gapless_bands_are_one_parabola() {
    let (h, rows) = table(&kronig(&["bands", "--gamma", "0", "--xi-steps", "11"]));
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[col(&h, "band_index")] == 1.0));
    for r in &rows {
        let xi = r[col(&h, "xi")];
        assert!((r[col(&h, "E_model")] - xi * xi).abs() <= 1e-12 * xi * xi);
    }
}

#[test]
fn resist_rows_satisfy_definition() {
    let (h, rows) = table(&kronig(&["resist", "--n", "40", "--steps", "200"]));
    let (s, rho, lg) = (
        col(&h, "S_N40"),
        col(&h, "rho_N40"),
        col(&h, "log10_rho_N40"),
    );
    for r in &rows {
        if r[s] > 1e-12 && r[s] < 0.99 {
            assert!(((1.0 - r[s]) / r[s] - r[rho]).abs() <= 1e-10 * r[rho]);
        }
        if r[rho] > 0.0 && r[rho].is_finite() {
            assert!((r[rho].log10() - r[lg]).abs() <= 1e-12 * r[lg].abs().max(1.0));
        }
    }
}

#[test]
fn resist_length_sweep_below_threshold_is_linear_in_l() {
    let (h, rows) = table(&kronig(&[
        "resist",
        "--sweep",
        "length",
        "--e-rel",
        "0.5",
        "--lmin-nm",
        "200",
        "--lmax-nm",
        "800",
        "--steps",
        "61",
    ]));
    assert_eq!(rows.len(), 61);
    let (l, lg) = (col(&h, "L_model"), col(&h, "log10_rho_bar"));
    let slopes: Vec<f64> = rows
        .windows(2)
        .map(|w| (w[1][lg] - w[0][lg]) / (w[1][l] - w[0][l]))
        .collect();
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    assert!(slopes.iter().all(|s| (s - mean).abs() <= 1e-6 * mean));
}

#[test]
fn length_sweep_needs_an_energy() {
    let out = kronig(&["resist", "--sweep", "length"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn comb_tables() {
    let (h, rows) = table(&kronig(&[
        "comb",
        "--model-units",
        "--p-strength",
        "0",
        "--delta",
        "1",
        "--emax-ev",
        "40",
        "--xi-steps",
        "21",
    ]));
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[col(&h, "band_index")] == 1.0));

    let (h, rows) = table(&kronig(&[
        "comb",
        "--model-units",
        "--p-strength",
        "5",
        "--delta",
        "1",
        "--max-bands",
        "4",
        "--xi-steps",
        "33",
    ]));
    assert_eq!(rows.len(), 4 * 33);
    // band j tops out at k delta = j pi
    let (bi, ei) = (col(&h, "band_index"), col(&h, "E_model"));
    for j in 1..=4 {
        let top = rows
            .iter()
            .filter(|r| r[bi] == j as f64)
            .map(|r| r[ei])
            .fold(0.0, f64::max);
        assert!((top.sqrt() / std::f64::consts::PI - j as f64).abs() < 1e-6);
    }
}

#[test]
fn selfcheck_passes_and_catches_faults() {
    let out = kronig(&["selfcheck"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text
        .lines()
        .all(|l| l.starts_with("suite=") && l.contains(" status=pass ")));

    for fault in ["units", "chebyshev"] {
        let out = kronig(&["selfcheck", "--inject-fault", fault]);
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stdout).contains("status=fail"));
        assert!(String::from_utf8_lossy(&out.stderr).contains("self-check failed in suite"));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(kronig(&["transmit", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        kronig(&["transmit", "--steps", "many"]).status.code(),
        Some(2)
    );
    assert_eq!(kronig(&["bands", "--n", "5,6"]).status.code(), Some(2));
    assert_eq!(
        kronig(&["transmit", "--gamma", "-1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        kronig(&["transmit", "--emin-ev", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(kronig(&["transmit", "--n", "0"]).status.code(), Some(1));
    assert_eq!(
        kronig(&["comb", "--p-strength", "1", "--delta", "0"])
            .status
            .code(),
        Some(1)
    );
}
