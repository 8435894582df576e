use g2kit::config::Format;
use g2kit::io::{format_number, parse_curve, render};
use g2kit_core::regression::g2_curve;
use g2kit_core::{Complex, CorrelationCurve, SystemParams, TauGrid};
use proptest::prelude::*;

fn curve_strategy() -> impl Strategy<Value = CorrelationCurve> {
    (2usize..12, any::<bool>(), any::<bool>()).prop_flat_map(|(len, with_g2, with_err)| {
        let finite = -1e3f64..1e3;
        (
            prop::collection::vec((finite.clone(), finite), len),
            prop::collection::vec(0.0f64..10.0, len),
            prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), len),
            0.01f64..100.0,
        )
            .prop_map(move |(g1, g2, err, tau_max)| {
                let grid = TauGrid::uniform(tau_max, len - 1).unwrap();
                let errors = with_err.then(|| err.iter().copied().unzip());
                CorrelationCurve::new(
                    grid.points().to_vec(),
                    g1.into_iter().map(|(re, im)| Complex::new(re, im)).collect(),
                    (with_g2 || with_err).then_some(g2),
                    errors,
                    f64::NAN,
                )
                .unwrap()
            })
    })
}

fn same_values(a: &CorrelationCurve, b: &CorrelationCurve) -> bool {
    a.tau_grid == b.tau_grid && a.g1 == b.g1 && a.g2 == b.g2 && a.g1_err == b.g1_err && a.g2_err == b.g2_err
}

proptest! {
    #[test]
    fn csv_and_json_round_trip_exactly(curve in curve_strategy()) {
        let from_csv = parse_curve(&render(&curve, Format::Csv)).unwrap();
        let from_json = parse_curve(&render(&curve, Format::Json)).unwrap();
        prop_assert!(same_values(&curve, &from_csv));
        prop_assert!(same_values(&from_csv, &from_json));
    }

    #[test]
    fn seventeen_digits_are_enough(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }
}

#[test]
fn csv_layout() {
    let curve = g2_curve(&SystemParams::real(1.0, 0.2, 0.0, 0.5), &TauGrid::uniform(5.0, 100).unwrap()).unwrap();
    let text = render(&curve, Format::Csv);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,g1_re,g1_im,g2");
    assert_eq!(lines.len(), 102);
    let g2_zero: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!((g2_zero - 2.16).abs() <= 1e-9);
}

#[test]
fn missing_g2_is_an_empty_cell_and_null() {
    let curve =
        CorrelationCurve::new(vec![0.0, 1.0], vec![Complex::new(1.0, 0.0), Complex::new(0.5, 0.5)], None, None, 1.0)
            .unwrap();
    assert!(render(&curve, Format::Csv).lines().nth(1).unwrap().ends_with(','));
    assert!(render(&curve, Format::Json).contains("\"g2\": null"));
    assert_eq!(parse_curve(&render(&curve, Format::Json)).unwrap().g2, None);
}

#[test]
fn malformed_files_are_config_errors() {
    for text in [
        "",
        "tau,g1_re,g1_im\n0,1,0\n",
        "tau,g1_re,g1_im,g2\n0,1,0,x\n",
        "tau,g1_re,g1_im,g2\n0,1,0,2\n0,1,0,1\n",
        "tau,g1_re,g1_im,g2\n0,1,0,2\n1,1,0,\n",
        "[{\"tau\": 0, \"g1_re\": 1}]",
        "[{\"tau\": 0, \"g1_re\": 1, \"g1_im\": 0, \"g2\": 1, \"extra\": 3}]",
        "[]",
    ] {
        let err = parse_curve(text).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text:?}: {err}");
    }
}
