use carleman_cli::{Format, Table, Value};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO | prop::num::f64::NEGATIVE
}

fn table(xs: &[f64], n: u64) -> Table {
    let mut t = Table::new("density", &["a", "b", "c"]);
    for &x in xs {
        t.rows.push(vec![Value::Float(x), Value::Int(n), Value::Missing]);
    }
    t
}

proptest! {
    #[test]
    fn csv_floats_round_trip(xs in prop::collection::vec(finite(), 0..20), n in any::<u64>()) {
        let t = table(&xs, n);
        let mut buf = Vec::new();
        t.write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        prop_assert_eq!(lines.next().unwrap(), "# carleman-scatter density schema=1");
        prop_assert_eq!(lines.next().unwrap(), "a,b,c");
        let mut count = 0;
        for (line, &x) in lines.zip(&xs) {
            let cells: Vec<&str> = line.split(',').collect();
            prop_assert_eq!(cells.len(), 3);
            prop_assert_eq!(cells[0].parse::<f64>().unwrap().to_bits(), x.to_bits());
            prop_assert_eq!(cells[1].parse::<u64>().unwrap(), n);
            count += 1;
        }
        prop_assert_eq!(count, xs.len());
    }

    #[test]
    fn json_floats_round_trip(xs in prop::collection::vec(finite(), 0..20)) {
        let t = table(&xs, 7);
        let mut buf = Vec::new();
        t.write(Format::Json, &mut buf).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let rows = doc["rows"].as_array().unwrap();
        prop_assert_eq!(rows.len(), xs.len());
        for (row, &x) in rows.iter().zip(&xs) {
            prop_assert_eq!(row["a"].as_f64().unwrap().to_bits(), x.to_bits());
            prop_assert!(row["c"].is_null());
        }
    }
}
