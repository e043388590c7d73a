//! Printed validation tables (designs, reported metrics, actual labels).

#![allow(dead_code)]

use lft_core::{ClassLabel, DesignPoint, Objective, Rule};

pub const VALIDATION_TABLES: &str = include_str!("../fixtures/validation_tables.csv");

#[derive(Debug, Clone)]
pub struct TableRow {
    pub objective: Objective,
    pub rule_class: ClassLabel,
    pub rule: String,
    pub no: u32,
    pub design: DesignPoint,
    pub sea: f64,
    /// CFE %, TEA kJ or mass kg depending on the table.
    pub secondary: f64,
    pub label: ClassLabel,
}

impl TableRow {
    pub fn parsed_rule(&self) -> Rule {
        Rule::parse(&self.rule, self.rule_class).expect("fixture rule parses")
    }
}

pub fn rows() -> Vec<TableRow> {
    VALIDATION_TABLES
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let num = |i: usize| f[i].parse::<f64>().unwrap();
            TableRow {
                objective: Objective::from_short(f[0]).unwrap(),
                rule_class: f[1].parse().unwrap(),
                rule: f[2].to_string(),
                no: f[3].parse().unwrap(),
                // columns: d, n, m, h, t
                design: DesignPoint::new(num(5) as u32, num(6) as u32, num(4), num(8), num(7)),
                sea: num(9),
                secondary: num(10),
                label: f[11].parse().unwrap(),
            }
        })
        .collect()
}

pub fn for_objective(o: Objective) -> Vec<TableRow> {
    rows().into_iter().filter(|r| r.objective == o).collect()
}
