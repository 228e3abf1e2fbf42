use std::fmt::Write as _;
use std::path::PathBuf;

use cerny_lab::bounds::{check_conjecture_spf, check_conjecture_t3, BoundReport};
use cerny_lab::canonical::SupportRole;
use cerny_lab::gamesim::{expected_win, simulate, GameConfig};
use cerny_lab::reachability::{default_t_ell_cap, t_ell as find_t_ell, triple_rendezvous_time};
use cerny_lab::spf::{curve_point, CurveOptions};
use cerny_lab::{
    canonicalize_support, cerny, k_from_decomposition, rat, random_automaton, rational_string, spf_at, tr,
    ColumnTable, CurvePoint, Rational, SearchError,
};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::input::load;
use crate::render::{float12, print_json, rational, rationals, states, word};
use crate::{Family, UsageError, Verdict};

type Outcome = Result<Verdict, UsageError>;

pub fn validate(input: &str, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let sync = aut.is_synchronizing();
    let sc = aut.is_strongly_connected();
    if as_json {
        let letters: Vec<Vec<usize>> = (0..aut.m())
            .map(|l| aut.letter(l).iter().map(|t| t + 1).collect())
            .collect();
        print_json(
            "validate",
            json!({
                "n": aut.n(),
                "m": aut.m(),
                "letters": letters,
                "synchronizing": sync,
                "strongly_connected": sc,
            }),
        );
    } else {
        println!("states={}", aut.n());
        println!("letters={}", aut.m());
        println!("synchronizing={sync}");
        println!("strongly_connected={sc}");
    }
    Ok(Verdict::Ok)
}

pub fn gen(family: Family, n: usize, m: Option<usize>, seed: u64) -> Outcome {
    let aut = match (family, m) {
        (Family::Cerny, None) => cerny(n)?,
        (Family::Tr, None) => tr(n)?,
        (Family::Random, Some(m)) => random_automaton(n, m, seed)?,
        (Family::Random, None) => return Err(UsageError("gen random needs N and M".into())),
        (_, Some(_)) => return Err(UsageError("only the random family takes a letter count".into())),
    };
    print!("{}", aut.to_text());
    Ok(Verdict::Ok)
}

fn search_failure(command: &str, err: SearchError, as_json: bool) -> Outcome {
    let (kind, detail) = match &err {
        SearchError::Saturated { at } => ("saturated", json!({ "at": at })),
        SearchError::CapReached { cap } => ("cap_reached", json!({ "cap": cap })),
        SearchError::InvalidArgument(msg) => return Err(UsageError(msg.clone())),
    };
    if as_json {
        print_json(
            command,
            json!({ "found": false, "reason": kind, "detail": detail, "message": err.to_string() }),
        );
    } else {
        println!("found=false");
        println!("reason={err}");
    }
    Ok(Verdict::Negative)
}

pub fn reset_word(input: &str, cap: Option<usize>, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let cap = cap.unwrap_or_else(|| aut.default_reset_cap());
    match aut.shortest_reset_word(cap) {
        Ok(w) => {
            let target = aut.run(0, &w);
            if as_json {
                print_json(
                    "reset-word",
                    json!({ "found": true, "length": w.len(), "word": word(&aut, &w), "target": target + 1 }),
                );
            } else {
                println!("length={}", w.len());
                println!("word={}", w.render(&aut));
                println!("target={}", target + 1);
            }
            Ok(Verdict::Ok)
        }
        Err(e) => search_failure("reset-word", e, as_json),
    }
}

pub fn t_ell(input: &str, ell: usize, cap: Option<usize>, as_json: bool, command: &str) -> Outcome {
    let aut = load(input)?;
    let cap = cap.unwrap_or_else(|| default_t_ell_cap(aut.n()).max(1));
    let result = if ell == 3 {
        triple_rendezvous_time(&aut, cap)
    } else {
        find_t_ell(&aut, ell, cap)
    };
    match result {
        Ok(r) => {
            if as_json {
                print_json(
                    command,
                    json!({
                        "found": true,
                        "ell": ell,
                        "t": r.t,
                        "witness": word(&aut, &r.witness),
                        "merged": states(&r.merged_states),
                        "target": r.target + 1,
                    }),
                );
            } else {
                println!("t{ell}={}", r.t);
                println!("witness={}", r.witness.render(&aut));
                println!("merged={}", r.merged_states);
                println!("target={}", r.target + 1);
            }
            Ok(Verdict::Ok)
        }
        Err(e) => search_failure(command, e, as_json),
    }
}

pub fn columns(input: &str, t: usize, csv: bool, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let table = ColumnTable::build(&aut, t);
    let matrix = table.matrix();
    if as_json {
        let cols: Vec<Value> = (0..table.len())
            .map(|j| {
                let meta = table.meta(j);
                json!({
                    "index": j + 1,
                    "states": states(table.column(j)),
                    "first_time": meta.first_time,
                    "witness": word(&aut, &table.witness(j)),
                    "target": meta.target + 1,
                })
            })
            .collect();
        let blocks: Vec<usize> = (0..=t).map(|s| table.block(s).len()).collect();
        print_json(
            "columns",
            json!({ "t": t, "n": aut.n(), "m_t": table.len(), "block_sizes": blocks, "matrix": matrix, "columns": cols }),
        );
    } else if csv {
        let header: Vec<String> = (1..=table.len()).map(|j| format!("c{j}")).collect();
        println!("state,{}", header.join(","));
        for (i, row) in matrix.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            println!("{},{}", i + 1, cells.join(","));
        }
    } else {
        for row in &matrix {
            let cells: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            println!("{}", cells.join(" "));
        }
    }
    Ok(Verdict::Ok)
}

/// `k(0..=t_max)`, one program per distinct `A(t)`, evaluated in parallel.
fn curve(table: &ColumnTable, t_max: usize, opts: CurveOptions) -> Vec<CurvePoint> {
    let reps: Vec<usize> = (0..=t_max)
        .filter(|&t| t == 0 || table.len_at(t) != table.len_at(t - 1))
        .collect();
    let points: Vec<CurvePoint> = reps.par_iter().map(|&t| curve_point(table, t, opts)).collect();
    let mut out = Vec::with_capacity(t_max + 1);
    let mut idx = 0;
    for t in 0..=t_max {
        if idx + 1 < reps.len() && reps[idx + 1] == t {
            idx += 1;
        }
        let mut point = points[idx].clone();
        point.t = t;
        out.push(point);
    }
    out
}

fn curve_csv(points: &[CurvePoint], dim_q: bool) -> String {
    let mut out = String::from("t,k_num,k_den,k_float,m_t,dim_P");
    if dim_q {
        out.push_str(",dim_Q");
    }
    out.push('\n');
    let opt = |d: Option<usize>| d.map(|d| d.to_string()).unwrap_or_default();
    for p in points {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            p.t,
            p.k.numer(),
            p.k.denom(),
            float12(&p.k),
            p.m,
            opt(p.dim_p)
        );
        if dim_q {
            let _ = write!(out, ",{}", opt(p.dim_q));
        }
        out.push('\n');
    }
    out
}

pub fn spf(input: &str, t_max: usize, csv: Option<PathBuf>, dim_q: bool, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let table = ColumnTable::build(&aut, t_max);
    let opts = CurveOptions { dim_p: true, dim_q };
    let points = curve(&table, t_max, opts);
    let to_stdout = csv.as_ref().is_some_and(|p| p.as_os_str() == "-");
    if let Some(path) = csv.as_ref().filter(|_| !to_stdout) {
        std::fs::write(path, curve_csv(&points, dim_q)).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    }
    if to_stdout {
        print!("{}", curve_csv(&points, dim_q));
    } else if as_json {
        let rows: Vec<Value> = points
            .iter()
            .map(|p| {
                let mut row = json!({ "t": p.t, "k": rational(&p.k), "m_t": p.m, "dim_p": p.dim_p });
                if dim_q {
                    row["dim_q"] = json!(p.dim_q);
                }
                row
            })
            .collect();
        print_json("spf", json!({ "n": aut.n(), "t_max": t_max, "points": rows }));
    } else {
        let mut header = format!("{:>4}  {:>12}  {:>16}  {:>6}  {:>5}", "t", "k", "k_float", "m_t", "dim_P");
        if dim_q {
            header.push_str(&format!("  {:>5}", "dim_Q"));
        }
        println!("{header}");
        for p in &points {
            let mut line = format!(
                "{:>4}  {:>12}  {:>16}  {:>6}  {:>5}",
                p.t,
                rational_string(&p.k),
                float12(&p.k),
                p.m,
                p.dim_p.map(|d| d.to_string()).unwrap_or_default()
            );
            if dim_q {
                line.push_str(&format!("  {:>5}", p.dim_q.map(|d| d.to_string()).unwrap_or_default()));
            }
            println!("{line}");
        }
    }
    Ok(Verdict::Ok)
}

fn role_name(role: &SupportRole) -> String {
    match role {
        SupportRole::Singleton => "singleton".into(),
        SupportRole::PairEdge => "pair".into(),
        SupportRole::CycleEdge { cycle } => format!("cycle{}", cycle + 1),
    }
}

pub fn strategies(input: &str, t: usize, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let n = aut.n();
    let table = ColumnTable::build(&aut, t);
    let sol = spf_at(&aut, &table);
    sol.verify(table.columns())
        .map_err(|e| UsageError(format!("internal: certificate failed: {e}")))?;
    let column_json = |j: usize, mass: Option<&Rational>| {
        let mut v = json!({
            "column": j + 1,
            "states": states(table.column(j)),
            "witness": word(&aut, &table.witness(j)),
            "target": table.meta(j).target + 1,
        });
        if let Some(m) = mass {
            v["mass"] = rational(m);
        }
        v
    };
    let support: Vec<usize> = (0..table.len()).filter(|&j| sol.q[j].is_positive()).collect();
    let canonical = canonicalize_support(table.columns(), &sol).and_then(|(q, s)| {
        let (k, _, _) = k_from_decomposition(&s)?;
        Ok((q, s, k))
    });
    if as_json {
        let canon = match &canonical {
            Ok((q, s, k)) => json!({
                "available": true,
                "k": rational(k),
                "singletons": s.singletons,
                "pairs": s.pairs,
                "odd_cycles": s.cycles.iter().map(|c| c.iter().map(|v| v + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "elements": s.elements.iter().map(|e| {
                    let mut v = column_json(e.column, Some(&q[e.column]));
                    v["role"] = json!(role_name(&e.role));
                    v
                }).collect::<Vec<_>>(),
            }),
            Err(e) => json!({ "available": false, "reason": e.to_string() }),
        };
        print_json(
            "strategies",
            json!({
                "t": t,
                "n": n,
                "m_t": table.len(),
                "k": rational(&sol.k),
                "p": rationals(&sol.p),
                "q": support.iter().map(|&j| column_json(j, Some(&sol.q[j]))).collect::<Vec<_>>(),
                "critical_columns": sol.critical_columns.iter().map(|&j| column_json(j, None)).collect::<Vec<_>>(),
                "canonical": canon,
            }),
        );
        return Ok(Verdict::Ok);
    }
    println!("t={t}");
    println!("k={}", rational_string(&sol.k));
    let p: Vec<String> = sol.p.iter().map(rational_string).collect();
    println!("p={}", p.join(" "));
    println!("q:");
    for &j in &support {
        println!(
            "  column {} {} word={} mass={}",
            j + 1,
            table.column(j),
            table.witness(j).render(&aut),
            rational_string(&sol.q[j])
        );
    }
    let crit: Vec<String> = sol
        .critical_columns
        .iter()
        .map(|&j| format!("{}{}", j + 1, table.column(j)))
        .collect();
    println!("critical={}", crit.join(" "));
    match &canonical {
        Ok((q, s, k)) => {
            println!(
                "canonical: singletons={} pairs={} odd_cycles={} k=2/(n+n1)={}",
                s.singletons,
                s.pairs,
                s.cycles.len(),
                rational_string(k)
            );
            for e in &s.elements {
                println!(
                    "  column {} {} {} mass={}",
                    e.column + 1,
                    e.states,
                    role_name(&e.role),
                    rational_string(&q[e.column])
                );
            }
        }
        Err(e) => println!("canonical: unavailable ({e})"),
    }
    Ok(Verdict::Ok)
}

pub fn bounds(input: &str, measure: bool, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let report = if measure {
        BoundReport::measure(&aut)
    } else {
        BoundReport::new(aut.n())
    };
    let violations = report.violations();
    let best = report.t3_combined.iter().min_by_key(|&&(s, b)| (b, s)).copied();
    if as_json {
        let measured = report.measured.as_ref().map(|m| {
            json!({
                "synchronizing": m.synchronizing,
                "strongly_connected": m.strongly_connected,
                "reset_threshold": m.reset_threshold,
                "t3": m.t3,
            })
        });
        print_json(
            "bounds",
            json!({
                "n": report.n,
                "pin_frankl": report.pin_frankl,
                "t3_naive": report.t3_naive,
                "t3_quarter": report.t3_quarter,
                "t3_combined": report.t3_combined.iter().map(|&(s, b)| json!({"s": s, "bound": b})).collect::<Vec<_>>(),
                "t3_sqrt": report.t3_sqrt.map(|b| json!({"floor": b.floor, "ceil": b.ceil, "compared_against": "floor"})),
                "measured": measured,
                "violations": violations,
            }),
        );
    } else {
        println!("{:<14}{}", "n", report.n);
        println!("{:<14}{}", "pin_frankl", report.pin_frankl);
        println!("{:<14}{}", "t3_naive", report.t3_naive);
        println!("{:<14}{}", "t3_quarter", report.t3_quarter);
        match best {
            Some((s, b)) => println!("{:<14}{b} (s={s}, minimum over 1<=s<=n/2)", "t3_combined"),
            None => println!("{:<14}n/a (needs n >= 2)", "t3_combined"),
        }
        match report.t3_sqrt {
            Some(b) => println!(
                "{:<14}floor {} / ceil {} (T_3 is compared against the floor)",
                "t3_sqrt", b.floor, b.ceil
            ),
            None => println!("{:<14}n/a (needs n >= 4)", "t3_sqrt"),
        }
        if let Some(m) = &report.measured {
            let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_else(|| "none".into());
            println!(
                "{:<14}synchronizing={} strongly_connected={} reset_threshold={} t3={}",
                "measured",
                m.synchronizing,
                m.strongly_connected,
                opt(m.reset_threshold),
                opt(m.t3)
            );
            if violations.is_empty() {
                println!("{:<14}none", "violations");
            }
            for v in &violations {
                println!("{:<14}{v}", "violation");
            }
        }
    }
    Ok(if violations.is_empty() {
        Verdict::Ok
    } else {
        Verdict::Negative
    })
}

pub fn check_conjectures(input: &str, t_max: usize, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let n = aut.n();
    let table = ColumnTable::build(&aut, t_max);
    let points = curve(&table, t_max, CurveOptions::default());
    let spf = check_conjecture_spf(n, &points);
    let t3 = triple_rendezvous_time(&aut, default_t_ell_cap(n).max(1))
        .ok()
        .map(|r| check_conjecture_t3(n, &r));
    let t3_holds = t3.as_ref().is_none_or(|c| c.holds);
    if as_json {
        let spf_json = json!({
            "holds": spf.holds(),
            "checked_j": spf.checked,
            "violation": spf.violation.as_ref().map(|v| json!({
                "j": v.j, "t": v.t, "k": rational(&v.k), "threshold": rational(&v.threshold),
            })),
        });
        let t3_json = match &t3 {
            Some(c) => json!({ "applicable": true, "holds": c.holds, "t3": c.t3, "limit": c.limit }),
            None => json!({ "applicable": false, "holds": true }),
        };
        print_json(
            "check-conjectures",
            json!({ "n": n, "t_max": t_max, "spf_conjecture": spf_json, "t3_conjecture": t3_json }),
        );
    } else {
        match &spf.violation {
            Some(v) => println!(
                "spf_conjecture=violated j={} t={} k={} threshold={}",
                v.j,
                v.t,
                rational_string(&v.k),
                rational_string(&v.threshold)
            ),
            None => {
                let js: Vec<String> = spf.checked.iter().map(|j| j.to_string()).collect();
                println!("spf_conjecture=holds checked_j={}", js.join(","));
            }
        }
        match &t3 {
            Some(c) if c.holds => println!("t3_conjecture=holds t3={} limit={}", c.t3, c.limit),
            Some(c) => println!("t3_conjecture=violated t3={} limit={}", c.t3, c.limit),
            None => println!("t3_conjecture=not_applicable (no three states can be merged)"),
        }
    }
    Ok(if spf.holds() && t3_holds {
        Verdict::Ok
    } else {
        Verdict::Negative
    })
}

fn parse_rational(v: &Value) -> Result<Rational, UsageError> {
    let bad = || UsageError(format!("not a rational: {v}"));
    match v {
        Value::Number(x) => x.as_i64().map(|i| rat(i, 1)).ok_or_else(bad),
        Value::String(s) => {
            let (num, den) = s.split_once('/').unwrap_or((s.as_str(), "1"));
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(rat(num, den))
        }
        Value::Object(o) => {
            let num = o.get("num").ok_or_else(bad).and_then(parse_rational)?;
            let den = o.get("den").ok_or_else(bad).and_then(parse_rational)?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(num / den)
        }
        _ => Err(bad()),
    }
}

fn strategy_file(path: &str) -> Result<(Vec<Rational>, Vec<Rational>), UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| UsageError(format!("{path}: {e}")))?;
    let list = |key: &str| -> Result<Vec<Rational>, UsageError> {
        v.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| UsageError(format!("{path}: missing array {key:?}")))?
            .iter()
            .map(parse_rational)
            .collect()
    };
    Ok((list("p")?, list("q")?))
}

pub fn game_sim(input: &str, t: usize, rounds: u64, seed: u64, strategy: &str, as_json: bool) -> Outcome {
    let aut = load(input)?;
    let n = aut.n();
    let table = ColumnTable::build(&aut, t);
    let (p, q) = match strategy {
        "optimal" => {
            let sol = spf_at(&aut, &table);
            (sol.p, sol.q)
        }
        "uniform" => (
            vec![rat(1, n as i64); n],
            vec![rat(1, table.len() as i64); table.len()],
        ),
        path => strategy_file(path)?,
    };
    let exact = expected_win(table.columns(), &p, &q)?;
    let cfg = GameConfig {
        t,
        p,
        q,
        rounds,
        seed,
    };
    let res = simulate(&aut, &table, &cfg)?;
    let mu = cerny_lab::rational_to_f64(&exact);
    let sigma = (mu * (1.0 - mu) / rounds.max(1) as f64).sqrt();
    let z = if sigma > 0.0 {
        (res.frequency - mu) / sigma
    } else {
        0.0
    };
    if as_json {
        print_json(
            "game-sim",
            json!({
                "t": t,
                "strategy": strategy,
                "seed": seed,
                "rounds": res.rounds,
                "wins": res.wins,
                "frequency": format!("{:.6}", res.frequency),
                "stderr": format!("{:.6}", res.stderr),
                "expected": rational(&exact),
                "z": format!("{z:.3}"),
            }),
        );
    } else {
        println!("rounds={}", res.rounds);
        println!("wins={}", res.wins);
        println!("frequency={:.6}", res.frequency);
        println!("stderr={:.6}", res.stderr);
        println!("expected={} ({})", rational_string(&exact), float12(&exact));
        println!("z={z:.3}");
    }
    Ok(Verdict::Ok)
}
