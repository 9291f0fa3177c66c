use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpmbm::assignment::{murty_kbest, CostMatrix};

fn enumerate(c: &CostMatrix<f64>) -> Vec<(f64, Vec<usize>)> {
    fn rec(c: &CostMatrix<f64>, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<(f64, Vec<usize>)>) {
        let row = cur.len();
        if row == c.rows() {
            let total = cur.iter().enumerate().map(|(r, &col)| c.get(r, col)).fold(0.0, |a, b| a + b);
            out.push((total, cur.clone()));
            return;
        }
        for col in 0..c.cols() {
            if !used[col] && c.is_allowed(row, col) {
                used[col] = true;
                cur.push(col);
                rec(c, used, cur, out);
                cur.pop();
                used[col] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(c, &mut vec![false; c.cols()], &mut Vec::new(), &mut out);
    out
}

fn sorted(mut v: Vec<(f64, Vec<usize>)>) -> Vec<(f64, Vec<usize>)> {
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    v
}

/// Returns the number of matrices checked and a description of the first mismatch.
pub fn check(n: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut total = 0;
    for i in 0..n {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(rows..=8);
        let integer = rng.gen_bool(0.5);
        let entries = (0..rows * cols)
            .map(|_| match (rng.gen_bool(0.2), integer) {
                (true, _) => f64::INFINITY,
                (false, true) => rng.gen_range(-4..5) as f64,
                (false, false) => rng.gen_range(-20.0..20.0),
            })
            .collect();
        let c = CostMatrix::new(rows, cols, entries).map_err(|e| e.to_string())?;
        let want = sorted(enumerate(&c));
        let got = sorted(murty_kbest(&c, want.len() + 5).into_iter().map(|a| (a.total_cost, a.row_to_column)).collect());
        if got != want {
            return Err(format!("matrix {i} ({rows}x{cols}): {} assignments, expected {}", got.len(), want.len()));
        }
        total += want.len();
    }
    Ok(format!("{n} matrices, {total} assignments, exact"))
}
