//! Multi-controlled NOT built from Toffolis, borrowing one idle line.
//!
//! With controls `A ∪ B` and an idle line `a` in any state:
//! `C(A -> a); C(B, a -> t); C(A -> a); C(B, a -> t)` flips `t` by
//! `AND(A) AND AND(B)` and leaves `a` unchanged. Each half is expanded the
//! same way, borrowing a line that the half does not touch.

use crate::circuit::{Control, Gate};

/// Appends gates flipping `target` when all `controls` are active.
/// Returns `None` if more than two controls are given and no idle line
/// exists in `0..width`.
pub fn emit_mcx(controls: &[Control], target: usize, width: usize, out: &mut Vec<Gate>) -> Option<()> {
    match controls {
        [] => out.push(Gate::not(target)),
        [c] => out.push(Gate::cnot(*c, target)),
        [a, b] => out.push(Gate::toffoli(*a, *b, target)),
        _ => {
            let busy = |l: usize| l == target || controls.iter().any(|c| c.line == l);
            let spare = (0..width).find(|&l| !busy(l))?;
            let split = controls.len().div_ceil(2);
            let (left, right) = controls.split_at(split);
            let mut right_ctl = right.to_vec();
            right_ctl.push(Control::pos(spare));
            for _ in 0..2 {
                emit_mcx(left, spare, width, out)?;
                emit_mcx(&right_ctl, target, width, out)?;
            }
        }
    }
    Some(())
}

/// Toffoli count of [`emit_mcx`] for `k` controls (when it succeeds).
pub fn mcx_toffoli_count(k: usize) -> u64 {
    match k {
        0 | 1 => 0,
        2 => 1,
        _ => {
            let split = k.div_ceil(2);
            2 * (mcx_toffoli_count(split) + mcx_toffoli_count(k - split + 1))
        }
    }
}
