//! Streaming linear system: rows are screened modulo a prime as they arrive and
//! only rank-raising rows take part in exact elimination.

use super::linalg::{exact_nullspace, primitive};
use super::modp::{reconstruct, ModField, Rref};
use crate::coeff::Scalar;

pub(crate) type SparseRow = Vec<(usize, Scalar)>;

pub(crate) struct System {
    ncols: usize,
    modf: ModField,
    rref: Rref,
    rows: Vec<SparseRow>,
    selected: Vec<usize>,
    modular: bool,
}

fn dot(row: &SparseRow, v: &[Scalar]) -> Scalar {
    row.iter()
        .filter(|(c, _)| !v[*c].is_zero())
        .fold(Scalar::zero(), |acc, (c, x)| &acc + &(x * &v[*c]))
}

impl System {
    pub fn new(ncols: usize, order: u32) -> Self {
        let modf = ModField::new(order, 0);
        System {
            ncols,
            modf,
            rref: Rref::new(modf.p, ncols),
            rows: vec![],
            selected: vec![],
            modular: true,
        }
    }

    pub fn push(&mut self, row: SparseRow) {
        if row.is_empty() {
            return;
        }
        if self.modular {
            let mut dense = vec![0u64; self.ncols];
            for (c, x) in &row {
                match self.modf.scalar(x) {
                    Some(v) => dense[*c] = super::modp::add(dense[*c], v, self.modf.p),
                    None => {
                        self.modular = false;
                        break;
                    }
                }
            }
            if self.modular && self.rref.push(dense) {
                self.selected.push(self.rows.len());
            }
        }
        self.rows.push(row);
    }

    /// Mod-p rank already maximal, so the nullspace is trivial.
    pub fn is_full(&self) -> bool {
        self.modular && self.rref.is_full()
    }

    fn failing_rows(&self, basis: &[Vec<Scalar>]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| basis.iter().any(|v| !dot(&self.rows[i], v).is_zero()))
            .collect()
    }

    fn reconstructed(&self) -> Option<Vec<Vec<Scalar>>> {
        if !self.modular || self.modf.order != 1 {
            return None;
        }
        let basis: Vec<Vec<Scalar>> = self
            .rref
            .nullspace()
            .into_iter()
            .map(|(_, v)| {
                v.iter()
                    .map(|&x| reconstruct(x, self.modf.p).map(Scalar::from_rational))
                    .collect::<Option<Vec<_>>>()
                    .map(|v| primitive(&v))
            })
            .collect::<Option<_>>()?;
        self.failing_rows(&basis).is_empty().then_some(basis)
    }

    /// Exact nullspace basis of all rows pushed so far, one vector per free
    /// column of the reduced echelon form, with coprime integral entries.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        if let Some(b) = self.reconstructed() {
            return b;
        }
        let mut sel: Vec<usize> = if self.modular {
            self.selected.clone()
        } else {
            (0..self.rows.len()).collect()
        };
        loop {
            let dense: Vec<Vec<Scalar>> = sel
                .iter()
                .map(|&i| {
                    let mut d = vec![Scalar::zero(); self.ncols];
                    for (c, x) in &self.rows[i] {
                        d[*c] = &d[*c] + x;
                    }
                    d
                })
                .collect();
            let basis = exact_nullspace(&dense, self.ncols);
            let bad: Vec<usize> = self
                .failing_rows(&basis)
                .into_iter()
                .filter(|i| !sel.contains(i))
                .collect();
            if bad.is_empty() {
                return basis;
            }
            sel.extend(bad);
        }
    }
}
