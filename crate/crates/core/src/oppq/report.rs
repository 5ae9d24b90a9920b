use crate::mpnum::BigReal;
use rug::Float;

/// One order of a converging-bound run.
#[derive(Debug, Clone)]
pub struct OrderRecord {
    /// `I` for 1-D problems, `m_s` for the Zeeman problem.
    pub order: usize,
    pub e_min: BigReal,
    /// Energy function value at `e_min`.
    pub s_min: BigReal,
    /// Final bisection bracket width.
    pub width: BigReal,
    pub steps: usize,
    /// `|∂S|` at `e_min`.
    pub derivative: BigReal,
    pub bounds: Option<(BigReal, BigReal)>,
    /// Why bounds are missing at this order.
    pub bound_note: Option<String>,
}

/// Per-order records plus the upper bound used to extract intervals.
#[derive(Debug, Clone, Default)]
pub struct BoundReport {
    pub records: Vec<OrderRecord>,
    pub b_u: Option<BigReal>,
}

impl BoundReport {
    pub fn new(records: Vec<OrderRecord>) -> Self {
        BoundReport { records, b_u: None }
    }

    /// `S_min` per order, in record order.
    pub fn sequence(&self) -> Vec<BigReal> {
        self.records.iter().map(|r| r.s_min.clone()).collect()
    }

    /// `true` at index `k` when `S_min` rose strictly from record `k − 1`
    /// (always `true` for the first record).
    pub fn monotone_flags(&self) -> Vec<bool> {
        let mut flags = Vec::with_capacity(self.records.len());
        for (k, r) in self.records.iter().enumerate() {
            flags.push(k == 0 || r.s_min > self.records[k - 1].s_min);
        }
        flags
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone_flags().iter().all(|&f| f)
    }

    /// Orders whose interval fails `E_L ≤ E_min ≤ E_U`.
    pub fn containment_violations(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| match &r.bounds {
                Some((lo, hi)) => !(lo <= &r.e_min && r.e_min <= *hi),
                None => false,
            })
            .map(|r| r.order)
            .collect()
    }

    /// Narrowest interval found so far.
    pub fn tightest(&self) -> Option<&OrderRecord> {
        self.records
            .iter()
            .filter(|r| r.bounds.is_some())
            .min_by(|a, b| {
                let wa = width(a.bounds.as_ref().unwrap());
                let wb = width(b.bounds.as_ref().unwrap());
                wa.partial_cmp(&wb).unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

fn width((lo, hi): &(BigReal, BigReal)) -> BigReal {
    Float::with_val(lo.prec(), hi - lo)
}
