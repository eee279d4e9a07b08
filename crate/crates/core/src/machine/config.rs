use std::sync::Arc;

use super::def::{QTMDef, Symbol};
use crate::error::{Error, Result};
use crate::tolerances::MAX_WINDOW;

/// Largest configuration space that may be materialized as an index range.
pub const MAX_INDEXED_DIM: usize = 1 << 24;

/// Packed configuration: control state, head positions and up to three
/// looped tapes of at most 64 cells (two bits per cell, blank = 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub state: u16,
    pub heads: [u8; 3],
    pub tapes: [u128; 3],
}

impl Config {
    pub fn blank(state: usize) -> Self {
        Self {
            state: state as u16,
            heads: [0; 3],
            tapes: [0; 3],
        }
    }

    pub fn cell(&self, tape: usize, pos: usize) -> Symbol {
        Symbol::from_code((self.tapes[tape] >> (2 * pos)) & 3)
    }

    pub fn set_cell(&mut self, tape: usize, pos: usize, s: Symbol) {
        let shift = 2 * pos;
        self.tapes[tape] = (self.tapes[tape] & !(3u128 << shift)) | (s.code() << shift);
    }

    pub fn read(&self, tape: usize) -> Symbol {
        self.cell(tape, self.heads[tape] as usize)
    }

    /// Writes `bits` from cell 0 onwards.
    pub fn write_bits(&mut self, tape: usize, bits: &str) {
        for (i, c) in bits.chars().enumerate() {
            if let Some(s) = Symbol::from_bit(c) {
                self.set_cell(tape, i, s);
            }
        }
    }

    pub fn tape_string(&self, tape: usize, window: usize) -> String {
        (0..window).map(|i| self.cell(tape, i).to_char()).collect()
    }

    pub fn describe(&self, def: &QTMDef, window: usize) -> String {
        let mut out = format!("state {}", def.states[self.state as usize]);
        for t in 0..def.tapes {
            out.push_str(&format!(
                ", tape{t} \"{}\" head {}",
                self.tape_string(t, window),
                self.heads[t]
            ));
        }
        out
    }
}

/// Looped-window configuration basis of a machine.
#[derive(Clone, Debug)]
pub struct ConfigSpace {
    machine: Arc<QTMDef>,
    window: usize,
    aux: Option<String>,
}

impl ConfigSpace {
    pub fn new(machine: QTMDef, window: usize) -> Result<Self> {
        Self::shared(Arc::new(machine), window)
    }

    /// Uses the window declared by the machine document.
    pub fn from_machine(machine: QTMDef) -> Result<Self> {
        let w = machine.window;
        Self::new(machine, w)
    }

    pub fn shared(machine: Arc<QTMDef>, window: usize) -> Result<Self> {
        if window == 0 || window > MAX_WINDOW {
            return Err(Error::WindowTooLarge {
                window,
                max: MAX_WINDOW,
            });
        }
        Ok(Self {
            machine,
            window,
            aux: None,
        })
    }

    /// Classical content placed on the auxiliary tape of every embedded input.
    pub fn with_aux(mut self, bits: impl Into<String>) -> Self {
        self.aux = Some(bits.into());
        self
    }

    pub fn with_window(&self, window: usize) -> Result<Self> {
        let mut cs = Self::shared(self.machine.clone(), window)?;
        cs.aux = self.aux.clone();
        Ok(cs)
    }

    pub fn machine(&self) -> &QTMDef {
        &self.machine
    }

    pub fn machine_arc(&self) -> Arc<QTMDef> {
        self.machine.clone()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn aux(&self) -> Option<&str> {
        self.aux.as_deref()
    }

    fn per_tape(&self) -> Option<usize> {
        3usize.checked_pow(self.window as u32)?.checked_mul(self.window)
    }

    /// |Q| * (3^w * w)^tapes, if it fits the indexing budget.
    pub fn dim(&self) -> Result<usize> {
        let too_large = || Error::WindowTooLarge {
            window: self.window,
            max: MAX_WINDOW,
        };
        let per = self.per_tape().ok_or_else(too_large)?;
        let mut d = self.machine.states.len();
        for _ in 0..self.machine.tapes {
            d = d.checked_mul(per).ok_or_else(too_large)?;
        }
        if d > MAX_INDEXED_DIM {
            return Err(too_large());
        }
        Ok(d)
    }

    pub fn index(&self, c: &Config) -> Result<usize> {
        let per = self.per_tape().ok_or(Error::WindowTooLarge {
            window: self.window,
            max: MAX_WINDOW,
        })?;
        let mut idx = c.state as usize;
        for t in 0..self.machine.tapes {
            let mut content = 0usize;
            for pos in (0..self.window).rev() {
                content = content * 3 + c.cell(t, pos).code() as usize;
            }
            idx = idx * per + content * self.window + c.heads[t] as usize;
        }
        Ok(idx)
    }

    pub fn config(&self, index: usize) -> Result<Config> {
        let dim = self.dim()?;
        if index >= dim {
            return Err(Error::OutOfRange(format!(
                "configuration index {index} (dim {dim})"
            )));
        }
        let per = self.per_tape().expect("dim succeeded");
        let mut rest = index;
        let mut c = Config::blank(0);
        for t in (0..self.machine.tapes).rev() {
            let local = rest % per;
            rest /= per;
            c.heads[t] = (local % self.window) as u8;
            let mut content = local / self.window;
            for pos in 0..self.window {
                c.set_cell(t, pos, Symbol::from_code((content % 3) as u128));
                content /= 3;
            }
        }
        c.state = rest as u16;
        Ok(c)
    }

    /// Start configuration holding `bits` on the input tape.
    pub fn input_config(&self, bits: &str) -> Result<Config> {
        if bits.len() > self.window {
            return Err(Error::InputTooLong {
                len: bits.len(),
                window: self.window,
            });
        }
        let mut c = Config::blank(self.machine.start);
        c.write_bits(0, bits);
        if let (Some(aux), Some(t)) = (&self.aux, self.machine.aux_tape()) {
            if aux.len() > self.window {
                return Err(Error::InputTooLong {
                    len: aux.len(),
                    window: self.window,
                });
            }
            c.write_bits(t, aux);
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_machine;
    use proptest::prelude::*;

    fn two_tape() -> QTMDef {
        parse_machine(
            "machine t\ntapes 2\nwindow 2\nstates s a f\nstart s\nfinal f\nrule s 00 -> f 00 RR 1 0\n",
        )
        .unwrap()
    }

    #[test]
    fn dimension_formula() {
        let cs = ConfigSpace::new(two_tape(), 2).unwrap();
        assert_eq!(cs.dim().unwrap(), 3 * (9 * 2) * (9 * 2));
        let big = ConfigSpace::new(two_tape(), 30).unwrap();
        assert!(big.dim().is_err());
        assert!(ConfigSpace::new(two_tape(), 65).is_err());
    }

    #[test]
    fn exhaustive_bijection_small() {
        let cs = ConfigSpace::new(two_tape(), 2).unwrap();
        for i in 0..cs.dim().unwrap() {
            let c = cs.config(i).unwrap();
            assert_eq!(cs.index(&c).unwrap(), i);
        }
    }

    #[test]
    fn input_embedding() {
        let cs = ConfigSpace::new(two_tape(), 2).unwrap().with_aux("1");
        let c = cs.input_config("01").unwrap();
        assert_eq!(c.tape_string(0, 2), "01");
        assert_eq!(c.tape_string(1, 2), "1#");
        assert!(matches!(cs.input_config("010"), Err(Error::InputTooLong { .. })));
    }

    proptest! {
        #[test]
        fn bijection_round_trips(window in 1usize..=6, seed in any::<u64>()) {
            let m = parse_machine("machine t\ntapes 1\nwindow 6\nstates s a b f\nstart s\nfinal f\n").unwrap();
            let cs = ConfigSpace::new(m, window).unwrap();
            let dim = cs.dim().unwrap();
            prop_assert_eq!(dim, 4 * 3usize.pow(window as u32) * window);
            let i = (seed as usize) % dim;
            let c = cs.config(i).unwrap();
            prop_assert_eq!(cs.index(&c).unwrap(), i);
        }
    }
}
