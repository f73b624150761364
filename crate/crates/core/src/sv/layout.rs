use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};

/// Node currently holding a register. Used only for accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Owner {
    Control,
    Node(usize),
    /// Spread across nodes according to the qubit partition.
    Partitioned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub width: usize,
    pub offset: usize,
    pub owner: Owner,
}

impl Register {
    pub fn qubits(&self) -> Vec<usize> {
        (self.offset..self.offset + self.width).collect()
    }

    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }

    pub fn value_in(&self, index: usize) -> usize {
        (index >> self.offset) & ((1 << self.width) - 1)
    }
}

/// Bit condition `index & mask == value` on global basis indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Condition {
    pub mask: usize,
    pub value: usize,
}

impl Condition {
    pub fn always() -> Self {
        Self::default()
    }

    pub fn qubit(q: usize, bit: bool) -> Self {
        Self {
            mask: 1 << q,
            value: (bit as usize) << q,
        }
    }

    pub fn holds(&self, index: usize) -> bool {
        index & self.mask == self.value
    }

    /// Conjunction; `None` when the two conditions contradict each other.
    pub fn and(self, other: Condition) -> Option<Condition> {
        let shared = self.mask & other.mask;
        if self.value & shared != other.value & shared {
            return None;
        }
        Some(Condition {
            mask: self.mask | other.mask,
            value: self.value | other.value,
        })
    }
}

/// Ordered named registers; the first register occupies the lowest bits.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total: usize,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, width: usize, owner: Owner) -> Result<Self> {
        self.push(name, width, owner)?;
        Ok(self)
    }

    pub fn push(&mut self, name: &str, width: usize, owner: Owner) -> Result<usize> {
        if width == 0 {
            return Err(Error::Shape(format!("register {name} has width 0")));
        }
        if self.registers.iter().any(|r| r.name == name) {
            return Err(Error::Shape(format!("duplicate register {name}")));
        }
        caps::check_qubits("register layout", self.total + width)?;
        let offset = self.total;
        self.registers.push(Register {
            name: name.to_string(),
            width,
            offset,
            owner,
        });
        self.total += width;
        Ok(offset)
    }

    pub fn total_qubits(&self) -> usize {
        self.total
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn get(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Shape(format!("no register named {name}")))
    }

    pub fn offset(&self, name: &str) -> Result<usize> {
        Ok(self.get(name)?.offset)
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        Ok(self.get(name)?.width)
    }

    pub fn qubits(&self, name: &str) -> Result<Vec<usize>> {
        Ok(self.get(name)?.qubits())
    }

    pub fn owner(&self, name: &str) -> Result<Owner> {
        Ok(self.get(name)?.owner)
    }

    pub fn set_owner(&mut self, name: &str, owner: Owner) -> Result<()> {
        let r = self
            .registers
            .iter_mut()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Shape(format!("no register named {name}")))?;
        r.owner = owner;
        Ok(())
    }

    /// Condition that register `name` holds `value`.
    pub fn condition(&self, name: &str, value: usize) -> Result<Condition> {
        let r = self.get(name)?;
        if value >> r.width != 0 {
            return Err(Error::Shape(format!(
                "value {value} does not fit register {name} of width {}",
                r.width
            )));
        }
        Ok(Condition {
            mask: r.mask(),
            value: value << r.offset,
        })
    }

    /// Condition that every listed register is zero.
    pub fn all_zero(&self, names: &[String]) -> Result<Condition> {
        let mut c = Condition::always();
        for n in names {
            c.mask |= self.get(n)?.mask();
        }
        Ok(c)
    }

    pub(crate) fn without(&self, name: &str) -> Result<Self> {
        self.get(name)?;
        let mut out = RegisterLayout::new();
        for r in self.registers.iter().filter(|r| r.name != name) {
            out.push(&r.name, r.width, r.owner)?;
        }
        Ok(out)
    }
}
