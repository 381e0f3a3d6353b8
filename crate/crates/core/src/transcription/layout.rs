use serde::{Deserialize, Serialize};

use super::time::TimeMode;
use crate::error::{Error, Result};

/// Block structure of the free-variable vector:
/// `[alpha_1 .. alpha_C, u_1 .. u_U, (t0), (tf)]`, each block `n + 1` long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiLayout {
    pub nodes: usize,
    pub coordinates: usize,
    pub controls: usize,
    pub time_mode: TimeMode,
}

/// Unpacked free variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiPieces {
    pub alphas: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub t0: Option<f64>,
    pub tf: Option<f64>,
}

impl ChiLayout {
    pub fn len(&self) -> usize {
        (self.coordinates + self.controls) * self.nodes + self.time_mode.free_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alpha_offset(&self, coord: usize) -> usize {
        coord * self.nodes
    }

    pub fn control_offset(&self, channel: usize) -> usize {
        (self.coordinates + channel) * self.nodes
    }

    /// Index of `t0`, present only in [`TimeMode::FreeBoth`].
    pub fn t0_index(&self) -> Option<usize> {
        match self.time_mode {
            TimeMode::FreeBoth => Some((self.coordinates + self.controls) * self.nodes),
            _ => None,
        }
    }

    /// Index of `tf`, present unless the horizon is fixed.
    pub fn tf_index(&self) -> Option<usize> {
        match self.time_mode {
            TimeMode::Fixed => None,
            _ => Some(self.len() - 1),
        }
    }

    pub fn alpha<'a>(&self, chi: &'a [f64], coord: usize) -> &'a [f64] {
        let o = self.alpha_offset(coord);
        &chi[o..o + self.nodes]
    }

    pub fn control<'a>(&self, chi: &'a [f64], channel: usize) -> &'a [f64] {
        let o = self.control_offset(channel);
        &chi[o..o + self.nodes]
    }

    pub fn check(&self, chi: &[f64]) -> Result<()> {
        if chi.len() == self.len() {
            Ok(())
        } else {
            Err(Error::Layout { expected: self.len(), actual: chi.len() })
        }
    }

    pub fn pack(&self, pieces: &ChiPieces) -> Result<Vec<f64>> {
        if pieces.alphas.len() != self.coordinates {
            return Err(Error::Layout { expected: self.coordinates, actual: pieces.alphas.len() });
        }
        if pieces.controls.len() != self.controls {
            return Err(Error::Layout { expected: self.controls, actual: pieces.controls.len() });
        }
        let mut chi = Vec::with_capacity(self.len());
        for block in pieces.alphas.iter().chain(&pieces.controls) {
            if block.len() != self.nodes {
                return Err(Error::Layout { expected: self.nodes, actual: block.len() });
            }
            chi.extend_from_slice(block);
        }
        let times = [pieces.t0, pieces.tf];
        let wanted: &[Option<f64>] = match self.time_mode {
            TimeMode::Fixed => &[],
            TimeMode::FreeFinal => &times[1..],
            TimeMode::FreeBoth => &times,
        };
        for t in wanted {
            chi.push(t.ok_or_else(|| Error::InvalidArgument("free time entry missing".into()))?);
        }
        Ok(chi)
    }

    pub fn unpack(&self, chi: &[f64]) -> Result<ChiPieces> {
        self.check(chi)?;
        Ok(ChiPieces {
            alphas: (0..self.coordinates).map(|c| self.alpha(chi, c).to_vec()).collect(),
            controls: (0..self.controls).map(|j| self.control(chi, j).to_vec()).collect(),
            t0: self.t0_index().map(|i| chi[i]),
            tf: self.tf_index().map(|i| chi[i]),
        })
    }
}
