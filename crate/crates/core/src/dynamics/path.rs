use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::FourVector;

/// Piecewise-linear path through 4D information space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path4 {
    nodes: Vec<FourVector>,
}

impl Path4 {
    pub fn new(nodes: Vec<FourVector>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid("Path4::new", "a path needs at least 2 nodes"));
        }
        if let Some(i) = nodes.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid("Path4::new", format!("node {i} is not finite")));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::invalid(
                "Path4::new",
                format!("nodes {i} and {} coincide", i + 1),
            ));
        }
        Ok(Path4 { nodes })
    }

    /// `segments` equal pieces of the chord from `a` to `b`.
    pub fn straight(a: FourVector, b: FourVector, segments: usize) -> Result<Self> {
        if segments == 0 {
            return Err(Error::invalid("Path4::straight", "segment count must be positive"));
        }
        let d = b - a;
        let nodes = (0..=segments)
            .map(|k| {
                if k == segments {
                    b
                } else {
                    a + d * (k as f64 / segments as f64)
                }
            })
            .collect();
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[FourVector] {
        &self.nodes
    }

    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn start(&self) -> FourVector {
        self.nodes[0]
    }

    pub fn end(&self) -> FourVector {
        self.nodes[self.nodes.len() - 1]
    }

    /// Displacement `x_{k+1} - x_k` of segment `k`.
    pub fn delta(&self, k: usize) -> FourVector {
        self.nodes[k + 1] - self.nodes[k]
    }

    /// Fails on the first segment with non-positive interval.
    pub fn check_timelike(&self, op: &'static str) -> Result<()> {
        for k in 0..self.segments() {
            let iv = self.delta(k).interval();
            if !(iv > 0.0) || self.delta(k)[0] <= 0.0 {
                return Err(Error::NonTimelikePath {
                    op,
                    segment: k,
                    interval: iv,
                });
            }
        }
        Ok(())
    }

    /// Largest Euclidean distance of a node from the chord `start -> end`.
    /// Motion along the chord is not counted.
    pub fn chord_deviation(&self) -> f64 {
        let (a, d) = (self.start(), self.end() - self.start());
        let dd = d.euclidean_norm().powi(2);
        self.nodes
            .iter()
            .map(|x| {
                let r = *x - a;
                let t = if dd > 0.0 { (0..4).map(|i| r[i] * d[i]).sum::<f64>() / dd } else { 0.0 };
                (r - d * t).euclidean_norm()
            })
            .fold(0.0, f64::max)
    }
}
