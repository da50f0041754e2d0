//! Tabulating which finite `(λ, κ, γ)`-games are winnable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{exhaustive_defeat, strategy_space_defeat, AdversaryError, Certificate};
use crate::engine::GameSpec;
use crate::strategies::BlockCover;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lambdas: Vec<usize>,
    pub gammas: Vec<usize>,
    pub kappas: Vec<u64>,
    /// Most colorings one cell may enumerate.
    pub coloring_cap: u128,
    /// Most profile-coloring games a strategy-space search may play.
    pub space_cap: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellVerdict {
    /// The named strategy won on every one of `colorings_checked` colorings.
    Winning { strategy: String, colorings_checked: u64 },
    /// `certificate` defeats the block strategy. When the whole strategy
    /// space was searched, `profiles_defeated` says how many profiles lost.
    Losing {
        certificate: Box<Certificate>,
        profiles_defeated: Option<u64>,
    },
    /// A cap was hit before anything was established.
    Unknown { reason: String },
}

impl CellVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            CellVerdict::Winning { .. } => "WINNING",
            CellVerdict::Losing { .. } => "LOSING",
            CellVerdict::Unknown { .. } => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub lambda: usize,
    pub gamma: usize,
    pub kappa: u64,
    #[serde(flatten)]
    pub verdict: CellVerdict,
}

fn unknown(e: AdversaryError) -> CellVerdict {
    CellVerdict::Unknown { reason: e.to_string() }
}

/// One cell: play the block strategy on every coloring; if it loses, also
/// search the whole strategy space when that fits under the cap.
pub fn sweep_cell(lambda: usize, gamma: usize, kappa: u64, coloring_cap: u128, space_cap: u128) -> CellVerdict {
    if lambda == 0 || gamma < 2 || kappa == 0 {
        return CellVerdict::Unknown {
            reason: "needs λ ≥ 1, γ ≥ 2, κ ≥ 1".into(),
        };
    }
    let spec = GameSpec::finite(lambda, kappa, gamma);
    let block = BlockCover { lambda, gamma };
    let cert = match exhaustive_defeat(&spec, &block, lambda, coloring_cap) {
        Ok(c) => c,
        Err(e) => return unknown(e),
    };
    let Some(cert) = cert else {
        return CellVerdict::Winning {
            strategy: block_name(&block),
            colorings_checked: kappa.pow(lambda as u32),
        };
    };
    if !cert.verify(&block).unwrap_or(false) {
        return CellVerdict::Unknown {
            reason: "certificate failed to replay".into(),
        };
    }
    let profiles_defeated = match strategy_space_defeat(lambda, kappa, gamma, space_cap) {
        Ok(r) if r.first_winning.is_none() => Some(r.profiles),
        Ok(r) => {
            return CellVerdict::Winning {
                strategy: format!("table-profile#{}", r.first_winning.unwrap_or_default()),
                colorings_checked: kappa.pow(lambda as u32),
            }
        }
        Err(_) => None,
    };
    CellVerdict::Losing {
        certificate: Box::new(cert),
        profiles_defeated,
    }
}

fn block_name(b: &BlockCover) -> String {
    use crate::engine::Profile;
    b.name()
}

/// All cells, in the order λ, then γ, then κ.
pub fn sweep(cfg: &SweepConfig) -> Vec<Cell> {
    let cells: Vec<(usize, usize, u64)> = cfg
        .lambdas
        .iter()
        .flat_map(|&l| cfg.gammas.iter().flat_map(move |&g| cfg.kappas.iter().map(move |&k| (l, g, k))))
        .collect();
    cells
        .into_par_iter()
        .map(|(lambda, gamma, kappa)| Cell {
            lambda,
            gamma,
            kappa,
            verdict: sweep_cell(lambda, gamma, kappa, cfg.coloring_cap, cfg.space_cap),
        })
        .collect()
}

/// CSV rows with a header; certificates are summarised by their coloring.
pub fn to_csv(cells: &[Cell]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "lambda",
        "gamma",
        "kappa",
        "verdict",
        "strategy",
        "colorings_checked",
        "profiles_defeated",
        "losing_coloring",
        "reason",
    ];
    w.write_record(header).expect("writing to memory");
    for c in cells {
        let (strategy, checked, defeated, coloring, reason) = match &c.verdict {
            CellVerdict::Winning {
                strategy,
                colorings_checked,
            } => (strategy.clone(), colorings_checked.to_string(), String::new(), String::new(), String::new()),
            CellVerdict::Losing {
                certificate,
                profiles_defeated,
            } => {
                let hats = certificate
                    .entries
                    .iter()
                    .map(|e| e.color.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                (
                    certificate.strategy.clone(),
                    String::new(),
                    profiles_defeated.map(|p| p.to_string()).unwrap_or_default(),
                    hats,
                    String::new(),
                )
            }
            CellVerdict::Unknown { reason } => (String::new(), String::new(), String::new(), String::new(), reason.clone()),
        };
        let row = [
            c.lambda.to_string(),
            c.gamma.to_string(),
            c.kappa.to_string(),
            c.verdict.label().to_string(),
            strategy,
            checked,
            defeated,
            coloring,
            reason,
        ];
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are UTF-8")
}
