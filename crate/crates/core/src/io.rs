//! File formats: game configs, strategy CSV, profile JSON and cdf tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{LottoError, Result};
use crate::model::{Atom, BidGrid, DiscreteStrategy, EquilibriumProfile, GameSpec, PiecewiseCdf, Regime, Segment, Strategy};

/// `{"budgets": [...], "threshold": x | null, "grid_k": k}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub grid_k: Option<usize>,
}

impl GameConfig {
    pub fn game(&self) -> Result<GameSpec> {
        GameSpec::new(self.budgets.clone(), self.threshold)
    }

    /// Grid on `[0, T]`, or on `[0, bid bound]` for threshold-free games.
    pub fn grid(&self) -> Result<Option<BidGrid>> {
        match self.grid_k {
            Some(k) => Ok(Some(BidGrid::new(k, self.game()?.effective_cap())?)),
            None => Ok(None),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        load_json(path)
    }
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn save_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PieceKind {
    Atom,
    Segment,
}

#[derive(Debug, Serialize, Deserialize)]
struct StrategyRow {
    player_index: usize,
    kind: PieceKind,
    x_or_lo: f64,
    hi_or_empty: Option<f64>,
    mass_or_density: f64,
}

/// Writes one row per atom or segment. Grid strategies are written as the
/// atoms of positive mass.
pub fn write_strategies_csv<W: Write>(profile: &EquilibriumProfile, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (i, s) in profile.strategies().iter().enumerate() {
        for a in s.atoms() {
            out.serialize(StrategyRow {
                player_index: i,
                kind: PieceKind::Atom,
                x_or_lo: a.at,
                hi_or_empty: None,
                mass_or_density: a.mass,
            })?;
        }
        for seg in s.segments() {
            out.serialize(StrategyRow {
                player_index: i,
                kind: PieceKind::Segment,
                x_or_lo: seg.lo,
                hi_or_empty: Some(seg.hi),
                mass_or_density: seg.density,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads strategies for players `0..n`. When `grid` is given and every
/// player's rows are atoms on its points, grid strategies are rebuilt.
pub fn read_strategies_csv<R: Read>(r: R, n: usize, grid: Option<&BidGrid>) -> Result<Vec<Strategy>> {
    let mut pieces: BTreeMap<usize, (Vec<Atom>, Vec<Segment>)> = BTreeMap::new();
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: StrategyRow = row?;
        if row.player_index >= n {
            return Err(LottoError::Malformed(format!("player index {} in a {n}-player game", row.player_index)));
        }
        let entry = pieces.entry(row.player_index).or_default();
        match (row.kind, row.hi_or_empty) {
            (PieceKind::Atom, None) => entry.0.push(Atom { at: row.x_or_lo, mass: row.mass_or_density }),
            (PieceKind::Segment, Some(hi)) => {
                entry.1.push(Segment { lo: row.x_or_lo, hi, density: row.mass_or_density })
            }
            (PieceKind::Atom, Some(_)) => return Err(LottoError::Malformed("atom row with an upper end".into())),
            (PieceKind::Segment, None) => return Err(LottoError::Malformed("segment row without an upper end".into())),
        }
    }
    if pieces.len() != n {
        return Err(LottoError::Malformed(format!("strategy file covers {} of {n} players", pieces.len())));
    }
    if let Some(grid) = grid {
        if let Some(on_grid) = pieces.values().map(|p| grid_strategy(grid, p)).collect::<Option<Vec<_>>>() {
            return on_grid.into_iter().map(|d| d.map(Strategy::Grid)).collect();
        }
    }
    pieces
        .into_values()
        .map(|(atoms, segments)| PiecewiseCdf::new(atoms, segments).map(Strategy::Continuous))
        .collect()
}

fn grid_strategy(grid: &BidGrid, (atoms, segments): &(Vec<Atom>, Vec<Segment>)) -> Option<Result<DiscreteStrategy>> {
    if !segments.is_empty() {
        return None;
    }
    let mut probs = vec![0.0; grid.len()];
    for a in atoms {
        probs[grid.index_of(a.at)?] += a.mass;
    }
    Some(DiscreteStrategy::new(*grid, probs))
}

/// Builds a profile from a strategy file. Profiles rebuilt on `grid` are
/// labelled grid-solved, everything else imported.
pub fn read_profile_csv<R: Read>(r: R, game: &GameSpec, grid: Option<&BidGrid>) -> Result<EquilibriumProfile> {
    let strategies = read_strategies_csv(r, game.n(), grid)?;
    let regime = if strategies.iter().all(|s| s.grid().is_some()) { Regime::GridSolved } else { Regime::Imported };
    EquilibriumProfile::new(game.clone(), strategies, regime, None)
}

/// Plot table with columns `x, F_1, ..., F_n`, sampled on 201 evenly spaced
/// points of `[0, max support]` plus every breakpoint.
pub fn write_cdf_table<W: Write>(profile: &EquilibriumProfile, w: W) -> Result<()> {
    let top = profile.support_sup();
    let mut xs: Vec<f64> = (0..=200).map(|j| top * j as f64 / 200.0).collect();
    for s in profile.strategies() {
        xs.extend(s.breakpoints());
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["x".to_string()];
    header.extend((1..=profile.game().n()).map(|i| format!("F_{i}")));
    out.write_record(&header)?;
    for x in xs {
        let mut record = vec![x.to_string()];
        for s in profile.strategies() {
            record.push(s.cdf(x)?.0.to_string());
        }
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}
