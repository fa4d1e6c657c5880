//! Named experiment presets.

use crate::experiments::{linspace, GridSpec, Method};

const GRID_METHODS: [Method; 3] = [Method::SpectralLloyd, Method::Spectral, Method::RandomLloyd];

/// Desk-scale phase diagram: minutes of compute, coarse but clearly shows
/// the transition along `a = 1 + 2b`.
pub fn desk_preset(master_seed: u64) -> GridSpec {
    GridSpec {
        n: 200,
        sigma: 1.0,
        a_grid: linspace(1.1, 11.0, 15),
        b_grid: linspace(0.1, 5.0, 15),
        reps: 60,
        methods: GRID_METHODS.to_vec(),
        master_seed,
    }
}

/// Full-scale preset: n = 500, 50 x 50 cells over `[1.1, 11] x [0.1, 5]`,
/// 300 reps per cell. This is hours of compute; the CLI prints a warning
/// before starting it.
pub fn paper_preset(master_seed: u64) -> GridSpec {
    GridSpec {
        n: 500,
        sigma: 1.0,
        a_grid: linspace(1.1, 11.0, 50),
        b_grid: linspace(0.1, 5.0, 50),
        reps: 300,
        methods: GRID_METHODS.to_vec(),
        master_seed,
    }
}

pub fn preset_by_name(name: &str, master_seed: u64) -> Option<GridSpec> {
    match name {
        "desk" => Some(desk_preset(master_seed)),
        "paper" => Some(paper_preset(master_seed)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        desk_preset(0).validate().unwrap();
        paper_preset(0).validate().unwrap();
        assert!(preset_by_name("desk", 1).is_some());
        assert!(preset_by_name("paper", 1).is_some());
        assert!(preset_by_name("galaxy", 1).is_none());
    }

    #[test]
    fn full_scale_preset_matches_reference_protocol() {
        let spec = paper_preset(0);
        assert_eq!(spec.n, 500);
        assert_eq!(spec.reps, 300);
        assert_eq!(spec.a_grid.len(), 50);
        assert_eq!((spec.a_grid[0], spec.a_grid[49]), (1.1, 11.0));
        assert_eq!(spec.b_grid.len(), 50);
        assert_eq!((spec.b_grid[0], spec.b_grid[49]), (0.1, 5.0));
    }
}
