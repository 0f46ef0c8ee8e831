//! Reduction parameters: per-variant derivation (paper tables or custom
//! desk-scale overrides) and the validity report that separates conditions
//! needed for extraction soundness from those needed to build a witness.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::oracle::ThreeDMInstance;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Variant {
    Wildcard2d,
    Packing2d,
    Box2,
    Hex,
    HexClosed,
    Weak2d,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Wildcard2d => "wildcard2d",
            Variant::Packing2d => "packing2d",
            Variant::Box2 => "box2",
            Variant::Hex => "hex",
            Variant::HexClosed => "hexclosed",
            Variant::Weak2d => "weak2d",
        }
    }

    pub fn from_name(name: &str) -> Option<Variant> {
        Some(match name {
            "wildcard2d" => Variant::Wildcard2d,
            "packing2d" => Variant::Packing2d,
            "box2" => Variant::Box2,
            "hex" => Variant::Hex,
            "hexclosed" => Variant::HexClosed,
            "weak2d" => Variant::Weak2d,
            _ => return None,
        })
    }

    /// Cubes (or prisms) per coarse wire square.
    pub fn cubes_per_square(self) -> u64 {
        match self {
            Variant::Wildcard2d | Variant::Packing2d => 4,
            Variant::Box2 => 8,
            Variant::Hex | Variant::HexClosed => 4,
            Variant::Weak2d => 1,
        }
    }

    /// Side of one coarse wire square in lattice cells.
    pub fn square_side(self) -> u64 {
        match self {
            Variant::Wildcard2d | Variant::Packing2d | Variant::Box2 => 2,
            Variant::Hex | Variant::HexClosed => 3,
            Variant::Weak2d => 1,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scale {
    Paper,
    /// Desk-scale override of the gap, block height and width multiplier.
    Custom { g: u64, h: u64, m: u64 },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParamSet {
    pub variant: Variant,
    pub scale: Scale,
    pub n: u64,
    pub t: BigUint,
    pub g: BigUint,
    pub h: BigUint,
    pub m: BigUint,
    pub height: BigUint,
    pub width: BigUint,
    pub l_a: BigUint,
    pub l_b: BigUint,
    pub l_c: BigUint,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
pub enum ParamError {
    #[error("n and t must be at least 1")]
    BadInput,
    #[error("custom overrides must be positive")]
    BadOverride,
}

/// Desk-size view of a parameter set; None when anything exceeds u64.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DeskParams {
    pub n: u64,
    pub t: u64,
    pub g: u64,
    pub h: u64,
    pub m: u64,
    pub height: u64,
    pub width: u64,
    pub l_a: u64,
    pub l_b: u64,
    pub l_c: u64,
}

impl ParamSet {
    pub fn to_desk(&self) -> Option<DeskParams> {
        Some(DeskParams {
            n: self.n,
            t: self.t.to_u64()?,
            g: self.g.to_u64()?,
            h: self.h.to_u64()?,
            m: self.m.to_u64()?,
            height: self.height.to_u64()?,
            width: self.width.to_u64()?,
            l_a: self.l_a.to_u64()?,
            l_b: self.l_b.to_u64()?,
            l_c: self.l_c.to_u64()?,
        })
    }
}

/// Conservative canonical route budget, in coarse squares, for one wire at
/// custom scale. The witness builder asserts its routes fit this bound.
pub fn mini_route_budget(n: u64, grid_h: u64, grid_w: u64, block_h: u64, block_w_max: u64) -> u64 {
    // Up-and-over canonical route: vertical span, two full sweeps, plus a
    // detour allowance around every block and its reserved margin.
    2 * grid_h + 4 * grid_w + 2 * n * (block_h + block_w_max + 8) + 32
}

fn round_even(v: u64) -> u64 {
    v + (v & 1)
}

/// Derive the parameter set for a variant. For the 3DM-based variants `n`
/// and `t` are the instance size and target sum; for weak2d they are |A| and
/// the sum of A.
pub fn derive_params(
    variant: Variant,
    n: u64,
    t: &BigUint,
    scale: &Scale,
) -> Result<ParamSet, ParamError> {
    if n == 0 || t.is_zero() {
        return Err(ParamError::BadInput);
    }
    let nb = BigUint::from(n);
    if variant == Variant::Weak2d {
        // H = 2|A| + 4, W = 4*sum(A) + 1; the remaining knobs are unused.
        let height = BigUint::from(2 * n + 4);
        let width = BigUint::from(4u32) * t + 1u32;
        return Ok(ParamSet {
            variant,
            scale: Scale::Paper,
            n,
            t: t.clone(),
            g: BigUint::from(1u32),
            h: BigUint::from(1u32),
            m: BigUint::from(1u32),
            height,
            width,
            l_a: BigUint::zero(),
            l_b: BigUint::zero(),
            l_c: BigUint::zero(),
        });
    }

    let (g, h, m): (BigUint, BigUint, BigUint) = match scale {
        Scale::Paper => match variant {
            Variant::Wildcard2d | Variant::Packing2d => (
                200u64 * &nb,
                20_000u64 * &nb * &nb,
                30_000u64 * &nb * &nb * &nb,
            ),
            Variant::Box2 => (
                1_200u64 * &nb,
                60_000u64 * &nb * &nb,
                70_000u64 * &nb * &nb * &nb,
            ),
            // The published table prints h = 60000 n^3; the validity report
            // is authoritative about which guarantees survive.
            Variant::Hex | Variant::HexClosed => (
                300u64 * &nb,
                60_000u64 * &nb * &nb * &nb,
                90_000u64 * &nb * &nb * &nb,
            ),
            Variant::Weak2d => unreachable!(),
        },
        Scale::Custom { g, h, m } => {
            if *g == 0 || *h == 0 || *m == 0 {
                return Err(ParamError::BadOverride);
            }
            (BigUint::from(*g), BigUint::from(*h), BigUint::from(*m))
        }
    };

    let (height, width) = match variant {
        Variant::Wildcard2d | Variant::Packing2d | Variant::Hex | Variant::HexClosed => {
            (&nb * &h + (&nb + 1u32) * &g, &m * t + 4u32 * &g)
        }
        Variant::Box2 => (
            &nb * (&h + 6u32 * &g + 4u32) + 2u32,
            4u32 * &g + &m * t + 6u32,
        ),
        Variant::Weak2d => unreachable!(),
    };

    let (l_a, l_b, l_c) = match scale {
        Scale::Paper => match variant {
            Variant::Wildcard2d => {
                (16u64 * &nb * &width, 8u64 * &nb * &width, 4u64 * &nb * &width)
            }
            Variant::Packing2d => (
                16u64 * &nb * &width + 2u64,
                8u64 * &nb * &width + 2u64,
                4u64 * &nb * &width + 2u64,
            ),
            Variant::Box2 => {
                (96u64 * &nb * &width, 48u64 * &nb * &width, 24u64 * &nb * &width)
            }
            Variant::Hex | Variant::HexClosed => (
                32u64 * &nb * &width / 3u64,
                16u64 * &nb * &width / 3u64,
                8u64 * &nb * &width / 3u64,
            ),
            Variant::Weak2d => unreachable!(),
        },
        Scale::Custom { .. } => {
            let side = variant.square_side();
            let cps = variant.cubes_per_square();
            let (hh, ww) = (height.to_u64(), width.to_u64());
            let (Some(hh), Some(ww), Some(hs), Some(ms)) =
                (hh, ww, h.to_u64(), m.to_u64())
            else {
                return Err(ParamError::BadOverride);
            };
            let t64 = t.to_u64().ok_or(ParamError::BadOverride)?;
            // Worst block width: widest admissible a-value is below 0.6 t.
            let wmax = ms * (3 * t64) / 5 / side + 2;
            let budget =
                mini_route_budget(n, hh / side, ww / side, hs / side, wmax);
            let l_sq = round_even(budget);
            let mut l = l_sq * cps;
            if variant == Variant::Packing2d {
                // Turn-only wires join corners whose colors force length
                // 2 mod 4; aim just under the dense 4-per-square weave.
                l = 3 * l_sq;
                l = l - (l % 4) + 2;
            }
            (BigUint::from(l), BigUint::from(l), BigUint::from(l))
        }
    };

    Ok(ParamSet {
        variant,
        scale: scale.clone(),
        n,
        t: t.clone(),
        g,
        h,
        m,
        height,
        width,
        l_a,
        l_b,
        l_c,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckClass {
    ExtractionSound,
    WitnessFeasible,
    /// Hypotheses of the paper's wire lemma at paper scale; informational
    /// for custom scales, where the parametric router and the universal
    /// re-verification stand in for them.
    PaperGuarantee,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub class: CheckClass,
    pub ok: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn add(&mut self, name: &'static str, class: CheckClass, ok: bool) {
        self.checks.push(Check { name, class, ok });
    }

    pub fn extraction_sound(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.class == CheckClass::ExtractionSound)
            .all(|c| c.ok)
    }

    pub fn witness_feasible(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.class == CheckClass::WitnessFeasible)
            .all(|c| c.ok)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.ok).map(|c| c.name).collect()
    }

    pub fn failed_witness(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.class == CheckClass::WitnessFeasible && !c.ok)
            .map(|c| c.name)
            .collect()
    }
}

/// Check the parameter set against the hypotheses of the extraction lemmas
/// and the geometric needs of witness construction. Custom scales may
/// violate extraction-side conditions while still building verifiable
/// witnesses; the classes keep those apart.
pub fn validate_params(p: &ParamSet, inst: Option<&ThreeDMInstance>) -> ValidationReport {
    use CheckClass::{ExtractionSound as ES, PaperGuarantee as PG, WitnessFeasible as WF};
    let mut rep = ValidationReport::default();
    if p.variant == Variant::Weak2d {
        rep.add("width exceeds height (cap orientation)", WF, p.width > p.height);
        return rep;
    }
    let nb = BigUint::from(p.n);
    let one = BigUint::from(1u32);

    // Extraction-side hypotheses.
    rep.add("m > H (segments forced horizontal)", ES, p.m > p.height);
    // H < n h + h/40  <=>  40 H < 40 n h + h.
    rep.add(
        "H < n h + h/40 (segment packing)",
        ES,
        40u32 * &p.height < (40u64 * &nb + 1u64) * &p.h,
    );
    rep.add("W < m (t+1)", ES, p.width < &p.m * (&p.t + &one));
    rep.add(
        "(n+1) g < h (an all-good residue color exists)",
        ES,
        (&nb + 1u32) * &p.g < p.h,
    );
    if p.variant == Variant::Box2 {
        // Good-row existence in one shelf region: 2(h + 6g) > 204 g.
        rep.add("2(h+6g) > 204 g (box2 good row)", ES, 2u32 * (&p.h + 6u32 * &p.g) > 204u32 * &p.g);
    }

    // Witness-side conditions.
    let side = BigUint::from(p.variant.square_side());
    let divides = |v: &BigUint, k: u64| (v % k).is_zero();
    match p.variant {
        Variant::Wildcard2d | Variant::Packing2d => {
            rep.add("g, h even (2x2 alignment)", WF, divides(&p.g, 2) && divides(&p.h, 2));
            rep.add("m even (block widths align)", WF, divides(&p.m, 2));
        }
        Variant::Box2 => {
            rep.add(
                "h, m multiples of 4",
                WF,
                divides(&p.h, 4) && divides(&p.m, 4),
            );
            rep.add("g multiple of 4", WF, divides(&p.g, 4));
        }
        Variant::Hex | Variant::HexClosed => {
            rep.add("h multiple of 6 (rows pair up, coarse-aligned)", WF, divides(&p.h, 6));
            rep.add("g, m multiples of 3 (coarse alignment)", WF, divides(&p.g, 3) && divides(&p.m, 3));
        }
        Variant::Weak2d => unreachable!(),
    }
    rep.add("W > H (wire lemma: grid wider than tall)", WF, p.width > p.height);
    // Paper clearance: the coarse gap must allow 100n squares; parametric
    // clearance for the actual router needs at least 8n + 12.
    let g_sq = &p.g / &side;
    rep.add("paper clearance g' >= 100 n", PG, g_sq >= BigUint::from(100 * p.n));
    rep.add(
        "router clearance g' >= 8n + 12",
        WF,
        g_sq >= BigUint::from(8 * p.n + 12),
    );
    if let Some(inst) = inst {
        let min_val = inst.a.iter().chain(&inst.b).chain(&inst.c).min().copied().unwrap_or(1);
        rep.add(
            "narrowest block at least 3 cells and 2 squares",
            WF,
            &p.m * min_val >= 3u32 * &side,
        );
        let min_a = inst.a.iter().min().copied().unwrap_or(1);
        // min_i x_i > w_X / 2 in coarse squares: 2 m a_min > W.
        rep.add("A blocks wider than half the grid", PG, 2u32 * &p.m * min_a > p.width);
    }
    if p.variant == Variant::Box2 {
        rep.add("shelf strings need H >= 9", WF, p.height >= BigUint::from(9u32));
        rep.add(
            "shelf strings need W >= g + 7",
            WF,
            p.width >= &p.g + BigUint::from(7u32),
        );
    }
    // Length budget: blocks plus wires must fit the box volume (the shelf,
    // when present, is accounted by the generator itself).
    let volume: BigUint = match p.variant {
        Variant::Box2 => 2u32 * &p.height * &p.width,
        _ => &p.height * &p.width,
    };
    let rows: BigUint = match p.variant {
        Variant::Box2 => 2u32 * &p.h,
        _ => p.h.clone(),
    };
    let blocks = &rows * &p.m * &p.t;
    let wires = &nb * (&p.l_a + &p.l_b + &p.l_c);
    rep.add("blocks and wires fit the box", WF, blocks + wires <= volume);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn paper_wildcard2d_table() {
        let p = derive_params(Variant::Wildcard2d, 1, &big(48), &Scale::Paper).unwrap();
        assert_eq!(p.g, big(200));
        assert_eq!(p.h, big(20_000));
        assert_eq!(p.m, big(30_000));
        assert_eq!(p.height, big(20_400));
        assert_eq!(p.width, big(1_440_800));
        assert_eq!(p.l_a, big(16 * 1_440_800));
        assert_eq!(p.l_b, big(8 * 1_440_800));
        assert_eq!(p.l_c, big(4 * 1_440_800));
    }

    #[test]
    fn paper_packing2d_adds_two() {
        let p = derive_params(Variant::Packing2d, 1, &big(48), &Scale::Paper).unwrap();
        assert_eq!(p.l_a, big(16 * 1_440_800 + 2));
        assert_eq!(p.l_c, big(4 * 1_440_800 + 2));
    }

    #[test]
    fn paper_box2_table() {
        let p = derive_params(Variant::Box2, 1, &big(87), &Scale::Paper).unwrap();
        assert_eq!(p.g, big(1_200));
        assert_eq!(p.h, big(60_000));
        assert_eq!(p.m, big(70_000));
        assert_eq!(p.height, big(67_206));
        assert_eq!(p.width, big(4 * 1_200 + 70_000 * 87 + 6));
    }

    #[test]
    fn paper_hex_table_and_flag() {
        let p1 = derive_params(Variant::Hex, 1, &big(87), &Scale::Paper).unwrap();
        assert_eq!(p1.g, big(300));
        assert_eq!(p1.h, big(60_000));
        assert_eq!(p1.m, big(90_000));
        let rep1 = validate_params(&p1, None);
        assert!(rep1.checks.iter().find(|c| c.name.starts_with("m > H")).unwrap().ok);
        // At n=2 the printed cubic block height exceeds the width multiplier.
        let p2 = derive_params(Variant::Hex, 2, &big(87), &Scale::Paper).unwrap();
        let rep2 = validate_params(&p2, None);
        assert!(!rep2.checks.iter().find(|c| c.name.starts_with("m > H")).unwrap().ok);
    }

    #[test]
    fn weak2d_dimensions() {
        let p = derive_params(Variant::Weak2d, 3, &big(4), &Scale::Paper).unwrap();
        assert_eq!(p.height, big(10));
        assert_eq!(p.width, big(17));
        let p1 = derive_params(Variant::Weak2d, 1, &big(1), &Scale::Paper).unwrap();
        assert_eq!(p.variant, Variant::Weak2d);
        assert_eq!(p1.height, big(6));
        assert_eq!(p1.width, big(5));
    }

    #[test]
    fn paper_scale_passes_both_classes() {
        let inst = ThreeDMInstance::new(
            87,
            alloc::vec![49, 50],
            alloc::vec![25, 24],
            alloc::vec![13, 13],
        )
        .unwrap();
        let p = derive_params(Variant::Wildcard2d, 2, &big(87), &Scale::Paper).unwrap();
        let rep = validate_params(&p, Some(&inst));
        assert!(rep.extraction_sound(), "{:?}", rep.failed());
        assert!(rep.witness_feasible(), "{:?}", rep.failed());
    }

    #[test]
    fn custom_violating_extraction_is_flagged() {
        let p = derive_params(
            Variant::Wildcard2d,
            2,
            &big(87),
            &Scale::Custom { g: 56, h: 100, m: 2 },
        )
        .unwrap();
        let rep = validate_params(&p, None);
        // h = 100 < 40(n+1)g makes H < nh + h/40 fail.
        assert!(!rep.extraction_sound());
    }

    #[test]
    fn custom_below_router_clearance_flagged() {
        let p = derive_params(
            Variant::Wildcard2d,
            2,
            &big(87),
            &Scale::Custom { g: 8, h: 400, m: 2 },
        )
        .unwrap();
        let rep = validate_params(&p, None);
        assert!(rep
            .checks
            .iter()
            .any(|c| c.name.starts_with("router clearance") && !c.ok));
    }
}
