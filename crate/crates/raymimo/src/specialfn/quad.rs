//! Adaptive quadrature for complex-valued integrands.
//!
//! Bisection-based adaptation on top of a fixed nested Gauss(7)/Kronrod(15)
//! rule. Oscillatory integrands (characteristic functions at large lag) are
//! handled by seeding the segment queue with enough panels to bound the phase
//! change per panel; callers pass the panel count.

use num_complex::Complex64;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::util::NeumaierSumC;

/// Tolerances and budget for one adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive (abs {abs_tol}, rel {rel_tol})"
            )));
        }
        if max_subdivisions < 1 {
            return Err(Error::Config(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

// Kronrod-15 abscissae on [-1, 1] (positive half) and the matching weights,
// with the embedded Gauss-7 weights. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_21,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

struct Panel {
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
    resabs: f64,
    seq: u64,
}

impl Panel {
    fn key(&self) -> (f64, u64) {
        (self.err, self.seq)
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .total_cmp(&other.err)
            .then(self.seq.cmp(&other.seq))
    }
}

/// One Gauss-Kronrod 15-point evaluation on [a, b].
fn qk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let mut fv = [Complex64::default(); 15];
    let fc = f(center);
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }

    let mut kr = NeumaierSumC::default();
    let mut resabs = 0.0;
    for j in 0..8 {
        let pair = if j == 7 {
            fv[7]
        } else {
            fv[j] + fv[14 - j]
        };
        kr.add(WGK[j] * pair);
        resabs += WGK[j]
            * if j == 7 {
                fv[7].norm()
            } else {
                fv[j].norm() + fv[14 - j].norm()
            };
    }
    let mut gauss = Complex64::default();
    for (i, &w) in WG.iter().enumerate() {
        let j = 2 * i + 1;
        let pair = if j == 7 { fv[7] } else { fv[j] + fv[14 - j] };
        gauss += w * pair;
    }

    let result_k = kr.value() * half;
    let result_g = gauss * half;
    resabs *= half.abs();

    // QUADPACK-style error rescale on the modulus.
    let reskh = result_k / (b - a);
    let mut resasc = 0.0;
    for j in 0..8 {
        let dev = if j == 7 {
            (fv[7] - reskh).norm()
        } else {
            (fv[j] - reskh).norm() + (fv[14 - j] - reskh).norm()
        };
        resasc += WGK[j] * dev;
    }
    resasc *= half.abs();

    let raw = (result_k - result_g).norm();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        let scale = (200.0 * raw / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result_k, err, resabs)
}

/// Adaptive integral of `f` over `[a, b]`, single initial panel.
pub fn integrate_1d<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    integrate_1d_panels(f, a, b, 1, spec)
}

/// Adaptive integral with the interval pre-split into `min_panels` equal
/// panels before adaptation starts.
pub fn integrate_1d_panels<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "integration interval must satisfy a < b, got [{a}, {b}]"
        )));
    }
    let m = min_panels.max(1);
    let mut heap: BinaryHeap<Panel> = BinaryHeap::with_capacity(m + spec.max_subdivisions);
    let mut seq = 0u64;
    let mut total_err = 0.0;
    let mut total_val = Complex64::default();
    let mut total_resabs = 0.0;

    let width = (b - a) / m as f64;
    for i in 0..m {
        let pa = a + i as f64 * width;
        let pb = if i + 1 == m { b } else { a + (i + 1) as f64 * width };
        let (val, err, resabs) = qk15(&f, pa, pb);
        total_err += err;
        total_val += val;
        total_resabs += resabs;
        heap.push(Panel {
            a: pa,
            b: pb,
            val,
            err,
            resabs,
            seq: {
                seq += 1;
                seq
            },
        });
    }

    let final_sum = |heap: &BinaryHeap<Panel>| -> Complex64 {
        // Deterministic order independent of heap internals.
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut s = NeumaierSumC::default();
        for p in panels {
            s.add(p.val);
        }
        s.value()
    };

    let mut splits = 0usize;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total_val.norm());
        if total_err <= tol {
            return Ok(final_sum(&heap));
        }
        // Roundoff floor: further subdivision cannot help below this.
        if total_err <= 100.0 * f64::EPSILON * total_resabs {
            return Ok(final_sum(&heap));
        }
        if splits >= spec.max_subdivisions {
            let estimate = final_sum(&heap);
            return Err(Error::Accuracy {
                estimate,
                achieved: total_err,
                requested: tol,
            });
        }
        let worst = heap.pop().expect("non-empty panel queue");
        total_err -= worst.err;
        total_val -= worst.val;
        total_resabs -= worst.resabs;
        let mid = 0.5 * (worst.a + worst.b);
        for (pa, pb) in [(worst.a, mid), (mid, worst.b)] {
            let (val, err, resabs) = qk15(&f, pa, pb);
            total_err += err;
            total_val += val;
            total_resabs += resabs;
            heap.push(Panel {
                a: pa,
                b: pb,
                val,
                err,
                resabs,
                seq: {
                    seq += 1;
                    seq
                },
            });
        }
        splits += 1;
    }
}
