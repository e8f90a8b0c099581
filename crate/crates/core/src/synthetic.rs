//! Seeded generator of vitals/demographics tables with the same schema as a
//! real EHR extract, for exercising the pipeline end to end.
//!
//! Population model (all draws truncated normals unless noted):
//!
//! | quantity       | distribution                                             |
//! |----------------|----------------------------------------------------------|
//! | age            | uniform integer in 18..=85                               |
//! | gender         | Bernoulli(0.5), 1 = female                               |
//! | height (cm)    | male N(176, 7) in [150, 205]; female N(163, 6.5) in [140, 190] |
//! | baseline BMI   | N(28, 5.5) in [16, 55]                                   |
//! | visits         | uniform 1..=8, dated 2009-2012                           |
//! | weight (kg)    | BMI x height^2, x (1 + N(0, 0.02)) per visit             |
//! | systolic BP    | 112 + 0.35 (age - 45) + 0.9 (BMI - 28) + N(0, 10), in [80, 220] |
//! | diastolic BP   | 72 + 0.1 (age - 45) + 0.5 (BMI - 28) + N(0, 7), in [45, 130]    |
//!
//! Each vital cell is independently zeroed ("not recorded") with probability
//! 0.05. The label is Bernoulli(sigmoid(-1.3 + 0.3 (BMI - 28) + 0.07 (age - 50))).

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::math::sigmoid;
use crate::vitals::{Demographics, RawVitalsRecord, VisitDate};

pub const MISSING_RATE: f64 = 0.05;

fn truncated_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let dist = Normal::new(mean, sd).expect("positive spread");
    for _ in 0..64 {
        let v = dist.sample(rng);
        if (lo..=hi).contains(&v) {
            return v;
        }
    }
    mean.clamp(lo, hi)
}

fn round1(v: f64) -> f64 {
    libm::round(v * 10.0) / 10.0
}

/// Generates `n_patients` patients with 1 to 8 visits each. Output is fully
/// determined by `seed`.
pub fn generate_synthetic_vitals(
    n_patients: usize,
    seed: u64,
) -> (Vec<RawVitalsRecord>, Vec<Demographics>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut demographics = Vec::with_capacity(n_patients);
    let jitter = Normal::new(0.0, 1.0).expect("unit normal");

    for p in 0..n_patients {
        let patient_id = format!("P{:06}", p + 1);
        let age = f64::from(rng.random_range(18u32..=85));
        let gender: u8 = u8::from(rng.random_bool(0.5));
        let height = if gender == 0 {
            truncated_normal(&mut rng, 176.0, 7.0, 150.0, 205.0)
        } else {
            truncated_normal(&mut rng, 163.0, 6.5, 140.0, 190.0)
        };
        let bmi_base = truncated_normal(&mut rng, 28.0, 5.5, 16.0, 55.0);
        let risk = -1.3 + 0.3 * (bmi_base - 28.0) + 0.07 * (age - 50.0);
        let label = u8::from(rng.random_bool(sigmoid(risk)));

        let n_visits = rng.random_range(1usize..=8);
        let mut dates: Vec<VisitDate> = (0..n_visits)
            .map(|_| VisitDate {
                year: rng.random_range(2009u16..=2012),
                month: rng.random_range(1u8..=12),
                day: rng.random_range(1u8..=28),
            })
            .collect();
        dates.sort_unstable();

        for visit_date in dates {
            let h = height + 0.5 * jitter.sample(&mut rng);
            let m = h / 100.0;
            let weight = bmi_base * m * m * (1.0 + 0.02 * jitter.sample(&mut rng));
            let bmi = weight / (m * m);
            let sbp = (112.0
                + 0.35 * (age - 45.0)
                + 0.9 * (bmi_base - 28.0)
                + 10.0 * jitter.sample(&mut rng))
            .clamp(80.0, 220.0);
            let dbp = (72.0
                + 0.1 * (age - 45.0)
                + 0.5 * (bmi_base - 28.0)
                + 7.0 * jitter.sample(&mut rng))
            .clamp(45.0, 130.0);
            let mut cell = |v: f64| {
                if rng.random_bool(MISSING_RATE) {
                    0.0
                } else {
                    round1(v)
                }
            };
            records.push(RawVitalsRecord {
                patient_id: patient_id.clone(),
                visit_date,
                weight: cell(weight),
                height: cell(h),
                bmi: cell(bmi),
                systolic_bp: cell(sbp),
                diastolic_bp: cell(dbp),
            });
        }
        demographics.push(Demographics {
            patient_id,
            age,
            gender,
            label,
        });
    }
    (records, demographics)
}
