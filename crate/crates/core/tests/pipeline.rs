use aedcst::codec::{compress_block, hybrid_decode, hybrid_encode, CompressedBlockStream};
use aedcst::metrics::prd;
use aedcst::model::{init_params, Activation, Domain, Model, ModelConfig};
use aedcst::pipeline::*;
use std::f64::consts::PI;

fn dft_mag(x: &[f64], bin: usize) -> f64 {
    let n = x.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (i, v) in x.iter().enumerate() {
        let a = 2.0 * PI * bin as f64 * i as f64 / n;
        re += v * a.cos();
        im -= v * a.sin();
    }
    (re * re + im * im).sqrt()
}

#[test]
fn synthetic_peaks() {
    let spec = SyntheticSpec {
        samples: 5120,
        tones: vec![Tone { freq: 300.0, amp: 1.0, phase: 0.0 }, Tone { freq: 900.0, amp: 0.4, phase: 1.0 }],
        am_depth: 0.0,
        noise_std: 0.05,
        ..SyntheticSpec::default()
    };
    let x = generate_synthetic(&spec).unwrap();
    let floor: f64 = [100, 450, 1500, 2000].iter().map(|&b| dft_mag(&x, b)).fold(0.0, f64::max);
    assert!(dft_mag(&x, 300) > 50.0 * floor);
    assert!(dft_mag(&x, 900) > 20.0 * floor);

    // default spec: the strongest bin near each tone sits within 2 Hz of it
    let spec = SyntheticSpec { samples: 5120, ..SyntheticSpec::default() };
    let x = generate_synthetic(&spec).unwrap();
    for t in &spec.tones {
        let centre = t.freq.round() as usize;
        let peak = (centre - 10..=centre + 10).max_by(|&a, &b| dft_mag(&x, a).total_cmp(&dft_mag(&x, b))).unwrap();
        assert!((peak as f64 - t.freq).abs() <= 2.0, "tone {} peak {peak}", t.freq);
    }
}

#[test]
fn dct_and_dcst_agree_when_orthogonal_path() {
    let x = generate_synthetic(&SyntheticSpec::default()).unwrap();
    let ds = prepare(&x, 0.2, 80).unwrap();
    let mut p = init_params(0, &ModelConfig { activation: Activation::Identity, ..ModelConfig::default() }).unwrap();
    p.t = vec![0.0; 64];
    p.v = vec![1.0; 64];
    p.w1 = (0..64 * 80).map(|i| if i / 80 == i % 80 { 1.0 } else { 0.0 }).collect();
    p.w2 = (0..80 * 64).map(|i| if i / 64 == i % 64 { 1.0 } else { 0.0 }).collect();
    let mut q = p.clone();
    q.domain = Domain::Dct;
    let (a, b) = (Model::new(p).unwrap(), Model::new(q).unwrap());
    let orig = ds.test.concat();
    let ra: Vec<f64> = ds.test.iter().flat_map(|x| a.reconstruct(x).unwrap()).collect();
    let rb: Vec<f64> = ds.test.iter().flat_map(|x| b.reconstruct(x).unwrap()).collect();
    assert!((prd(&orig, &ra).unwrap() - prd(&orig, &rb).unwrap()).abs() < 1e-9);
}

#[test]
fn ingestion_is_deterministic_and_reversible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let vals: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.05).sin() * 0.003 + 0.001).collect();
    let text: String = vals.iter().enumerate().map(|(i, v)| format!("{i},x,{v:.9}\n")).collect();
    std::fs::write(&path, format!("idx,label,value\n{text}")).unwrap();
    let spec = DatasetSpec { path, column: 2, ..DatasetSpec::default() };
    let a = ingest(&spec).unwrap();
    assert_eq!(a, ingest(&spec).unwrap());
    assert_eq!(a.skipped_rows, 1);
    assert_eq!((a.train.len(), a.test.len(), a.dropped), (2, 10, 40));
    for (v, n) in vals.iter().zip(a.train.iter().chain(&a.test).flatten()) {
        assert!((a.norm.to_source(*n) - (v * 1e6).round() / 1e6).abs() < 1e-12);
    }
    assert!(ingest(&DatasetSpec { column: 9, ..spec.clone() }).is_err());
}

#[test]
fn file_mediated_stream_matches_in_process() {
    let x = generate_synthetic(&SyntheticSpec::default()).unwrap();
    let ds = prepare(&x, 0.2, 80).unwrap();
    let m = Model::new(init_params(3, &ModelConfig { threshold_fallback: 0.005, ..ModelConfig::default() }).unwrap()).unwrap();
    let q: Vec<_> = ds.test.iter().map(|b| compress_block(b, &m, 3.5, 3).unwrap()).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.bin");
    hybrid_encode(&q, 80, 3, 3.5).unwrap().save(&path).unwrap();
    assert_eq!(hybrid_decode(&CompressedBlockStream::load(&path).unwrap()).unwrap(), q);
}

#[test]
fn variants_run() {
    let x = generate_synthetic(&SyntheticSpec { samples: 8000, ..SyntheticSpec::default() }).unwrap();
    let ds = prepare(&x, 0.2, 80).unwrap();
    let cfg = RunConfig::default();
    for v in [Variant::AeDcst, Variant::AeDct, Variant::StandardDcst] {
        let r = run_variant(v, &ds, &cfg).unwrap();
        assert!(r.evaluation.report.cr > 0.0 && r.evaluation.report.prd >= 0.0);
        assert_eq!(r.training.is_some(), v != Variant::StandardDcst);
        if let Some(p) = r.params() {
            assert_eq!(p.domain, if v == Variant::AeDct { Domain::Dct } else { Domain::Dcst });
        }
    }
    let std = run_variant(Variant::StandardDcst, &ds, &cfg).unwrap();
    assert!(std.evaluation.report.n_coe <= 38.0);
}
