use std::ffi::{CStr, CString};
use std::ptr;

use fashion_abm_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fabm_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn kernels_match_core() {
    let mut out = 0.0;
    let attrs = [0.0; 9];
    unsafe {
        assert_eq!(fabm_purchase_probability(attrs.as_ptr(), &mut out), FabmStatus::Ok);
        assert!((out - 0.7450).abs() < 1e-12);

        assert_eq!(fabm_sm_feedback(0.5, 0.5, 0.0, &mut out), FabmStatus::Ok);
        assert_eq!(out, fashion_abm::influence::sm_feedback(0.5, 0.5, 0.0));

        assert_eq!(fabm_blend(0.2, 0.8, 0.5, 2.0, &mut out), FabmStatus::Ok);
        assert_eq!(out, fashion_abm::influence::blend(0.2, 0.8, 0.5, 2.0));

        assert_eq!(fabm_gov_feedback(0.9, 1.5, &mut out), FabmStatus::Ok);
        assert_eq!(out, 0.95);

        assert_eq!(fabm_fatigue_step(0.5, 14, 0.00125, &mut out), FabmStatus::Ok);
        assert_eq!(out, 0.5 * (-0.0025f64).exp());

        let peers = [FabmPeerTerm { opinion: 0.9, behavior: 0.9, s_pp: 0.2 }];
        assert_eq!(fabm_peer_update(0.1, 0.5, peers.as_ptr(), 1, 0.5, &mut out), FabmStatus::Ok);
        let expected = 0.5 * 0.1 + 0.5 * (1.0 - 0.9);
        assert!((out - expected).abs() < 1e-12, "{out}");
        assert_eq!(fabm_peer_update(0.1, 0.5, ptr::null(), 0, -1.0, &mut out), FabmStatus::Ok);
        assert_eq!(out, 0.1);
    }
}

#[test]
fn argument_errors_set_status_and_message() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(fabm_blend(1.5, 0.5, 0.5, 2.0, &mut out), FabmStatus::OutOfRange);
        assert!(last_error().contains("prior"), "{}", last_error());
        assert_eq!(fabm_sm_feedback(0.5, 0.5, f64::NAN, &mut out), FabmStatus::InvalidArgument);
        assert_eq!(fabm_gov_feedback(0.5, 1.0, ptr::null_mut()), FabmStatus::NullPointer);
        assert_eq!(fabm_purchase_probability(ptr::null(), &mut out), FabmStatus::NullPointer);
        assert_eq!(fabm_peer_update(0.5, 0.5, ptr::null(), 2, 0.1, &mut out), FabmStatus::NullPointer);
    }
}

#[test]
fn presets_are_listed() {
    assert_eq!(fabm_preset_count(), 13);
    let names: Vec<String> = (0..fabm_preset_count())
        .map(|i| unsafe { CStr::from_ptr(fabm_preset_name(i)) }.to_str().unwrap().to_string())
        .collect();
    assert_eq!(names, fashion_abm::presets::PRESET_NAMES);
    assert!(fabm_preset_name(13).is_null());

    let mut cells = 0usize;
    let c1 = CString::new("C1").unwrap();
    assert_eq!(unsafe { fabm_preset_cell_count(c1.as_ptr(), &mut cells) }, FabmStatus::Ok);
    assert_eq!(cells, 5);
    let bad = CString::new("Q7").unwrap();
    assert_eq!(
        unsafe { fabm_preset_cell_count(bad.as_ptr(), &mut cells) },
        FabmStatus::InvalidArgument
    );
}

#[test]
fn simulation_lifecycle_matches_core() {
    let config = CString::new("preset = \"C4\"\n[engine]\nticks = 12\ncampaign_stop_tick = 6\nseed = 9\n").unwrap();
    let mut sim: *mut FabmSimulation = ptr::null_mut();
    unsafe {
        assert_eq!(fabm_simulation_from_config(config.as_ptr(), 2, &mut sim), FabmStatus::Ok);
        assert!(!sim.is_null());

        let mut advanced = false;
        assert_eq!(fabm_simulation_step(sim, &mut advanced), FabmStatus::Ok);
        assert!(advanced);
        assert_eq!(fabm_simulation_run(sim), FabmStatus::Ok);
        assert_eq!(fabm_simulation_step(sim, &mut advanced), FabmStatus::Ok);
        assert!(!advanced);

        let mut tick = 0u64;
        assert_eq!(fabm_simulation_tick(sim, &mut tick), FabmStatus::Ok);
        assert_eq!(tick, 12);
        let mut n = 0usize;
        assert_eq!(fabm_simulation_agent_count(sim, &mut n), FabmStatus::Ok);
        assert_eq!(n, 1050);

        let mut mean = 0.0;
        assert_eq!(
            fabm_simulation_mean(sim, FabmTracked::PurchaseProb as u32, &mut mean),
            FabmStatus::Ok
        );
        let mut scenario = fashion_abm::parse_config(config.to_str().unwrap()).unwrap();
        scenario.grid.clear();
        scenario.kernels.tau = Some(0.3);
        let expected = fashion_abm::run(&scenario).unwrap();
        let want = *expected.metrics.mean(fashion_abm::Tracked::PurchaseProb).last().unwrap();
        assert_eq!(mean, want);
        assert_eq!(fabm_simulation_mean(sim, 6, &mut mean), FabmStatus::InvalidArgument);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
        assert_eq!(fabm_simulation_write_outputs(sim, path.as_ptr()), FabmStatus::Ok);
        for kind in fashion_abm::OutputKind::ALL {
            assert!(dir.path().join("out").join(kind.file_name()).is_file());
        }
        fabm_simulation_free(sim);
        fabm_simulation_free(ptr::null_mut());
    }
}

#[test]
fn preset_seed_and_cell_errors() {
    let name = CString::new("A1").unwrap();
    let mut sim: *mut FabmSimulation = ptr::null_mut();
    unsafe {
        assert_eq!(fabm_simulation_from_preset(name.as_ptr(), 3, 1, &mut sim), FabmStatus::OutOfRange);
        assert!(last_error().contains("3 cells"), "{}", last_error());
        assert!(sim.is_null());

        let bad = CString::new("[kernels]\nzeta = 2.0\n").unwrap();
        assert_eq!(fabm_simulation_from_config(bad.as_ptr(), 0, &mut sim), FabmStatus::OutOfRange);
        assert!(last_error().contains("[0.5, 1.5]"), "{}", last_error());

        let broken = CString::new("[kernels\n").unwrap();
        assert_eq!(fabm_simulation_from_config(broken.as_ptr(), 0, &mut sim), FabmStatus::Parse);

        assert_eq!(fabm_simulation_run(ptr::null_mut()), FabmStatus::NullPointer);

        assert_eq!(fabm_simulation_from_preset(name.as_ptr(), 0, 5, &mut sim), FabmStatus::Ok);
        let mut tick = 99;
        assert_eq!(fabm_simulation_tick(sim, &mut tick), FabmStatus::Ok);
        assert_eq!(tick, 0);
        fabm_simulation_free(sim);
    }
}
