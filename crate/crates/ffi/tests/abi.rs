use std::ffi::{CStr, CString};
use std::ptr;

use qbnet_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = qbnet_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn catalog(id: &str, params: &str) -> *mut QbnetNet {
    let mut net = ptr::null_mut();
    let st = unsafe { qbnet_catalog_build(c(id).as_ptr(), c(params).as_ptr(), &mut net) };
    assert_eq!(st, QbnetStatus::Ok);
    net
}

#[test]
fn loop_conditional_and_fqna() {
    let net = catalog("fig19-loop", "");
    let mut p = 0.0;
    let h = c("u.plus=1");
    unsafe {
        assert_eq!(
            qbnet_conditional(net, QbnetMode::Quantum, h.as_ptr(), ptr::null(), &mut p),
            QbnetStatus::Ok
        );
        assert!((p - 0.707813468889).abs() < 1e-11);
        let mut q = 0.0;
        assert_eq!(
            qbnet_conditional(net, QbnetMode::PathSum, h.as_ptr(), ptr::null(), &mut q),
            QbnetStatus::Ok
        );
        assert!((p - q).abs() < 1e-12);
        assert_eq!(
            qbnet_conditional(net, QbnetMode::Classical, h.as_ptr(), ptr::null(), &mut q),
            QbnetStatus::Ok
        );
        assert!((q - 0.5).abs() < 1e-15);

        let mut f = 0.0;
        let e = c("u.plus=0");
        assert_eq!(
            qbnet_f_qna(net, c("z.plus").as_ptr(), e.as_ptr(), &mut f),
            QbnetStatus::Ok
        );
        assert!((f - 1.0).abs() > 1e-6);

        let bad = c("z.plus=0; z.minus=0");
        let st = qbnet_conditional(net, QbnetMode::Quantum, h.as_ptr(), bad.as_ptr(), &mut p);
        assert_eq!(st, QbnetStatus::ContradictoryEvidence);
        assert!(last_error().contains("contradictory"));

        let mut w = 0.0;
        assert_eq!(qbnet_chi(net, ptr::null(), &mut w), QbnetStatus::Ok);
        assert!((w - 1.0).abs() < 1e-12);
        qbnet_net_free(net);
    }
}

#[test]
fn text_round_trip_and_validation() {
    let net = catalog("fig28", "xi=0");
    unsafe {
        let mut q = -1;
        assert_eq!(qbnet_net_is_quantum(net, &mut q), QbnetStatus::Ok);
        assert_eq!(q, 1);
        let (mut n, mut report) = (0usize, ptr::null_mut());
        assert_eq!(qbnet_validate(net, &mut n, &mut report), QbnetStatus::Ok);
        assert!(n > 0);
        assert_eq!(CStr::from_ptr(report).to_str().unwrap().lines().count(), n);
        qbnet_string_free(report);

        let mut text = ptr::null_mut();
        assert_eq!(qbnet_net_to_text(net, &mut text), QbnetStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qbnet_net_from_text(text, &mut back), QbnetStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(qbnet_net_to_text(back, &mut again), QbnetStatus::Ok);
        assert_eq!(CStr::from_ptr(text), CStr::from_ptr(again));
        qbnet_string_free(text);
        qbnet_string_free(again);
        qbnet_net_free(back);
        qbnet_net_free(net);
    }
}

#[test]
fn errors_carry_codes() {
    let mut net = ptr::null_mut();
    unsafe {
        assert_eq!(
            qbnet_catalog_build(c("nope").as_ptr(), ptr::null(), &mut net),
            QbnetStatus::UnknownName
        );
        assert!(net.is_null());
        assert_eq!(
            qbnet_catalog_build(c("fig28").as_ptr(), c("bogus=1").as_ptr(), &mut net),
            QbnetStatus::InvalidParams
        );
        assert_eq!(
            qbnet_net_from_text(c("qbnet 1\nkind fuzzy\n").as_ptr(), &mut net),
            QbnetStatus::Parse
        );
        assert!(last_error().starts_with("line 2"));
        assert_eq!(qbnet_net_from_text(ptr::null(), &mut net), QbnetStatus::NullArgument);
        let bytes = [0xffu8, 0];
        assert_eq!(
            qbnet_net_from_text(bytes.as_ptr().cast(), &mut net),
            QbnetStatus::InvalidUtf8
        );
        assert_eq!(
            qbnet_net_from_file(c("/nonexistent/x.net").as_ptr(), &mut net),
            QbnetStatus::Io
        );

        let mut p = 0.0;
        let chain = catalog("fig3c-chain", "");
        let st = qbnet_conditional(chain, QbnetMode::Quantum, c("x=1").as_ptr(), ptr::null(), &mut p);
        assert_eq!(st, QbnetStatus::InvalidQuery);
        let st = qbnet_conditional(chain, QbnetMode::Classical, c("w=1").as_ptr(), ptr::null(), &mut p);
        assert_eq!(st, QbnetStatus::UnknownName);
        let st = qbnet_conditional(chain, QbnetMode::Classical, c("x={0 1}").as_ptr(), ptr::null(), &mut p);
        assert_eq!(st, QbnetStatus::InvalidQuery);
        let st = qbnet_conditional(
            ptr::null(),
            QbnetMode::Classical,
            c("x=1").as_ptr(),
            ptr::null(),
            &mut p,
        );
        assert_eq!(st, QbnetStatus::NullArgument);
        assert_eq!(
            qbnet_conditional(
                chain,
                QbnetMode::Classical,
                c("x=1").as_ptr(),
                c("z=1").as_ptr(),
                &mut p
            ),
            QbnetStatus::Ok
        );
        qbnet_net_free(chain);
        qbnet_net_free(ptr::null_mut());
    }
}

#[test]
fn lattice_buffer() {
    let mut len = 0;
    let mut buf = vec![0.0; 16];
    unsafe {
        let st = qbnet_lattice_propagate(16, 0.5, 3, 0.1, QbnetKernel::Exact, buf.as_mut_ptr(), 8, &mut len);
        assert_eq!(st, QbnetStatus::BufferTooSmall);
        assert_eq!(len, 16);
        let mut buf = vec![0.0; 32];
        let st = qbnet_lattice_propagate(16, 0.5, 3, 0.1, QbnetKernel::Exact, buf.as_mut_ptr(), 16, &mut len);
        assert_eq!(st, QbnetStatus::Ok);
        let norm: f64 = buf.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let st = qbnet_lattice_propagate(0, 0.5, 3, 0.1, QbnetKernel::Exact, buf.as_mut_ptr(), 16, &mut len);
        assert_eq!(st, QbnetStatus::InvalidParams);
    }
}

#[test]
fn errors_are_per_thread() {
    let mut net = ptr::null_mut();
    unsafe { qbnet_catalog_build(c("nope").as_ptr(), ptr::null(), &mut net) };
    let other = std::thread::spawn(|| qbnet_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(last_error().contains("nope"));
}
