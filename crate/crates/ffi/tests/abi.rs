use chatelet_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(chatelet_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn surface_lifecycle_and_decision() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { chatelet_surface_new(1, -2, -1, 3, &mut s) }, ChateletStatus::Ok);
    let mut coeffs = [0i64; 4];
    assert_eq!(unsafe { chatelet_surface_coefficients(s, coeffs.as_mut_ptr()) }, ChateletStatus::Ok);
    assert_eq!(coeffs, [1, -2, -1, 3]);
    let mut d = ChateletDecision { verdict: ChateletVerdict::RationalPoint, obstruction_place: 9, epsilon: [0, 0] };
    assert_eq!(unsafe { chatelet_decide(s, &mut d) }, ChateletStatus::Ok);
    assert_eq!(d.verdict, ChateletVerdict::HasseFailure);
    assert_eq!(d.epsilon, [1, 1]);
    unsafe { chatelet_surface_free(s) };
    unsafe { chatelet_surface_free(ptr::null_mut()) };
}

#[test]
fn errors_are_reported() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { chatelet_surface_new(0, 1, 1, 1, &mut s) }, ChateletStatus::ZeroCoefficient);
    assert!(s.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { chatelet_surface_new(1, 1, 1, 1, ptr::null_mut()) }, ChateletStatus::NullPointer);
    let mut x = 0.0;
    assert_eq!(unsafe { chatelet_density_bruteforce(2, 9, &mut x) }, ChateletStatus::BudgetExceeded);
    assert!(last_error().contains("budget"));
}

#[test]
fn constants_through_the_abi() {
    let (mut n, mut d) = (0i64, 0i64);
    assert_eq!(unsafe { chatelet_tau_loc2(&mut n, &mut d) }, ChateletStatus::Ok);
    assert_eq!((n, d), (4751, 9216));
    assert_eq!(unsafe { chatelet_tau2_component(1, 3, &mut n, &mut d) }, ChateletStatus::Ok);
    assert_eq!((n, d), (95, 2048));
    assert_eq!(unsafe { chatelet_tau2_component(2, 0, &mut n, &mut d) }, ChateletStatus::Domain);
    let (mut v, mut t) = (0.0, 0.0);
    let status = unsafe { chatelet_euler_product(ChateletProduct::HasseRatio, 10_000, &mut v, &mut t) };
    assert_eq!(status, ChateletStatus::Ok);
    assert!((v - 0.8336897).abs() < 1e-6 && t < 1e-10);
}

#[test]
fn cli_through_the_abi() {
    let args: Vec<CString> = ["decide", "1", "-2", "-1", "3", "--json"].iter().map(|s| CString::new(*s).unwrap()).collect();
    let ptrs: Vec<_> = args.iter().map(|s| s.as_ptr()).collect();
    let mut out = ptr::null_mut();
    let mut code = -1;
    assert_eq!(unsafe { chatelet_cli_run(ptrs.as_ptr(), ptrs.len(), &mut out, &mut code) }, ChateletStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_string_lossy().into_owned();
    unsafe { chatelet_string_free(out) };
    assert_eq!(code, 0);
    assert!(text.contains("\"status\":\"hasse_failure\""));
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(chatelet_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
