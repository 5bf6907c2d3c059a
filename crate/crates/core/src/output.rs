//! CSV tables for plotting. Floats use the shortest round-trip formatting,
//! so identical inputs give byte-identical files.

use std::fmt::Write;

use crate::grid::{GridDomain, NodeClass};
use crate::infconv::InfConvResult;
use crate::operator::{NonlocalOperator, OperatorEval};
use crate::problem::Field;

fn coord_header(domain: &GridDomain) -> &'static str {
    if domain.dim() == 2 {
        "x,y"
    } else {
        "x"
    }
}

fn coords(domain: &GridDomain, node: usize) -> String {
    let p = domain.coord(node);
    if domain.dim() == 2 {
        format!("{},{}", p[0], p[1])
    } else {
        format!("{}", p[0])
    }
}

fn class_name(c: NodeClass) -> &'static str {
    match c {
        NodeClass::Interior => "interior",
        NodeClass::Exterior => "exterior",
    }
}

/// `node,x[,y],class,u,residual`; the residual `L u - f` is left empty off the domain.
pub fn solution_csv(op: &NonlocalOperator, u: &Field, f: &[f64]) -> String {
    let domain = op.domain();
    let mut residual = vec![None; domain.len()];
    for (&x, e) in domain.interior().iter().zip(op.evaluate_interior(u)) {
        residual[x] = Some(e.l_inf - f[x]);
    }
    let mut out = format!("node,{},class,u,residual\n", coord_header(domain));
    for i in 0..domain.len() {
        let r = residual[i].map(|r| r.to_string()).unwrap_or_default();
        writeln!(out, "{i},{},{},{},{r}", coords(domain, i), class_name(domain.class(i)), u[i]).unwrap();
    }
    out
}

/// `node,u,u_eps,xstar,distance,r_eps,margin` with `margin = r_eps + h - distance`.
pub fn infconv_csv(domain: &GridDomain, u: &Field, reg: &InfConvResult) -> String {
    let mut out = String::from("node,u,u_eps,xstar,distance,r_eps,margin\n");
    for i in 0..domain.len() {
        let d = domain.distance(i, reg.argmin[i]);
        let margin = reg.r_eps + domain.h() - d;
        writeln!(out, "{i},{},{},{},{d},{},{margin}", u[i], reg.u_eps[i], reg.argmin[i], reg.r_eps).unwrap();
    }
    out
}

/// `node,l_minus,l_plus,l_inf,argmin,argmax` over Interior nodes.
pub fn operator_csv(domain: &GridDomain, evals: &[OperatorEval]) -> String {
    let mut out = String::from("node,l_minus,l_plus,l_inf,argmin,argmax\n");
    for (&x, e) in domain.interior().iter().zip(evals) {
        writeln!(out, "{x},{},{},{},{},{}", e.l_minus, e.l_plus, e.l_inf, e.argmin, e.argmax).unwrap();
    }
    out
}
