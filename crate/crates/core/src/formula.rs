//! Human-readable formulas for kernel expressions.
//!
//! Each distinct subtree becomes one named definition; the last line defines
//! `K(z,w)` itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::domain::{BaseWeight, DomainKind};
use crate::expr::{KernelExpr, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaFormat {
    Latex,
    Plain,
}

pub fn to_formula(k: &KernelExpr, format: FormulaFormat) -> String {
    let mut w = Writer {
        format,
        names: HashMap::new(),
        lines: Vec::new(),
        next: 0,
    };
    w.visit(k, true);
    w.lines.join("\n")
}

struct Writer {
    format: FormulaFormat,
    names: HashMap<usize, String>,
    lines: Vec<String>,
    next: usize,
}

impl Writer {
    fn latex(&self) -> bool {
        self.format == FormulaFormat::Latex
    }

    fn visit(&mut self, k: &KernelExpr, root: bool) -> String {
        if let Some(n) = self.names.get(&k.ptr_id()) {
            return n.clone();
        }
        let body = match k.node() {
            Node::Base(b) => self.base(b.weight, k.domain().kind()),
            Node::RationalDivide { inner, factor } => {
                let a = self.visit(inner, false);
                let num = self.factor_pair(factor.poles());
                let den = self.factor_pair(factor.zeros());
                let call = self.call(&a, "z", "w");
                match (num.is_empty(), den.is_empty(), self.latex()) {
                    (_, true, true) => format!("{num}\\,{call}"),
                    (_, true, false) => format!("{num}*{call}"),
                    (true, false, true) => format!("\\frac{{{call}}}{{{den}}}"),
                    (true, false, false) => format!("{call}/({den})"),
                    (false, false, true) => format!("\\frac{{{num}\\,{call}}}{{{den}}}"),
                    (false, false, false) => format!("{num}*{call}/({den})"),
                }
            }
            Node::RankOneDeflate { inner, center, .. } => {
                let a = self.visit(inner, false);
                let c = self.point(*center);
                let lin = self.factor_pair(&[(*center, 1)]);
                let full = self.call(&a, "z", "w");
                let left = self.call(&a, "z", &c);
                let right = self.call(&a, &c, "w");
                let diag = self.call(&a, &c, &c);
                if self.latex() {
                    format!(
                        "\\frac{{{full}}}{{{lin}}} - \\frac{{{left}\\,{right}}}{{{lin}\\,{diag}}}"
                    )
                } else {
                    format!("{full}/({lin}) - {left}*{right}/(({lin})*{diag})")
                }
            }
            Node::DirectSum {
                inner,
                centers,
                terms,
                ..
            } => {
                let a = self.visit(inner, false);
                let p = self.factor_pair(centers);
                let full = self.call(&a, "z", "w");
                let mut parts = Vec::new();
                for t in terms {
                    let b = self.visit(&t.kernel, false);
                    let c = self.point(t.center);
                    let pjk = self.factor_pair(&p_jk(centers, t.index));
                    let left = self.call(&b, "z", &c);
                    let right = self.call(&b, &c, "w");
                    let diag = self.call(&b, &c, &c);
                    parts.push(if self.latex() {
                        format!("\\frac{{{left}\\,{right}}}{{{pjk}\\,{diag}}}")
                    } else {
                        format!("{left}*{right}/(({pjk})*{diag})")
                    });
                }
                let head = if self.latex() {
                    format!("\\frac{{{full}}}{{{p}}}")
                } else {
                    format!("{full}/({p})")
                };
                format!("{head} - {}", parts.join(" - "))
            }
            Node::Transport { inner, map } => {
                let a = self.visit(inner, false);
                let f = self.mobius(map.a(), map.theta());
                if self.latex() {
                    format!(
                        "f'(z)\\,{}\\,\\overline{{f'(w)}},\\quad f(z) = {f}",
                        self.call(&a, "f(z)", "f(w)")
                    )
                } else {
                    format!(
                        "f'(z)*{}*conj(f'(w)), f(z) = {f}",
                        self.call(&a, "f(z)", "f(w)")
                    )
                }
            }
        };
        let name = if root {
            "K".to_string()
        } else {
            let n = if self.latex() {
                format!("K_{{{}}}", self.next)
            } else {
                format!("K{}", self.next)
            };
            self.next += 1;
            n
        };
        self.lines.push(format!("{} = {body}", self.call(&name, "z", "w")));
        self.names.insert(k.ptr_id(), name.clone());
        name
    }

    fn call(&self, name: &str, a: &str, b: &str) -> String {
        format!("{name}({a},{b})")
    }

    fn point(&self, c: Complex64) -> String {
        let s = num(c);
        if c.im != 0.0 {
            format!("({s})")
        } else {
            s
        }
    }

    /// `(z - c)` with a tidy sign.
    fn linear(&self, var: &str, c: Complex64) -> String {
        if c == Complex64::new(0.0, 0.0) {
            return var.to_string();
        }
        if c.im == 0.0 {
            if c.re > 0.0 {
                format!("({var}-{})", real(c.re))
            } else {
                format!("({var}+{})", real(-c.re))
            }
        } else {
            format!("({var}-({}))", num(c))
        }
    }

    fn power(&self, base: String, m: usize) -> String {
        if m == 1 {
            base
        } else if self.latex() {
            format!("{base}^{{{m}}}")
        } else {
            format!("{base}^{m}")
        }
    }

    /// `prod (z - c)^m (conj(w) - conj(c))^m`, or the empty string.
    fn factor_pair(&self, list: &[(Complex64, usize)]) -> String {
        let wbar = if self.latex() { "\\overline{w}" } else { "conj(w)" };
        let sep = if self.latex() { "" } else { "*" };
        let mut parts = Vec::new();
        for &(c, m) in list {
            if m == 0 {
                continue;
            }
            parts.push(self.power(self.linear("z", c), m));
            parts.push(self.power(self.linear(wbar, c.conj()), m));
        }
        parts.join(sep)
    }

    fn mobius(&self, a: Complex64, theta: f64) -> String {
        let lin = self.linear("z", a);
        let abar = self.point(a.conj());
        if self.latex() {
            format!("e^{{i\\,{}}}\\frac{{{lin}}}{{1-{abar}z}}", real(theta))
        } else {
            format!("exp(i*{})*{lin}/(1-{abar}*z)", real(theta))
        }
    }

    fn base(&self, weight: BaseWeight, kind: DomainKind) -> String {
        let scale = weight.scale();
        let alpha = weight.alpha();
        let latex = self.latex();
        let pi = if scale == 1.0 {
            if latex { "\\pi".to_string() } else { "pi".to_string() }
        } else if latex {
            format!("{}\\pi", real(scale))
        } else {
            format!("pi*{}", real(scale))
        };
        match kind {
            DomainKind::UnitDisk => {
                let half = alpha / 2.0;
                let sign = if half < 0.0 { '+' } else { '-' };
                let numer = if alpha == 0.0 {
                    "1".to_string()
                } else if latex {
                    let c = if half.abs() == 1.0 { String::new() } else { real(half.abs()) };
                    format!("{}{sign}{c}z\\overline{{w}}", real(1.0 + half))
                } else {
                    let c = if half.abs() == 1.0 { String::new() } else { format!("{}*", real(half.abs())) };
                    format!("({}{sign}{c}z*conj(w))", real(1.0 + half))
                };
                if latex {
                    format!("\\frac{{{numer}}}{{{pi}(1-z\\overline{{w}})^2}}")
                } else {
                    format!("{numer}/({pi}*(1-z*conj(w))^2)")
                }
            }
            DomainKind::Annulus { inner_radius } => {
                let r = real(inner_radius);
                if latex {
                    format!(
                        "\\frac{{\\pi}}{{{pi}}}\\sum_{{n\\in\\mathbb{{Z}}}} \\frac{{(z\\overline{{w}})^n}}{{h_n}},\\quad h_n = \\frac{{\\pi(1-r^{{2n+2}})}}{{n+1}},\\ h_{{-1}} = 2\\pi\\ln(1/r),\\ r = {r}"
                    )
                } else {
                    format!(
                        "(pi/({pi}))*sum_(n in Z) (z*conj(w))^n/h_n, h_n = pi*(1-r^(2n+2))/(n+1), h_(-1) = 2*pi*ln(1/r), r = {r}"
                    )
                }
            }
        }
    }
}

/// `p_{jk} = prod_{i<j} (z - c_i)^{m_i} (z - c_j)^k`.
fn p_jk(centers: &[(Complex64, usize)], (j, k): (usize, usize)) -> Vec<(Complex64, usize)> {
    let mut out: Vec<_> = centers[..j - 1].to_vec();
    out.push((centers[j - 1].0, k));
    out
}

fn real(x: f64) -> String {
    format!("{x}")
}

fn num(c: Complex64) -> String {
    if c.im == 0.0 {
        real(c.re)
    } else if c.re == 0.0 {
        format!("{}i", real(c.im))
    } else if c.im > 0.0 {
        format!("{}+{}i", real(c.re), real(c.im))
    } else {
        format!("{}-{}i", real(c.re), real(-c.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{multi_zero_augment, pole_divide, zero_augment, DecompositionPlan, PlanMode};

    #[test]
    fn disk_plain() {
        let f = to_formula(&KernelExpr::disk(), FormulaFormat::Plain);
        assert!(f.contains("1/(pi*(1-z*conj(w))^2)"), "{f}");
    }

    #[test]
    fn pole_divide_plain() {
        let k = pole_divide(&KernelExpr::disk(), &[(Complex64::new(2.0, 0.0), 1)]).unwrap();
        let f = to_formula(&k, FormulaFormat::Plain);
        assert!(f.contains("(z-2)") && f.contains("(conj(w)-2)"), "{f}");
    }

    #[test]
    fn deflation_two_terms() {
        let k = zero_augment(&KernelExpr::disk(), Complex64::new(0.5, 0.0)).unwrap();
        let f = to_formula(&k, FormulaFormat::Plain);
        assert!(f.contains("K0(z,w)/((z-0.5)*(conj(w)-0.5)) - K0(z,0.5)*K0(0.5,w)/"), "{f}");
        let l = to_formula(&k, FormulaFormat::Latex);
        assert!(l.contains("\\frac{K_{0}(z,w)}{(z-0.5)(\\overline{w}-0.5)}"), "{l}");
        assert!(l.contains("K_{0}(0.5,0.5)"), "{l}");
    }

    #[test]
    fn direct_sum_lists_every_term() {
        let plan = DecompositionPlan::new(
            vec![(Complex64::new(0.4, 0.0), 2), (Complex64::new(-0.3, 0.2), 1)],
            PlanMode::DirectSum,
        )
        .unwrap();
        let k = multi_zero_augment(&KernelExpr::disk(), &plan).unwrap();
        let f = to_formula(&k, FormulaFormat::Plain);
        let last = f.lines().last().unwrap();
        assert_eq!(last.matches(" - ").count(), 3, "{last}");
        assert!(last.contains("(z-(-0.3+0.2i))"), "{last}");
    }
}
