use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::structure::FiniteStructure;
use std::fmt;

/// A term over a signature: a tree of operation applications over variables
/// `x0, x1, ...`. Operations are referenced by index into the signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    /// Check arities against `sig` and variable indices against `max_vars`.
    pub fn validate(&self, sig: &Signature, max_vars: usize) -> Result<()> {
        match self {
            Term::Var(i) => {
                if *i >= max_vars {
                    return Err(Error::InvalidReduct(format!(
                        "variable x{i} out of range (only {max_vars} variable(s) allowed)"
                    )));
                }
                Ok(())
            }
            Term::App(op, args) => {
                if *op >= sig.ops().len() {
                    return Err(Error::InvalidReduct(format!("operation index {op} out of range")));
                }
                let arity = sig.op_arity(*op);
                if args.len() != arity {
                    return Err(Error::ArityMismatch(format!(
                        "operation '{}' expects {} argument(s), got {}",
                        sig.ops()[*op].0,
                        arity,
                        args.len()
                    )));
                }
                for a in args {
                    a.validate(sig, max_vars)?;
                }
                Ok(())
            }
        }
    }

    /// Evaluate in `m` under the given variable assignment.
    pub fn eval(&self, m: &FiniteStructure, vars: &[usize]) -> usize {
        match self {
            Term::Var(i) => vars[*i],
            Term::App(op, args) => {
                let vals: Vec<usize> = args.iter().map(|a| a.eval(m, vars)).collect();
                m.op_value(*op, &vals)
            }
        }
    }

    /// Render as an s-expression using the names in `sig`.
    pub fn render(&self, sig: &Signature) -> String {
        struct Disp<'a>(&'a Term, &'a Signature);
        impl fmt::Display for Disp<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self.0 {
                    Term::Var(i) => write!(f, "x{i}"),
                    Term::App(op, args) => {
                        let name = &self.1.ops()[*op].0;
                        if args.is_empty() {
                            write!(f, "{name}")
                        } else {
                            write!(f, "({name}")?;
                            for a in args {
                                write!(f, " {}", Disp(a, self.1))?;
                            }
                            write!(f, ")")
                        }
                    }
                }
            }
        }
        Disp(self, sig).to_string()
    }

    /// Depth of the term tree; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn eval_and_render() {
        let d = catalog::get("D").unwrap();
        let join = d.sig().op_index("join").unwrap();
        let meet = d.sig().op_index("meet").unwrap();
        let t = Term::App(meet, vec![Term::Var(0), Term::App(join, vec![Term::Var(0), Term::Var(1)])]);
        assert_eq!(t.eval(&d, &[1, 0]), 1);
        assert_eq!(t.render(d.sig()), "(meet x0 (join x0 x1))");
        assert!(t.validate(d.sig(), 2).is_ok());
        assert!(t.validate(d.sig(), 1).is_err());
    }
}
