//! Evaluation of guard, argument and action expressions.

use crate::ast::{CompareOp, Expr};
use crate::value::{Env, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("iterate over a non-list value {0}")]
    NotAList(Value),
    #[error("guard evaluated to non-boolean value {0}")]
    NonBooleanGuard(Value),
    #[error("cons onto a non-list value {0}")]
    ConsOntoNonList(Value),
    #[error("add on a non-term value {0}")]
    AddToNonTerm(Value),
}

pub fn eval_expr(e: &Expr, env: &Env) -> Result<Value, EvalError> {
    Ok(match e {
        Expr::Var(n) => env.get(n).cloned().ok_or_else(|| EvalError::UnboundVariable(n.clone()))?,
        Expr::Str(s) => Value::str(s),
        Expr::Int(i) => Value::Int(*i),
        Expr::Bool(b) => Value::Bool(*b),
        Expr::Null => Value::Null,
        Expr::Construct(c, args) => Value::term(c, eval_all(args, env)?),
        Expr::List(items) => Value::list(eval_all(items, env)?),
        Expr::Cons(head, tail) => {
            let head = eval_expr(head, env)?;
            let tail = eval_expr(tail, env)?;
            match &tail {
                Value::List(items) => {
                    let mut out = Vec::with_capacity(items.len() + 1);
                    out.push(head);
                    out.extend(items.iter().cloned());
                    Value::list(out)
                }
                Value::Term(..) if tail.as_sequence().is_some() => Value::cons(head, tail),
                _ => return Err(EvalError::ConsOntoNonList(tail)),
            }
        }
        Expr::Fold { elem, acc, init, step, over } => {
            let over = eval_expr(over, env)?;
            let items = over.as_sequence().ok_or(EvalError::NotAList(over))?;
            let mut scope = env.clone();
            let mut result = eval_expr(init, env)?;
            for item in items {
                scope.insert(elem.clone(), item);
                scope.insert(acc.clone(), result);
                result = eval_expr(step, &scope)?;
            }
            result
        }
        Expr::AddChild(term, child) => {
            let term = eval_expr(term, env)?;
            match &term {
                Value::Term(c, args) => {
                    let mut args = args.to_vec();
                    args.push(eval_expr(child, env)?);
                    Value::Term(c.clone(), args.into())
                }
                _ => return Err(EvalError::AddToNonTerm(term)),
            }
        }
        Expr::Compare(op, l, r) => {
            let eq = eval_expr(l, env)? == eval_expr(r, env)?;
            Value::Bool(match op {
                CompareOp::Eq => eq,
                CompareOp::Ne => !eq,
            })
        }
    })
}

fn eval_all(es: &[Expr], env: &Env) -> Result<Vec<Value>, EvalError> {
    es.iter().map(|e| eval_expr(e, env)).collect()
}

/// Value of an action list: `null` for none, the value itself for one, a
/// tuple otherwise.
pub fn eval_actions(es: &[Expr], env: &Env) -> Result<Value, EvalError> {
    let mut vals = eval_all(es, env)?;
    Ok(match vals.len() {
        0 => Value::Null,
        1 => vals.pop().unwrap(),
        _ => Value::tuple(vals),
    })
}

pub fn eval_guard(e: &Expr, env: &Env) -> Result<bool, EvalError> {
    match eval_expr(e, env)? {
        Value::Bool(b) => Ok(b),
        other => Err(EvalError::NonBooleanGuard(other)),
    }
}
