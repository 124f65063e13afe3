//! Scalar expressions in one variable `x`, for custom initial profiles.
//!
//! Plain function names (`sin`, `cos`, `exp`, `sqrt`, ...) and the constant
//! `pi` are available alongside the usual arithmetic and `^`.

use evalexpr::{
    ContextWithMutableFunctions, ContextWithMutableVariables, DefaultNumericTypes, Function,
    HashMapContext, Node, Value,
};

use crate::error::{Error, Result};

/// A parsed expression `f(x)`.
#[derive(Debug, Clone)]
pub struct Expression {
    source: String,
    tree: Node<DefaultNumericTypes>,
}

fn unary(f: fn(f64) -> f64) -> Function<DefaultNumericTypes> {
    Function::new(move |arg: &Value<DefaultNumericTypes>| Ok(Value::Float(f(arg.as_number()?))))
}

fn context(x: f64) -> HashMapContext<DefaultNumericTypes> {
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    let functions: [(&str, fn(f64) -> f64); 10] = [
        ("sin", f64::sin),
        ("cos", f64::cos),
        ("tan", f64::tan),
        ("exp", f64::exp),
        ("ln", f64::ln),
        ("sqrt", f64::sqrt),
        ("abs", f64::abs),
        ("sinh", f64::sinh),
        ("cosh", f64::cosh),
        ("tanh", f64::tanh),
    ];
    for (name, f) in functions {
        ctx.set_function(name.into(), unary(f)).expect("fresh context");
    }
    ctx.set_value("pi".into(), Value::Float(std::f64::consts::PI)).expect("fresh context");
    ctx.set_value("x".into(), Value::Float(x)).expect("fresh context");
    ctx
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let tree = evalexpr::build_operator_tree::<DefaultNumericTypes>(source)
            .map_err(|e| Error::Config(format!("cannot parse expression `{source}`: {e}")))?;
        let out = Self {
            source: source.to_string(),
            tree,
        };
        out.eval(0.5)?;
        Ok(out)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let ctx = context(x);
        self.tree
            .eval_number_with_context(&ctx)
            .map_err(|e| Error::Config(format!("cannot evaluate `{}` at x = {x}: {e}", self.source)))
    }

    /// Evaluate at many points with a single context.
    pub fn eval_many(&self, xs: impl IntoIterator<Item = f64>) -> Result<Vec<f64>> {
        let mut ctx = context(0.0);
        xs.into_iter()
            .map(|x| {
                ctx.set_value("x".into(), Value::Float(x)).expect("same type");
                self.tree.eval_number_with_context(&ctx).map_err(|e| {
                    Error::Config(format!("cannot evaluate `{}` at x = {x}: {e}", self.source))
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_functions() {
        let e = Expression::parse("x^2*(1-x)^2").unwrap();
        assert!((e.eval(0.5).unwrap() - 0.0625).abs() < 1e-15);
        let e = Expression::parse("sin(pi*(x-1))^2").unwrap();
        assert!((e.eval(1.5).unwrap() - 1.0).abs() < 1e-15);
        let e = Expression::parse("2*x + exp(0)").unwrap();
        assert_eq!(e.eval_many([1.0, 2.0]).unwrap(), vec![3.0, 5.0]);
    }

    #[test]
    fn bad_input_is_a_config_error() {
        assert!(matches!(Expression::parse("x +* 2"), Err(Error::Config(_))));
        assert!(matches!(Expression::parse("foo(x)"), Err(Error::Config(_))));
    }
}
