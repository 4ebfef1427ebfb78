use crate::error::{Error, Result};

/// A scalar-valued model of the random input with a nominal evaluation cost.
///
/// Evaluation must be pure: the same input always yields the same output.
pub trait Model: Send + Sync {
    fn id(&self) -> &str;

    /// Cost of one evaluation, in the same abstract units as the budget.
    fn cost(&self) -> f64;

    fn evaluate(&self, z: &[f64]) -> Result<f64>;
}

impl<M: Model + ?Sized> Model for Box<M> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn cost(&self) -> f64 {
        (**self).cost()
    }
    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        (**self).evaluate(z)
    }
}

impl<M: Model + ?Sized> Model for std::sync::Arc<M> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn cost(&self) -> f64 {
        (**self).cost()
    }
    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        (**self).evaluate(z)
    }
}

/// Closure-backed model.
pub struct FnModel<F> {
    id: String,
    cost: f64,
    f: F,
}

impl<F> FnModel<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(id: impl Into<String>, cost: f64, f: F) -> Self {
        FnModel { id: id.into(), cost, f }
    }
}

impl<F> Model for FnModel<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn id(&self) -> &str {
        &self.id
    }
    fn cost(&self) -> f64 {
        self.cost
    }
    fn evaluate(&self, z: &[f64]) -> Result<f64> {
        Ok((self.f)(z))
    }
}

/// Evaluate with the model id and sample index attached to any failure.
pub(crate) fn evaluate_at(model: &dyn Model, z: &[f64], sample: usize) -> Result<f64> {
    let y = model.evaluate(z).map_err(|e| match e {
        e @ Error::ModelEvaluation { .. } => e,
        other => Error::ModelEvaluation {
            model: model.id().to_string(),
            sample,
            message: other.to_string(),
        },
    })?;
    if !y.is_finite() {
        return Err(Error::NonFiniteOutput { model: model.id().to_string(), sample });
    }
    Ok(y)
}

pub(crate) fn check_costs(models: &[&dyn Model]) -> Result<()> {
    for m in models {
        if !(m.cost() > 0.0 && m.cost().is_finite()) {
            return Err(Error::InvalidInput(format!("model `{}` has non-positive cost {}", m.id(), m.cost())));
        }
    }
    Ok(())
}
