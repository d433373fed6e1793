use super::ModelError;

/// Zero radii are widened to this value so the initial frame stays invertible.
pub const RADIUS_FLOOR: f64 = 1e-9;

/// Initial set: the axis-aligned ellipsoid `Σ ((x_j - c_j) / r_j)^2 ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialSet {
    center: Vec<f64>,
    radii: Vec<f64>,
    floored: Vec<usize>,
}

impl InitialSet {
    /// `radii` may have length 1 (replicated) or `center.len()`.
    pub fn new(center: Vec<f64>, radii: &[f64]) -> Result<Self, ModelError> {
        Self::with_floor(center, radii, RADIUS_FLOOR)
    }

    pub fn with_floor(center: Vec<f64>, radii: &[f64], floor: f64) -> Result<Self, ModelError> {
        let n = center.len();
        if n == 0 {
            return Err(ModelError::InitialSet("empty center".into()));
        }
        if let Some(c) = center.iter().find(|c| !c.is_finite()) {
            return Err(ModelError::InitialSet(format!("non-finite center component {c}")));
        }
        let radii: Vec<f64> = match radii.len() {
            1 => vec![radii[0]; n],
            m if m == n => radii.to_vec(),
            m => {
                return Err(ModelError::InitialSet(format!(
                    "{m} radii given for a {n}-dimensional center"
                )))
            }
        };
        if !(floor > 0.0 && floor.is_finite()) {
            return Err(ModelError::InitialSet(format!("radius floor must be positive, got {floor}")));
        }
        let mut floored = Vec::new();
        let mut out = Vec::with_capacity(n);
        for (j, &r) in radii.iter().enumerate() {
            if !r.is_finite() || r < 0.0 {
                return Err(ModelError::InitialSet(format!("radius {r} in dimension {}", j + 1)));
            }
            if r < floor {
                floored.push(j);
                out.push(floor);
            } else {
                out.push(r);
            }
        }
        Ok(Self {
            center,
            radii: out,
            floored,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Dimensions whose radius was raised to the floor.
    pub fn floored(&self) -> &[usize] {
        &self.floored
    }
}

/// Contents of an initial-set file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InitFile {
    pub center: Option<Vec<f64>>,
    pub radius: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub order: Option<u32>,
}

impl InitFile {
    pub fn initial_set(&self) -> Result<InitialSet, ModelError> {
        let center = self
            .center
            .clone()
            .ok_or_else(|| ModelError::InitialSet("missing `center`".into()))?;
        let radius = self
            .radius
            .as_deref()
            .ok_or_else(|| ModelError::InitialSet("missing `radius`".into()))?;
        InitialSet::new(center, radius)
    }
}

fn parse_list(line: usize, v: &str) -> Result<Vec<f64>, ModelError> {
    v.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>().map_err(|_| ModelError::Init {
                line,
                msg: format!("invalid number `{s}`"),
            })
        })
        .collect()
}

/// Parses `key = value` lines: `center`, `radius`, `dt`, `T`, `order`.
pub fn parse_init(text: &str) -> Result<InitFile, ModelError> {
    let mut out = InitFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ModelError::Init {
            line,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let scalar = |v: &str| -> Result<f64, ModelError> {
            let list = parse_list(line, v)?;
            match list.as_slice() {
                [x] => Ok(*x),
                _ => Err(ModelError::Init {
                    line,
                    msg: format!("`{key}` takes a single value"),
                }),
            }
        };
        let dup = |present: bool| {
            if present {
                Err(ModelError::Init {
                    line,
                    msg: format!("duplicate key `{key}`"),
                })
            } else {
                Ok(())
            }
        };
        match key {
            "center" => {
                dup(out.center.is_some())?;
                out.center = Some(parse_list(line, value)?);
            }
            "radius" => {
                dup(out.radius.is_some())?;
                out.radius = Some(parse_list(line, value)?);
            }
            "dt" => {
                dup(out.dt.is_some())?;
                out.dt = Some(scalar(value)?);
            }
            "T" => {
                dup(out.horizon.is_some())?;
                out.horizon = Some(scalar(value)?);
            }
            "order" => {
                dup(out.order.is_some())?;
                let v = value.trim();
                out.order = Some(v.parse().map_err(|_| ModelError::Init {
                    line,
                    msg: format!("invalid order `{v}`"),
                })?);
            }
            _ => {
                return Err(ModelError::Init {
                    line,
                    msg: format!("unknown key `{key}`"),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_radius_replicates() {
        let s = InitialSet::new(vec![1.0, 1.0], &[0.01]).unwrap();
        assert_eq!(s.radii(), &[0.01, 0.01]);
        assert!(s.floored().is_empty());
    }

    #[test]
    fn zero_radius_is_floored() {
        let s = InitialSet::new(vec![0.0, 1.0], &[0.0, 0.5]).unwrap();
        assert_eq!(s.radii(), &[RADIUS_FLOOR, 0.5]);
        assert_eq!(s.floored(), &[0]);
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(InitialSet::new(vec![0.0], &[-1.0]).is_err());
        assert!(InitialSet::new(vec![0.0], &[f64::NAN]).is_err());
        assert!(InitialSet::new(vec![0.0, 0.0, 0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn init_file() {
        let f = parse_init("# vdp\ncenter = -1, -1\nradius = 0.01\ndt = 0.01\nT = 40\norder = 1\n").unwrap();
        assert_eq!(f.center, Some(vec![-1.0, -1.0]));
        assert_eq!(f.horizon, Some(40.0));
        assert_eq!(f.order, Some(1));
        assert_eq!(f.initial_set().unwrap().radii(), &[0.01, 0.01]);
    }

    #[test]
    fn init_file_errors_carry_line() {
        assert_eq!(
            parse_init("center = 1\nradius = abc").unwrap_err(),
            ModelError::Init {
                line: 2,
                msg: "invalid number `abc`".into()
            }
        );
        assert!(matches!(parse_init("speed = 3"), Err(ModelError::Init { line: 1, .. })));
    }
}
