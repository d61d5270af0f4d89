//! Shifts, finite direct sums, and mapping cones.

use std::sync::Arc;

use super::maps::ChainMap;
use super::module::{cell_span, Action, Cell, CellStructure, DgModule};
use super::same_alg;
use crate::error::{Error, Result};
use crate::kernel::{Domain, GradedModule, Matrix, Scalar};

/// Diagonal sign `(-1)^{|a_j| l}` on a cellular module, so that after
/// shifting, each cell block is again the orbit basis `a · Σg`.
pub(crate) fn orbit_signs(m: &DgModule, l: i32) -> Vec<bool> {
    let mut neg = vec![false; m.dim()];
    if l % 2 == 0 {
        return neg;
    }
    if let (Some(cs), Some(act)) = (&m.cells, &m.left) {
        for c in &cs.cells {
            for (k, &a) in cell_span(&act.alg, c.idempotent).iter().enumerate() {
                neg[c.offset + k] = act.alg.degree(a) % 2 != 0;
            }
        }
    }
    neg
}

fn conjugate(dom: &Domain, m: &Matrix, neg: &[bool]) -> Matrix {
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for (r, c, v) in m.entries() {
        let v = if neg[r] != neg[c] { dom.neg(v) } else { v.clone() };
        out.set(r, c, v);
    }
    out
}

/// `Σ^l M`: component `n` is component `n + l` of `M`; the differential is
/// multiplied by `(-1)^l` and the left action by `(-1)^{|a| l}`.
pub fn shift(m: &DgModule, l: i32) -> DgModule {
    if l == 0 {
        return m.clone();
    }
    let dom = m.domain().clone();
    let neg = orbit_signs(m, l);
    let sgn = |k: i64| dom.signed(&Scalar::one(), k);
    let d = conjugate(&dom, &m.d.scaled(&dom, &sgn(l as i64)), &neg);
    let left = m.left.as_ref().map(|act| Action {
        alg: act.alg.clone(),
        mats: act
            .mats
            .iter()
            .enumerate()
            .map(|(a, x)| conjugate(&dom, &x.scaled(&dom, &sgn((act.alg.degree(a) * l) as i64)), &neg))
            .collect(),
    });
    let right = m
        .right
        .as_ref()
        .map(|act| Action { alg: act.alg.clone(), mats: act.mats.iter().map(|x| conjugate(&dom, x, &neg)).collect() });
    let cells = m.cells.as_ref().map(|cs| CellStructure {
        cells: cs.cells.iter().map(|c| Cell { degree: c.degree - l, ..c.clone() }).collect(),
    });
    let prefix = if l == 1 { "Σ".to_string() } else { format!("Σ^{l}") };
    DgModule {
        name: format!("{prefix}{}", m.name),
        module: GradedModule::new(
            dom.clone(),
            m.module.degrees.iter().map(|d| d - l).collect(),
            m.module.labels.iter().map(|s| format!("{prefix}{s}")).collect(),
        ),
        d,
        left,
        right,
        cells,
    }
}

#[derive(Clone, Debug)]
pub struct DirectSum {
    pub sum: Arc<DgModule>,
    pub inclusions: Vec<ChainMap>,
    pub projections: Vec<ChainMap>,
}

fn common_domain(mods: &[&DgModule]) -> Result<Option<Domain>> {
    let mut dom: Option<Domain> = None;
    for m in mods.iter().filter(|m| !m.is_zero()) {
        match &dom {
            None => dom = Some(m.domain().clone()),
            Some(d) if d == m.domain() => {}
            Some(d) => return Err(Error::Structure(format!("cannot combine modules over {d} and {}", m.domain()))),
        }
    }
    Ok(dom)
}

fn block_diag(parts: &[&Matrix], offsets: &[usize], n: usize) -> Matrix {
    let mut out = Matrix::zeros(n, n);
    for (m, &o) in parts.iter().zip(offsets) {
        for (r, c, v) in m.entries() {
            out.set(r + o, c + o, v.clone());
        }
    }
    out
}

fn sum_action(parts: &[Option<&Action>], offsets: &[usize], n: usize, what: &str) -> Result<Option<Action>> {
    let present: Vec<&Action> = parts.iter().flatten().copied().collect();
    if present.is_empty() {
        return Ok(None);
    }
    if present.len() != parts.len() {
        return Err(Error::Structure(format!("{what} action present on only some summands")));
    }
    let alg = present[0].alg.clone();
    if present.iter().any(|a| !same_alg(&a.alg, &alg)) {
        return Err(Error::Structure(format!("{what} algebras of summands differ")));
    }
    let mats = (0..alg.dim())
        .map(|a| {
            let ms: Vec<&Matrix> = present.iter().map(|p| &p.mats[a]).collect();
            block_diag(&ms, offsets, n)
        })
        .collect();
    Ok(Some(Action { alg, mats }))
}

/// Blockwise direct sum with its canonical inclusions and projections.
pub fn direct_sum(family: &[Arc<DgModule>], fallback: Domain) -> Result<DirectSum> {
    let refs: Vec<&DgModule> = family.iter().map(|m| m.as_ref()).collect();
    let dom = common_domain(&refs)?.unwrap_or(fallback);
    let mut offsets = Vec::new();
    let mut degrees = Vec::new();
    let mut labels = Vec::new();
    for m in &refs {
        offsets.push(degrees.len());
        degrees.extend(m.module.degrees.iter().copied());
        labels.extend(m.module.labels.iter().cloned());
    }
    let n = degrees.len();
    let ds: Vec<&Matrix> = refs.iter().map(|m| &m.d).collect();
    let d = block_diag(&ds, &offsets, n);
    let left = sum_action(&refs.iter().map(|m| m.left.as_ref()).collect::<Vec<_>>(), &offsets, n, "left")?;
    let right = sum_action(&refs.iter().map(|m| m.right.as_ref()).collect::<Vec<_>>(), &offsets, n, "right")?;
    let cells = if refs.iter().all(|m| m.cells.is_some()) {
        let mut cells = Vec::new();
        for (m, &o) in refs.iter().zip(&offsets) {
            for c in &m.cells.as_ref().expect("checked").cells {
                cells.push(Cell { offset: c.offset + o, ..c.clone() });
            }
        }
        Some(CellStructure { cells })
    } else {
        None
    };
    let name = if refs.is_empty() {
        "0".to_string()
    } else {
        refs.iter().map(|m| m.name.clone()).collect::<Vec<_>>().join(" ⊕ ")
    };
    let sum = Arc::new(DgModule { name, module: GradedModule::new(dom, degrees, labels), d, left, right, cells });
    sum.validate_shapes()?;
    let mut inclusions = Vec::new();
    let mut projections = Vec::new();
    for (m, &o) in family.iter().zip(&offsets) {
        let k = m.dim();
        let rows: Vec<usize> = (o..o + k).collect();
        let cols: Vec<usize> = (0..k).collect();
        let inc = Matrix::identity(k).embed(n, k, &rows, &cols);
        let pro = Matrix::identity(k).embed(k, n, &cols, &rows);
        inclusions.push(ChainMap { source: m.clone(), target: sum.clone(), matrix: inc });
        projections.push(ChainMap { source: sum.clone(), target: m.clone(), matrix: pro });
    }
    Ok(DirectSum { sum, inclusions, projections })
}

/// `X --u--> Y --v--> cone(u) --w--> ΣX`.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub x: Arc<DgModule>,
    pub y: Arc<DgModule>,
    pub z: Arc<DgModule>,
    pub sx: Arc<DgModule>,
    pub u: ChainMap,
    pub v: ChainMap,
    pub w: ChainMap,
}

/// Mapping cone `Y ⊕ ΣX` with differential `[[d_Y, u], [0, -d_X]]` (the
/// basis lists `Y` first), i.e. `D(σx, y) = (-σ dx, u(x) + dy)`.
pub fn cone(u: &ChainMap) -> Result<Triangle> {
    let x = u.source.clone();
    let y = u.target.clone();
    let dom = common_domain(&[x.as_ref(), y.as_ref()])?.unwrap_or_else(|| y.domain().clone());
    let sx = Arc::new(shift(&x, 1));
    let neg = orbit_signs(&x, 1);
    let (ny, nx) = (y.dim(), x.dim());
    let n = ny + nx;
    let mut d = Matrix::zeros(n, n);
    for (r, c, v) in y.d.entries() {
        d.set(r, c, v.clone());
    }
    for (r, c, v) in sx.d.entries() {
        d.set(ny + r, ny + c, v.clone());
    }
    for (r, c, v) in u.matrix.entries() {
        d.set(r, ny + c, if neg[c] { dom.neg(v) } else { v.clone() });
    }
    let offsets = [0, ny];
    let left = sum_action(&[y.left.as_ref(), sx.left.as_ref()], &offsets, n, "left")?;
    let right = sum_action(&[y.right.as_ref(), sx.right.as_ref()], &offsets, n, "right")?;
    let cells = match (&y.cells, &sx.cells) {
        (Some(cy), Some(cx)) => {
            let mut cells = cy.cells.clone();
            cells.extend(cx.cells.iter().map(|c| Cell { offset: c.offset + ny, ..c.clone() }));
            Some(CellStructure { cells })
        }
        _ => None,
    };
    let mut degrees = y.module.degrees.clone();
    degrees.extend(sx.module.degrees.iter().copied());
    let mut labels = y.module.labels.clone();
    labels.extend(sx.module.labels.iter().cloned());
    let z = Arc::new(DgModule {
        name: format!("cone({} → {})", x.name, y.name),
        module: GradedModule::new(dom, degrees, labels),
        d,
        left,
        right,
        cells,
    });
    z.validate_shapes()?;
    let idy: Vec<usize> = (0..ny).collect();
    let idx: Vec<usize> = (0..nx).collect();
    let sx_rows: Vec<usize> = (ny..n).collect();
    let v = ChainMap { source: y.clone(), target: z.clone(), matrix: Matrix::identity(ny).embed(n, ny, &idy, &idy) };
    let w =
        ChainMap { source: z.clone(), target: sx.clone(), matrix: Matrix::identity(nx).embed(nx, n, &idx, &sx_rows) };
    Ok(Triangle { x, y, z, sx, u: u.clone(), v, w })
}

/// Quasi-isomorphism test: the cone is acyclic.
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    super::cohomology::is_acyclic(&cone(f)?.z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::algebra::DgAlgebra;
    use crate::dg::cohomology::cohomology;

    fn ground_complex(degrees: Vec<i32>, d: Matrix) -> Arc<DgModule> {
        let z = Arc::new(DgAlgebra::ground(Domain::Integer));
        let labels = (0..degrees.len()).map(|i| format!("e{i}")).collect();
        let module = GradedModule::new(Domain::Integer, degrees, labels);
        Arc::new(DgModule::over_ground("M", z, module, d).unwrap())
    }

    #[test]
    fn cone_of_multiplication_by_two() {
        let zz = ground_complex(vec![0], Matrix::zeros(1, 1));
        let f = ChainMap::new(zz.clone(), zz.clone(), Matrix::from_i64(&[&[2]])).unwrap();
        let t = cone(&f).unwrap();
        assert!(t.z.check().ok());
        assert!(t.v.check().ok() && t.w.check().ok());
        let h = cohomology(&t.z).unwrap();
        assert_eq!(h.degrees(), vec![0]);
        assert_eq!(h.summary()[&0].to_string(), "Z/2");
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let m = ground_complex(vec![-1, 0], Matrix::from_i64(&[&[0, 0], &[3, 0]]));
        assert!(is_quasi_iso(&ChainMap::identity(m)).unwrap());
    }

    #[test]
    fn shift_round_trip() {
        let m = ground_complex(vec![-1, 0], Matrix::from_i64(&[&[0, 0], &[3, 0]]));
        let s = shift(&shift(&m, 1), -1);
        assert_eq!(s.d, m.d);
        assert_eq!(s.module.degrees, m.module.degrees);
    }
}
