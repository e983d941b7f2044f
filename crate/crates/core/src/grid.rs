//! Lattice-backed fields over uniformly convex domains, with multilinear
//! interpolation inside and an exact zero exterior extension.

use crate::error::{Error, Result};
use crate::linalg;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

/// A uniformly convex domain: a ball or a finite intersection of congruent
/// balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    Ball { center: Vec<f64>, radius: f64 },
    BallIntersection { radius: f64, centers: Vec<Vec<f64>> },
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Ball { radius, center } => {
                if *radius <= 0.0 || center.is_empty() {
                    return Err(Error::InvalidParameter("ball domain needs radius > 0".into()));
                }
            }
            Domain::BallIntersection { radius, centers } => {
                if *radius <= 0.0 || centers.is_empty() {
                    return Err(Error::InvalidParameter(
                        "intersection domain needs radius > 0 and at least one center".into(),
                    ));
                }
                let dim = centers[0].len();
                if centers.iter().any(|c| c.len() != dim) {
                    return Err(Error::InvalidParameter("center dimensions differ".into()));
                }
                // nonempty interior: every pair of centers closer than 2R
                for (i, a) in centers.iter().enumerate() {
                    for b in centers.iter().skip(i + 1) {
                        if linalg::norm(&linalg::sub(a, b)) >= 2.0 * radius {
                            return Err(Error::InvalidParameter(
                                "ball intersection has empty interior".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { center, .. } => center.len(),
            Domain::BallIntersection { centers, .. } => centers[0].len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boundary_distance(x) > 0.0
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    /// For intersections this is min over the member balls, exact on the
    /// inside.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Ball { center, radius } => radius - linalg::norm(&linalg::sub(x, center)),
            Domain::BallIntersection { radius, centers } => centers
                .iter()
                .map(|c| radius - linalg::norm(&linalg::sub(x, c)))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Upper bound on the diameter (exact for balls).
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::BallIntersection { radius, .. } => 2.0 * radius,
        }
    }

    /// The member spheres (center, radius), used for ray breakpoints.
    pub fn spheres(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            Domain::Ball { center, radius } => vec![(center.clone(), *radius)],
            Domain::BallIntersection { radius, centers } => {
                centers.iter().map(|c| (c.clone(), *radius)).collect()
            }
        }
    }

    /// A ball containing the domain.
    pub fn bounding_ball(&self) -> (Vec<f64>, f64) {
        match self {
            Domain::Ball { center, radius } => (center.clone(), *radius),
            Domain::BallIntersection { radius, centers } => (centers[0].clone(), *radius),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (c, r) = self.bounding_ball();
        let lo = c.iter().map(|v| v - r).collect();
        let hi = c.iter().map(|v| v + r).collect();
        (lo, hi)
    }

    /// Exit radius of the forward ray x + t dir (t >= 0) from the convex
    /// domain, assuming x inside; 0 if x is outside.
    pub fn exit_radius(&self, x: &[f64], dir: &[f64]) -> f64 {
        let mut t_exit = f64::INFINITY;
        for (c, r) in self.spheres() {
            let d = linalg::sub(x, &c);
            let b = linalg::dot(&d, dir);
            let q = linalg::dot(&d, &d) - r * r;
            let disc = b * b - q;
            if disc <= 0.0 {
                return 0.0;
            }
            t_exit = t_exit.min(-b + disc.sqrt());
        }
        t_exit.max(0.0)
    }
}

/// Scalar values on a regular lattice covering the closure of a domain,
/// extended by zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    domain: Domain,
    h: f64,
    origin: Vec<f64>,
    dims: Vec<usize>,
    values: Vec<f64>,
    interior: Vec<bool>,
}

impl GridField {
    pub fn zeros(domain: &Domain, h: f64) -> Result<Self> {
        if h <= 0.0 {
            return Err(Error::InvalidParameter("grid spacing must be positive".into()));
        }
        domain.validate()?;
        let (lo, hi) = domain.bounding_box();
        let n = lo.len();
        let origin: Vec<f64> = lo.iter().map(|v| v - h).collect();
        let dims: Vec<usize> = (0..n)
            .map(|a| (((hi[a] - origin[a]) / h).ceil() as usize) + 2)
            .collect();
        let total: usize = dims.iter().product();
        let mut interior = vec![false; total];
        let mut point = vec![0.0; n];
        for (flat, flag) in interior.iter_mut().enumerate() {
            unflatten_point(flat, &dims, &origin, h, &mut point);
            *flag = domain.contains(&point);
        }
        Ok(Self { domain: domain.clone(), h, origin, dims, values: vec![0.0; total], interior })
    }

    /// Samples an analytic field on the lattice (zero outside the domain).
    pub fn sample(field: &crate::fields::Field, domain: &Domain, h: f64) -> Result<Self> {
        let mut g = Self::zeros(domain, h)?;
        let mut point = vec![0.0; g.origin.len()];
        for flat in 0..g.values.len() {
            if g.interior[flat] {
                unflatten_point(flat, &g.dims, &g.origin, g.h, &mut point);
                g.values[flat] = field.eval(&point);
            }
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value_bound(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn node_point(&self, flat: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        unflatten_point(flat, &self.dims, &self.origin, self.h, &mut p);
        p
    }

    pub fn is_interior(&self, flat: usize) -> bool {
        self.interior[flat]
    }

    /// Flat indices and coordinates of the lattice nodes inside the domain.
    pub fn interior_nodes(&self) -> Vec<(usize, Vec<f64>)> {
        (0..self.values.len())
            .filter(|&i| self.interior[i])
            .map(|i| (i, self.node_point(i)))
            .collect()
    }

    /// Flat index of the node at integer offsets `idx`, if in range.
    fn flat_index(&self, idx: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for (a, &i) in idx.iter().enumerate() {
            if i < 0 || i as usize >= self.dims[a] {
                return None;
            }
            flat = flat * self.dims[a] + i as usize;
        }
        Some(flat)
    }

    /// Value of the nearest node to x (no interpolation); panics off-lattice.
    pub fn node_value_at(&self, x: &[f64]) -> f64 {
        let idx: Vec<i64> = (0..self.dim())
            .map(|a| ((x[a] - self.origin[a]) / self.h).round() as i64)
            .collect();
        self.values[self.flat_index(&idx).expect("point off lattice")]
    }

    /// Multilinear interpolation inside the domain, exact zero outside.
    pub fn eval(&self, x: &[f64]) -> f64 {
        if !self.domain.contains(x) {
            return 0.0;
        }
        let n = self.dim();
        let mut base = vec![0i64; n];
        let mut frac = vec![0.0f64; n];
        for a in 0..n {
            let t = (x[a] - self.origin[a]) / self.h;
            let mut b = t.floor();
            let mut f = t - b;
            // snap to the lattice so node queries return stored values exactly
            if f < 1e-12 {
                f = 0.0;
            } else if f > 1.0 - 1e-12 {
                b += 1.0;
                f = 0.0;
            }
            base[a] = b as i64;
            frac[a] = f;
        }
        let mut acc = 0.0;
        let corners = 1usize << n;
        let mut idx = vec![0i64; n];
        for corner in 0..corners {
            let mut w = 1.0;
            for a in 0..n {
                if corner >> a & 1 == 1 {
                    w *= frac[a];
                    idx[a] = base[a] + 1;
                } else {
                    w *= 1.0 - frac[a];
                    idx[a] = base[a];
                }
            }
            if w == 0.0 {
                continue;
            }
            if let Some(flat) = self.flat_index(&idx) {
                acc += w * self.values[flat];
            }
        }
        acc
    }

    /// Diagonal second differences (u(x+h e_a) - 2 u(x) + u(x-h e_a)) / h^2
    /// at a lattice node, using the zero exterior extension.
    pub fn stencil_second_differences(&self, flat: usize) -> Vec<f64> {
        let n = self.dim();
        let mut idx = vec![0i64; n];
        let mut rem = flat;
        for a in (0..n).rev() {
            idx[a] = (rem % self.dims[a]) as i64;
            rem /= self.dims[a];
        }
        let u0 = self.values[flat];
        let mut out = Vec::with_capacity(n);
        for a in 0..n {
            let mut up = idx.clone();
            up[a] += 1;
            let mut dn = idx.clone();
            dn[a] -= 1;
            let vp = self.flat_index(&up).map_or(0.0, |f| self.values[f]);
            let vm = self.flat_index(&dn).map_or(0.0, |f| self.values[f]);
            out.push((vp - 2.0 * u0 + vm) / (self.h * self.h));
        }
        out
    }

    // --- serialization --------------------------------------------------

    /// Writes the lattice dump (CSV) and the metadata sidecar (JSON).
    /// Values round-trip bit-exactly through [`GridField::read_files`].
    pub fn write_files(&self, csv_path: &Path, meta_path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(csv_path)?);
        writeln!(w, "ktrunc-grid,1")?;
        writeln!(w, "N,{}", self.dim())?;
        writeln!(w, "h,{}", self.h)?;
        writeln!(w, "origin,{}", join_floats(&self.origin))?;
        writeln!(
            w,
            "dims,{}",
            self.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
        )?;
        writeln!(w, "domain,{}", domain_token(&self.domain))?;
        let header: Vec<String> =
            (0..self.dim()).map(|a| format!("i{a}")).chain(["value".to_string()]).collect();
        writeln!(w, "{}", header.join(","))?;
        let mut idx = vec![0usize; self.dim()];
        for (flat, v) in self.values.iter().enumerate() {
            unflatten(flat, &self.dims, &mut idx);
            let cells: Vec<String> =
                idx.iter().map(|i| i.to_string()).chain([format!("{v}")]).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;

        let meta = GridMeta {
            schema_version: crate::report::SCHEMA_VERSION.to_string(),
            kind: "grid".to_string(),
            n: self.dim(),
            h: self.h,
            origin: self.origin.clone(),
            dims: self.dims.clone(),
            domain: self.domain.clone(),
            exterior_rule: "zero".to_string(),
        };
        let mut mw = BufWriter::new(std::fs::File::create(meta_path)?);
        serde_json::to_writer_pretty(&mut mw, &meta)?;
        mw.flush()?;
        Ok(())
    }

    pub fn read_files(csv_path: &Path, meta_path: &Path) -> Result<Self> {
        let meta: GridMeta = serde_json::from_reader(std::fs::File::open(meta_path)?)?;
        let reader = std::io::BufReader::new(std::fs::File::open(csv_path)?);
        let mut lines = reader.lines();
        let magic = lines.next().ok_or_else(|| bad("missing header"))??;
        if magic != "ktrunc-grid,1" {
            return Err(bad("unrecognized grid dump header"));
        }
        let n = parse_kv(&mut lines, "N")?.parse::<usize>().map_err(|_| bad("bad N"))?;
        let h = parse_kv(&mut lines, "h")?.parse::<f64>().map_err(|_| bad("bad h"))?;
        let origin = parse_kv(&mut lines, "origin")?
            .split(',')
            .map(|t| t.parse::<f64>().map_err(|_| bad("bad origin")))
            .collect::<Result<Vec<f64>>>()?;
        let dims = parse_kv(&mut lines, "dims")?
            .split(',')
            .map(|t| t.parse::<usize>().map_err(|_| bad("bad dims")))
            .collect::<Result<Vec<usize>>>()?;
        let _domain_token = parse_kv(&mut lines, "domain")?;
        let _column_header = lines.next().ok_or_else(|| bad("missing column header"))??;
        if n != meta.n || origin.len() != n || dims.len() != n {
            return Err(bad("dimension mismatch between dump and sidecar"));
        }
        let total: usize = dims.iter().product();
        let mut values = vec![0.0f64; total];
        let mut seen = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut flat = 0usize;
            for a in 0..n {
                let i: usize = parts
                    .next()
                    .ok_or_else(|| bad("short row"))?
                    .parse()
                    .map_err(|_| bad("bad index"))?;
                if i >= dims[a] {
                    return Err(bad("index out of range"));
                }
                flat = flat * dims[a] + i;
            }
            let v: f64 = parts
                .next()
                .ok_or_else(|| bad("missing value"))?
                .parse()
                .map_err(|_| bad("bad value"))?;
            values[flat] = v;
            seen += 1;
        }
        if seen != total {
            return Err(bad("row count mismatch"));
        }
        meta.domain.validate()?;
        let mut interior = vec![false; total];
        let mut point = vec![0.0; n];
        for (flat, flag) in interior.iter_mut().enumerate() {
            unflatten_point(flat, &dims, &origin, h, &mut point);
            *flag = meta.domain.contains(&point);
        }
        Ok(Self { domain: meta.domain, h, origin, dims, values, interior })
    }
}

#[derive(Serialize, Deserialize)]
struct GridMeta {
    schema_version: String,
    kind: String,
    n: usize,
    h: f64,
    origin: Vec<f64>,
    dims: Vec<usize>,
    domain: Domain,
    exterior_rule: String,
}

fn bad(msg: &str) -> Error {
    Error::Config(format!("grid dump: {msg}"))
}

fn parse_kv(
    lines: &mut std::io::Lines<impl BufRead>,
    key: &str,
) -> Result<String> {
    let line = lines.next().ok_or_else(|| bad("truncated header"))??;
    let (k, rest) = line.split_once(',').ok_or_else(|| bad("malformed header line"))?;
    if k != key {
        return Err(bad(&format!("expected header key {key}, got {k}")));
    }
    Ok(rest.to_string())
}

fn join_floats(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

fn domain_token(d: &Domain) -> String {
    match d {
        Domain::Ball { center, radius } => {
            format!(
                "ball;{};{}",
                center.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join("|"),
                radius
            )
        }
        Domain::BallIntersection { radius, centers } => {
            let cs: Vec<String> = centers
                .iter()
                .map(|c| c.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join("|"))
                .collect();
            format!("intersection;{};{}", radius, cs.join(";"))
        }
    }
}

fn unflatten(flat: usize, dims: &[usize], idx: &mut [usize]) {
    let mut rem = flat;
    for a in (0..dims.len()).rev() {
        idx[a] = rem % dims[a];
        rem /= dims[a];
    }
}

fn unflatten_point(flat: usize, dims: &[usize], origin: &[f64], h: f64, point: &mut [f64]) {
    let mut rem = flat;
    for a in (0..dims.len()).rev() {
        point[a] = origin[a] + (rem % dims[a]) as f64 * h;
        rem /= dims[a];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::barrier_field;
    use approx::assert_relative_eq;

    fn unit_ball2() -> Domain {
        Domain::Ball { center: vec![0.0, 0.0], radius: 1.0 }
    }

    #[test]
    fn node_values_are_exact() {
        let u = barrier_field(1.0, 0.5, &[0.0, 0.0]).unwrap();
        let g = GridField::sample(&u, &unit_ball2(), 0.125).unwrap();
        for (flat, p) in g.interior_nodes() {
            assert_eq!(g.eval(&p), g.values()[flat]);
        }
    }

    #[test]
    fn exterior_is_exact_zero() {
        let u = barrier_field(1.0, 0.5, &[0.0, 0.0]).unwrap();
        let g = GridField::sample(&u, &unit_ball2(), 0.25).unwrap();
        assert_eq!(g.eval(&[1.5, 0.0]), 0.0);
        assert_eq!(g.eval(&[0.8, 0.8]), 0.0);
    }

    #[test]
    fn interpolation_error_scales_with_h() {
        let u = barrier_field(1.0, 0.5, &[0.0, 0.0]).unwrap();
        let mut errs = Vec::new();
        for &h in &[0.125f64, 0.0625] {
            let g = GridField::sample(&u, &unit_ball2(), h).unwrap();
            // midpoints of interior cells
            let mut worst: f64 = 0.0;
            let mut interior_worst: f64 = 0.0;
            for (_, p) in g.interior_nodes() {
                let m = [p[0] + 0.5 * h, p[1] + 0.5 * h];
                if !g.domain().contains(&m) {
                    continue;
                }
                let e = (g.eval(&m) - u.eval(&m)).abs();
                worst = worst.max(e);
                if g.domain().boundary_distance(&m) > 0.2 {
                    interior_worst = interior_worst.max(e);
                }
            }
            // O(h) at the boundary cusp, O(h^2) in the interior
            assert!(worst <= 1.2 * h.sqrt() * h.sqrt(), "worst {worst} at h={h}");
            assert!(interior_worst <= 4.0 * h * h, "interior {interior_worst} at h={h}");
            errs.push(worst);
        }
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn exit_radius_matches_geometry() {
        let d = unit_ball2();
        assert_relative_eq!(d.exit_radius(&[0.0, 0.0], &[1.0, 0.0]), 1.0, epsilon = 1e-14);
        assert_relative_eq!(d.exit_radius(&[0.5, 0.0], &[1.0, 0.0]), 0.5, epsilon = 1e-14);
        let lens = Domain::BallIntersection {
            radius: 1.0,
            centers: vec![vec![0.3, 0.0], vec![-0.3, 0.0]],
        };
        lens.validate().unwrap();
        assert_relative_eq!(lens.exit_radius(&[0.0, 0.0], &[1.0, 0.0]), 0.7, epsilon = 1e-14);
        assert!(lens.boundary_distance(&[0.0, 0.0]) > 0.0);
        assert!(!lens.contains(&[0.9, 0.0]));
    }

    #[test]
    fn csv_roundtrip_is_bit_exact() {
        let u = barrier_field(1.0, 0.3, &[0.1, -0.2]).unwrap();
        let g = GridField::sample(&u, &unit_ball2(), 0.2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("field.csv");
        let meta = dir.path().join("field.json");
        g.write_files(&csv, &meta).unwrap();
        let back = GridField::read_files(&csv, &meta).unwrap();
        assert_eq!(g, back);
        for (a, b) in g.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
