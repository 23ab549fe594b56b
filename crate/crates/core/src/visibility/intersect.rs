use nalgebra::{Point3, Vector3};

/// Hits closer than this along the ray are ignored.
pub const T_MIN: f64 = 1e-9;

/// A ray with the axis permutation and shear precomputed for watertight
/// triangle tests.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Point3<f64>,
    pub dir: Vector3<f64>,
    pub inv_dir: Vector3<f64>,
    kx: usize,
    ky: usize,
    kz: usize,
    shear: [f64; 3],
}

impl Ray {
    pub fn new(origin: Point3<f64>, dir: Vector3<f64>) -> Self {
        let abs = dir.abs();
        let kz = if abs.x > abs.y {
            if abs.x > abs.z {
                0
            } else {
                2
            }
        } else if abs.y > abs.z {
            1
        } else {
            2
        };
        let kx = (kz + 1) % 3;
        let ky = (kx + 1) % 3;
        let shear = [-dir[kx] / dir[kz], -dir[ky] / dir[kz], 1.0 / dir[kz]];
        Self {
            origin,
            dir,
            inv_dir: dir.map(|d| 1.0 / d),
            kx,
            ky,
            kz,
            shear,
        }
    }

    /// Watertight ray/triangle intersection: rays through a shared edge or
    /// vertex hit at least one of the adjacent triangles. Both windings hit.
    pub fn intersect_triangle(&self, tri: &[Point3<f64>; 3]) -> Option<f64> {
        let [sx, sy, sz] = self.shear;
        let local = |p: &Point3<f64>| {
            let d = p - self.origin;
            let z = d[self.kz];
            (d[self.kx] + sx * z, d[self.ky] + sy * z, z * sz)
        };
        let (x0, y0, z0) = local(&tri[0]);
        let (x1, y1, z1) = local(&tri[1]);
        let (x2, y2, z2) = local(&tri[2]);

        let e0 = x1 * y2 - y1 * x2;
        let e1 = x2 * y0 - y2 * x0;
        let e2 = x0 * y1 - y0 * x1;
        if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) && (e0 > 0.0 || e1 > 0.0 || e2 > 0.0) {
            return None;
        }
        let det = e0 + e1 + e2;
        if det == 0.0 {
            return None;
        }
        let t = (e0 * z0 + e1 * z1 + e2 * z2) / det;
        (t > T_MIN && t.is_finite()).then_some(t)
    }

    /// Slab test; returns the entry distance when the box is hit before
    /// `t_max`.
    pub fn intersect_aabb(&self, lo: &Point3<f64>, hi: &Point3<f64>, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0_f64;
        let mut t1 = t_max;
        for a in 0..3 {
            let inv = self.inv_dir[a];
            let mut near = (lo[a] - self.origin[a]) * inv;
            let mut far = (hi[a] - self.origin[a]) * inv;
            if near > far {
                std::mem::swap(&mut near, &mut far);
            }
            // NaN (origin on a slab plane with a zero direction component)
            // leaves the interval unchanged.
            t0 = if near > t0 { near } else { t0 };
            t1 = if far < t1 { far } else { t1 };
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tri() -> [Point3<f64>; 3] {
        [
            Point3::new(-1.0, -1.0, 0.0),
            Point3::new(1.0, -1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ]
    }

    #[test]
    fn axis_aligned_hit() {
        let ray = Ray::new(Point3::new(0.0, 0.0, 3.0), -Vector3::z());
        assert_eq!(ray.intersect_triangle(&unit_tri()), Some(3.0));
        // reversed winding is also hit
        let mut tri = unit_tri();
        tri.swap(1, 2);
        assert_eq!(ray.intersect_triangle(&tri), Some(3.0));
    }

    #[test]
    fn parallel_and_behind_miss() {
        let ray = Ray::new(Point3::new(-5.0, 0.0, 0.0), Vector3::x());
        assert_eq!(ray.intersect_triangle(&unit_tri()), None);
        let ray = Ray::new(Point3::new(0.0, 0.0, 3.0), Vector3::z());
        assert_eq!(ray.intersect_triangle(&unit_tri()), None);
    }

    #[test]
    fn shared_edge_is_watertight() {
        let a = Point3::new(0.0, -1.0, 0.0);
        let b = Point3::new(0.0, 1.0, 0.0);
        let left = [a, b, Point3::new(-1.0, 0.0, 0.0)];
        let right = [b, a, Point3::new(1.0, 0.0, 0.0)];
        for k in 0..50 {
            let y = -0.9 + 1.8 * k as f64 / 49.0;
            let ray = Ray::new(Point3::new(0.0, y, 2.0), -Vector3::z());
            assert!(ray.intersect_triangle(&left).is_some() || ray.intersect_triangle(&right).is_some());
        }
    }

    #[test]
    fn aabb_slab() {
        let ray = Ray::new(Point3::new(0.0, 0.0, 3.0), -Vector3::z());
        let lo = Point3::new(-1.0, -1.0, -1.0);
        let hi = Point3::new(1.0, 1.0, 1.0);
        assert_eq!(ray.intersect_aabb(&lo, &hi, f64::INFINITY), Some(2.0));
        assert_eq!(ray.intersect_aabb(&lo, &hi, 1.5), None);
        let miss = Ray::new(Point3::new(2.0, 0.0, 3.0), -Vector3::z());
        assert_eq!(miss.intersect_aabb(&lo, &hi, f64::INFINITY), None);
    }
}
