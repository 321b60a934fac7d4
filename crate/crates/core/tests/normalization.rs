use local_entanglement::quadrature::{composite, GaussLegendre};
use local_entanglement::state::{BipartiteState, ComRelState, ConfigPoint, Orbital};

fn grid_norm(state: &ComRelState, half: f64) -> f64 {
    let (x, w) = composite(8, 48, -half, half);
    let mut total = 0.0;
    for (xa, wa) in x.iter().zip(&w) {
        for (xb, wb) in x.iter().zip(&w) {
            let p = ConfigPoint::new(vec![*xa], vec![*xb]);
            total += wa * wb * state.amplitude(&p).unwrap().norm_sqr();
        }
    }
    total
}

#[test]
fn coupled_oscillator_eigenfunctions_are_normalized() {
    for (nc, nr) in [(0, 0), (1, 1), (1, 3), (2, 0), (0, 4)] {
        let s = ComRelState::coupled_oscillator(nc, nr, 1.0, 2.5, 1.1, 0.6, 1.0).unwrap();
        let norm = grid_norm(&s, 12.0);
        assert!((norm - 1.0).abs() < 1e-10, "({nc}, {nr}): {norm}");
    }
}

#[test]
fn hydrogen_orbitals_are_normalized() {
    let (r, wr) = composite(16, 60, 0.0, 120.0);
    let gl = GaussLegendre::new(24).unwrap();
    let (th, wth) = gl.on_interval(0.0, std::f64::consts::PI);
    let (ph, wph) = gl.on_interval(0.0, 2.0 * std::f64::consts::PI);
    for (n, l, m) in [(1, 0, 0), (2, 1, 1), (3, 2, -1), (4, 3, 2)] {
        let orb = Orbital::new(n, l, m, 1.0).unwrap();
        let mut total = 0.0;
        for (ri, wri) in r.iter().zip(&wr) {
            for (t, wt) in th.iter().zip(&wth) {
                for (f, wf) in ph.iter().zip(&wph) {
                    let p = [
                        ri * t.sin() * f.cos(),
                        ri * t.sin() * f.sin(),
                        ri * t.cos(),
                    ]
                    .map(|v| local_entanglement::Complex64::new(v, 0.0));
                    let v = orb.cartesian(&p, false).unwrap().norm_sqr();
                    total += wri * wt * wf * ri * ri * t.sin() * v;
                }
            }
        }
        assert!((total - 1.0).abs() < 1e-8, "({n}, {l}, {m}): {total}");
    }
}
