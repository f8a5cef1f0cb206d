use covgram_core::*;

fn main() {
    let body = SupportBody::new(1.0, vec![0.0, 0.0, 0.1], vec![]).unwrap();
    let poly = body.polygonize(4096).unwrap();
    let k = ConvexBody::Support(body.clone());
    let oracle = CovariogramOracle::analytic(&k).unwrap();
    let y = Vec2::new(-0.99245255, 1.56132965);
    let h = oracle.step();
    println!("step = {h}");
    for (dx, dy) in [(0.0,0.0),(1.0,0.0),(-1.0,0.0),(0.0,1.0),(0.0,-1.0)] {
        let p = y + Vec2::new(dx, dy) * h;
        let fast = oracle.value(p);
        let slow = convex_intersection(&poly, &poly.translate(p)).map_or(0.0, |q| q.area());
        println!("({dx:+},{dy:+}): fast {fast:.12}  slow(4096) {slow:.12}  diff {:.3e}", (fast - slow).abs());
    }
    let g = oracle.gradient(y).unwrap();
    println!("fd grad = {g:?}");
    let par = inscribed_parallelogram(&body, y).unwrap();
    println!("true D = {:?}, R D = {:?}", par.edge, rot90(par.edge));
}
