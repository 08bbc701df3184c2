fn homogeneous_stage(adj: &SignedAdjacency, k: usize, seed: u64, eps: f64) -> (Membership, f64) {
    let n = adj.n();
    let mut membership = spectral_init(adj, k, seed).unwrap();
    let mut q = {
        let h = project_node([0.0; 4], eps / 2.0).unwrap();
        [h[0] * 2.0, h[1] * 2.0, h[2] * 2.0, h[3] * 2.0]
    };
    let pair_count = adj.pair_count() as f64;
    let expand = |q: &[f64; 4]| NodeParams::from_vectors(
        &vec![q[0] / 2.0; n], &vec![q[1] / 2.0; n], &vec![q[2] / 2.0; n], &vec![q[3] / 2.0; n],
    ).unwrap();
    let mut prev = f64::INFINITY;
    let mut l_now = prev;
    for _t in 0..60 {
        let mut counts = [[0f64; 3]; 2];
        for i in 0..n {
            for j in (i + 1)..n {
                let same = usize::from(membership.same_community(i, j));
                counts[same][(adj.entry(i, j) + 1) as usize] += 1.0;
            }
        }
        let loss_of = |q: &[f64; 4]| -> f64 {
            let mut total = 0.0;
            for (same, cc) in counts.iter().enumerate() {
                let tp = if same == 1 { q[0] + q[1] } else { q[0] };
                let tm = if same == 1 { q[2] + q[3] } else { q[2] };
                let m = tp.max(tm).max(0.0);
                let lse = m + ((-m).exp() + ((tp - m).exp() + (tm - m).exp())).ln();
                total += cc[2] * (lse - tp) + cc[0] * (lse - tm) + cc[1] * lse;
            }
            total / pair_count
        };
        let grad_of = |q: &[f64; 4]| -> [f64; 4] {
            let mut g = [0.0f64; 4];
            for (same, cc) in counts.iter().enumerate() {
                let tp = if same == 1 { q[0] + q[1] } else { q[0] };
                let tm = if same == 1 { q[2] + q[3] } else { q[2] };
                let m = tp.max(tm).max(0.0);
                let e0 = (-m).exp(); let epx = (tp - m).exp(); let emx = (tm - m).exp();
                let den = e0 + (epx + emx);
                let total: f64 = cc.iter().sum();
                let rp = total * epx / den - cc[2];
                let rm = total * emx / den - cc[0];
                g[0] += rp; g[2] += rm;
                if same == 1 { g[1] += rp; g[3] += rm; }
            }
            for v in g.iter_mut() { *v /= pair_count; }
            g
        };
        let mut f = loss_of(&q);
        let mut step = 8.0f64;
        for _ in 0..400 {
            let g = grad_of(&q);
            if g.iter().map(|v| v * v).sum::<f64>() < 1e-22 { break; }
            let mut alpha = step;
            let mut ok = false;
            for _ in 0..60 {
                let half = project_node(
                    [(q[0] - alpha * g[0]) / 2.0, (q[1] - alpha * g[1]) / 2.0,
                     (q[2] - alpha * g[2]) / 2.0, (q[3] - alpha * g[3]) / 2.0], eps / 2.0,
                ).unwrap();
                let trial = [half[0] * 2.0, half[1] * 2.0, half[2] * 2.0, half[3] * 2.0];
                let ft = loss_of(&trial);
                if ft < f - 1e-15 { q = trial; f = ft; ok = true; break; }
                alpha *= 0.5;
            }
            if !ok { break; }
            step = (alpha * 2.0).min(128.0);
        }
        let params = expand(&q);
        let batch = label_update_batch(adj, &params, &membership).unwrap();
        let l_cur = nll_of_params(adj, &params, &membership).unwrap().value;
        let l_batch = nll_of_params(adj, &params, &batch).unwrap().value;
        if l_batch < l_cur {
            membership = batch;
        } else {
            membership = label_update_sequential(adj, &params, &membership).unwrap();
        }
        l_now = nll_of_params(adj, &params, &membership).unwrap().value;
        if (l_now - prev).abs() / prev.abs().max(1e-12) < 1e-8 { break; }
        prev = l_now;
    }
    (membership, l_now)
}
