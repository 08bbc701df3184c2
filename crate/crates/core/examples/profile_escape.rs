fn profile_node(
    adj: &SignedAdjacency, params: &NodeParams, labels: &[usize],
    i: usize, cand: usize, eps: f64, iters: usize,
) -> ([f64; 4], f64) {
    let n = adj.n();
    let mut q = params.node(i);
    let row = |q: &[f64; 4]| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            if j == i { continue; }
            let same = labels[j] == cand;
            let tp = if same { (q[0] + params.gamma_plus(j)) + (q[1] + params.eta_plus(j)) } else { q[0] + params.gamma_plus(j) };
            let tm = if same { (q[2] + params.gamma_minus(j)) + (q[3] + params.eta_minus(j)) } else { q[2] + params.gamma_minus(j) };
            let m = tp.max(tm).max(0.0);
            let lse = m + ((-m).exp() + ((tp - m).exp() + (tm - m).exp())).ln();
            s += match adj.entry(i, j) { 1 => lse - tp, -1 => lse - tm, _ => lse };
        }
        s
    };
    let grad = |q: &[f64; 4]| -> [f64; 4] {
        let mut g = [0.0; 4];
        for j in 0..n {
            if j == i { continue; }
            let same = labels[j] == cand;
            let tp = if same { (q[0] + params.gamma_plus(j)) + (q[1] + params.eta_plus(j)) } else { q[0] + params.gamma_plus(j) };
            let tm = if same { (q[2] + params.gamma_minus(j)) + (q[3] + params.eta_minus(j)) } else { q[2] + params.gamma_minus(j) };
            let m = tp.max(tm).max(0.0);
            let e0 = (-m).exp(); let ep2 = (tp - m).exp(); let em2 = (tm - m).exp();
            let den = e0 + (ep2 + em2);
            let a = adj.entry(i, j);
            let rp = ep2 / den - f64::from(a == 1);
            let rm = em2 / den - f64::from(a == -1);
            g[0] += rp; g[2] += rm;
            if same { g[1] += rp; g[3] += rm; }
        }
        g
    };
    let mut f = row(&q);
    let mut step = 0.5;
    for _ in 0..iters {
        let g = grad(&q);
        if g.iter().map(|v| v * v).sum::<f64>() < 1e-18 { break; }
        let mut alpha: f64 = step;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = project_node(
                [q[0] - alpha * g[0], q[1] - alpha * g[1], q[2] - alpha * g[2], q[3] - alpha * g[3]], eps,
            ).unwrap();
            let ft = row(&trial);
            if ft <= f - 1e-12 { q = trial; f = ft; accepted = true; break; }
            alpha *= 0.5;
        }
        if !accepted { break; }
        step = (alpha * 2.0).min(4.0);
    }
    (q, f)
}

fn profile_escape(
    adj: &SignedAdjacency, params: &mut NodeParams, membership: &mut Membership, eps: f64,
) -> usize {
    let n = adj.n();
    let k = membership.k();
    let mut moved = 0;
    for i in 0..n {
        let labels = membership.labels().to_vec();
        let mut best: Option<(usize, [f64; 4], f64)> = None;
        for cand in 0..k {
            let (q, f) = profile_node(adj, params, &labels, i, cand, eps, 80);
            if best.as_ref().map_or(true, |(_, _, bf)| f < *bf - 1e-12) {
                best = Some((cand, q, f));
            }
        }
        let (cand, q, _) = best.unwrap();
        if cand != membership.label(i) {
            let before = nll_of_params(adj, params, membership).unwrap().value;
            let mut tp = params.clone();
            set_node_dbg(&mut tp, i, q);
            let mut tm = membership.clone();
            set_label_dbg(&mut tm, i, cand);
            let after = nll_of_params(adj, &tp, &tm).unwrap().value;
            let delta: f64 = std::env::var("ESCAPE_DELTA").ok()
                .and_then(|v| v.parse().ok()).unwrap_or(0.0);
            if (before - after) * adj.pair_count() as f64 > delta {
                *params = tp; *membership = tm; moved += 1;
            }
        }
    }
    moved
}

fn set_node_dbg(p: &mut NodeParams, i: usize, q: [f64; 4]) {
    let mut gp = p.gamma_plus_vec(); let mut ep = p.eta_plus_vec();
    let mut gm = p.gamma_minus_vec(); let mut em = p.eta_minus_vec();
    gp[i] = q[0]; ep[i] = q[1]; gm[i] = q[2]; em[i] = q[3];
    *p = NodeParams::from_vectors(&gp, &ep, &gm, &em).unwrap();
}
fn set_label_dbg(m: &mut Membership, i: usize, l: usize) {
    let mut labels = m.labels().to_vec();
    labels[i] = l;
    *m = Membership::new(labels, m.k()).unwrap();
}

fn full_fit_from(adj: &SignedAdjacency, init: Membership, config: &FitConfig) -> (NodeParams, Membership) {
    let use_escape = std::env::var_os("NO_ESCAPE").is_none();
    let spec = FeasibleSpec { epsilon: config.epsilon, gauge_k2: true };
    let mut params = project_all(&NodeParams::zeros(adj.n()), &spec).unwrap();
    let mut membership = init;
    let mut prev = nll_of_params(adj, &params, &membership).unwrap().value;
    let mut escapes = 0;
    for _t in 0..config.t_max {
        params = spg_solve(adj, &params, &membership, config).unwrap();
        let l_spg = nll_of_params(adj, &params, &membership).unwrap().value;
        let batch = label_update_batch(adj, &params, &membership).unwrap();
        let l_batch = nll_of_params(adj, &params, &batch).unwrap().value;
        let l_label = if l_batch < l_spg { membership = batch; l_batch } else {
            membership = label_update_sequential(adj, &params, &membership).unwrap();
            nll_of_params(adj, &params, &membership).unwrap().value
        };
        let rel = (l_label - prev).abs() / prev.abs().max(1e-300);
        prev = l_label;
        if rel < config.alpha {
            if use_escape && escapes < 8 {
                escapes += 1;
                let moved = profile_escape(adj, &mut params, &mut membership, config.epsilon);
                if moved == 0 { break; }
                prev = nll_of_params(adj, &params, &membership).unwrap().value;
            } else { break; }
        }
    }
    (params, membership)
}
