/// All permutations of `0..d` with their signs, in lexicographic order.
pub(crate) fn permutations(d: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..d).collect();
    loop {
        out.push((p.clone(), sign(&p)));
        // next lexicographic permutation
        let Some(i) = (1..d).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..d).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

fn sign(p: &[usize]) -> f64 {
    let inversions = (0..p.len())
        .flat_map(|a| (a + 1..p.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| p[a] > p[b])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
