/// `(0..n).map(f)` spread over the available cores, results in index order.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(n.max(1));
    if workers <= 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..workers)
            .map(|w| s.spawn(move || (w..n).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                out[i] = Some(v);
            }
        }
    });
    out.into_iter().map(|v| v.expect("every index visited")).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn keeps_order() {
        assert_eq!(super::par_map(50, |i| i * i), (0..50).map(|i| i * i).collect::<Vec<_>>());
        assert!(super::par_map(0, |i| i).is_empty());
    }
}
