/// Uniform output grid `0, Δ, 2Δ, …` closed at `t_end`.
pub(crate) struct SampleGrid {
    pub times: Vec<f64>,
}

impl SampleGrid {
    pub fn new(t_end: f64, interval: f64) -> Self {
        let n = (t_end / interval * (1.0 + 1e-12)).floor() as usize;
        let mut times: Vec<f64> = (0..=n).map(|j| j as f64 * interval).collect();
        if let Some(last) = times.last_mut() {
            if *last > t_end {
                *last = t_end;
            }
        }
        if t_end - times[times.len() - 1] > 1e-9 * interval {
            times.push(t_end);
        }
        Self { times }
    }
}

/// Collects dense samples as integration steps are accepted.
pub(crate) struct Sampler<'g> {
    grid: &'g [f64],
    next: usize,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl<'g> Sampler<'g> {
    pub fn new(grid: &'g SampleGrid, y0: &[f64]) -> Self {
        let mut times = Vec::with_capacity(grid.times.len());
        let mut states = Vec::with_capacity(grid.times.len());
        times.push(0.0);
        states.push(y0.to_vec());
        Self {
            grid: &grid.times,
            next: 1,
            times,
            states,
        }
    }

    /// Emits every grid point in `(t_old, t_new]`. `interp(t)` evaluates the
    /// step's continuous extension; grid points that coincide with `t_new`
    /// (to within a tiny fraction of the step) take `y_new` verbatim.
    pub fn emit(
        &mut self,
        t_old: f64,
        t_new: f64,
        y_new: &[f64],
        mut interp: impl FnMut(f64) -> Vec<f64>,
    ) {
        let snap = 1e-9 * (t_new - t_old).abs();
        while self.next < self.grid.len() {
            let ts = self.grid[self.next];
            if ts > t_new + snap {
                break;
            }
            let y = if (ts - t_new).abs() <= snap {
                y_new.to_vec()
            } else {
                interp(ts)
            };
            self.times.push(ts);
            self.states.push(y);
            self.next += 1;
        }
    }

    pub fn finish(self) -> (Vec<f64>, Vec<Vec<f64>>) {
        (self.times, self.states)
    }
}
