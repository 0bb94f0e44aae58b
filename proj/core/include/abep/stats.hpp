#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace abep {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Welford accumulator; merge() combines partial results in a fixed order.
class RunningStats {
 public:
  void push(double v);
  void merge(const RunningStats& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  // Unbiased sample variance (0 for fewer than two samples).
  double variance() const;
  // Standard error of the mean assuming independent samples.
  Estimate estimate() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Batch-means estimate for a correlated series: the series is cut into
// n_batches contiguous blocks and the standard error comes from the spread of
// the block means. Trailing samples that do not fill a block are dropped.
Estimate batch_means(std::span<const double> series, std::size_t n_batches);

// |a - b| / sqrt(se_a^2 + se_b^2); 0 when both values agree exactly.
double z_score(const Estimate& a, const Estimate& b);

// Number of workers: the ABEP_THREADS environment variable if set and
// positive, otherwise std::thread::hardware_concurrency() (at least 1).
unsigned default_threads();

// Runs task(k) for k in [0, n_tasks) on up to `threads` workers. Tasks write
// into caller-owned per-index slots, so reductions stay in index order.
void parallel_for(std::size_t n_tasks, unsigned threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace abep
