#include "abep/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace abep {

void RunningStats::push(double v) {
  ++n_;
  const double delta = v - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (v - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double RunningStats::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

Estimate RunningStats::estimate() const {
  Estimate e;
  e.mean = mean_;
  e.n = n_;
  e.std_error = n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
  return e;
}

Estimate batch_means(std::span<const double> series, std::size_t n_batches) {
  Estimate out;
  out.n = series.size();
  if (series.empty()) return out;
  n_batches = std::clamp<std::size_t>(n_batches, 1, series.size());
  const std::size_t len = series.size() / n_batches;
  RunningStats batches;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double sum = 0.0;
    for (std::size_t k = b * len; k < (b + 1) * len; ++k) sum += series[k];
    batches.push(sum / static_cast<double>(len));
  }
  out.mean = batches.mean();
  out.std_error = std::sqrt(batches.variance() / static_cast<double>(n_batches));
  return out;
}

double z_score(const Estimate& a, const Estimate& b) {
  const double diff = std::abs(a.mean - b.mean);
  const double se = std::hypot(a.std_error, b.std_error);
  if (diff == 0.0) return 0.0;
  return se > 0.0 ? diff / se : INFINITY;
}

unsigned default_threads() {
  if (const char* env = std::getenv("ABEP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n_tasks, unsigned threads,
                  const std::function<void(std::size_t)>& task) {
  threads = std::max(1u, threads);
  if (threads == 1 || n_tasks <= 1) {
    for (std::size_t k = 0; k < n_tasks; ++k) task(k);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n_tasks);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n_tasks; k += workers) task(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace abep
