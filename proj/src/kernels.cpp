/*
 * Copyright 2026 The bas-eval Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bas/kernels.hpp"

#include <exception>
#include <random>

#include <fmt/format.h>

#include "bas/error.hpp"

#ifdef BAS_HAVE_OPENMP
#include <omp.h>
#endif

namespace bas::kernels {
namespace {

// Keeps the exception of the lowest failing index so the rethrown error does
// not depend on the thread schedule.
class FirstError {
 public:
  void record(std::ptrdiff_t index, std::exception_ptr error) {
#pragma omp critical(bas_first_error)
    {
      if (!error_ || index < index_) {
        index_ = index;
        error_ = error;
      }
    }
  }

  void rethrow_if_any() const {
    if (error_) std::rethrow_exception(error_);
  }

  // Rethrows library errors as DataError naming the failing resample.
  void rethrow_with_index(const char* label) const {
    if (!error_) return;
    try {
      std::rethrow_exception(error_);
    } catch (const Error& e) {
      throw DataError(fmt::format("{} {} failed: {}", label, index_, e.what()));
    }
  }

 private:
  std::ptrdiff_t index_ = 0;
  std::exception_ptr error_;
};

}  // namespace

std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed,
                                          std::size_t resample) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(resample),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(resample) >> 32)};
  std::mt19937_64 engine(seq);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> indices(n);
  for (auto& index : indices) index = pick(engine);
  return indices;
}

namespace serial {

std::vector<double> weighted_utilities(std::span<const Prediction> records,
                                       const RiskPrior& prior, ClipEpsilon eps) {
  std::vector<double> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[i] = weighted_bas_utility(clip_confidence(records[i].confidence, eps),
                                  records[i].correct, prior);
  }
  return out;
}

std::vector<double> bootstrap_replicates(std::size_t n,
                                         const IndexStatistic& statistic,
                                         std::size_t n_resamples,
                                         std::uint64_t seed) {
  std::vector<double> out(n_resamples);
  for (std::size_t b = 0; b < n_resamples; ++b) {
    try {
      out[b] = statistic(resample_indices(n, seed, b));
    } catch (const Error& e) {
      throw DataError(fmt::format("bootstrap resample {} failed: {}", b, e.what()));
    }
  }
  return out;
}

}  // namespace serial

namespace omp {

std::vector<double> weighted_utilities(std::span<const Prediction> records,
                                       const RiskPrior& prior, ClipEpsilon eps) {
  const auto n = static_cast<std::ptrdiff_t>(records.size());
  std::vector<double> out(records.size());
  FirstError error;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = weighted_bas_utility(clip_confidence(records[i].confidence, eps),
                                    records[i].correct, prior);
    } catch (...) {
      error.record(i, std::current_exception());
    }
  }
  error.rethrow_if_any();
  return out;
}

std::vector<double> bootstrap_replicates(std::size_t n,
                                         const IndexStatistic& statistic,
                                         std::size_t n_resamples,
                                         std::uint64_t seed) {
  const auto count = static_cast<std::ptrdiff_t>(n_resamples);
  std::vector<double> out(n_resamples);
  FirstError error;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t b = 0; b < count; ++b) {
    try {
      out[b] = statistic(resample_indices(n, seed, static_cast<std::size_t>(b)));
    } catch (...) {
      error.record(b, std::current_exception());
    }
  }
  error.rethrow_with_index("bootstrap resample");
  return out;
}

}  // namespace omp

int max_threads() {
#ifdef BAS_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace bas::kernels
