#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace topeig::detail {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dimension, int n, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dimension, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<int> dims(static_cast<std::size_t>(dimension), n);
    std::size_t total = 1;
    for (int k = 0; k < dimension; ++k) total *= static_cast<std::size_t>(n);
    auto* buffer = fftw_alloc_complex(total);
    // ESTIMATE keeps planning deterministic; UNALIGNED allows std::vector storage.
    fftw_plan plan = fftw_plan_dft(dimension, dims.data(), buffer, buffer,
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buffer);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(std::complex<double>* data, int dimension, int n, int sign) {
  fftw_plan plan = cache().get(dimension, n, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

}  // namespace topeig::detail
