#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace solwave::detail {

/// Process-wide cache of FFTW plans, keyed by transform size.
///
/// Plans are created with FFTW_ESTIMATE so results are bit-reproducible
/// across runs, and FFTW_UNALIGNED so they can execute on any caller buffer.
/// Plan creation is serialized (FFTW's planner is not thread-safe);
/// execution on distinct buffers is safe concurrently.
class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine engine;
    return engine;
  }

  /// Unnormalized forward transform: out[k] = sum_j in[j] e^{-2pi i jk/n},
  /// k = 0 .. n/2. `out` is resized to n/2 + 1.
  void forward(const std::vector<double>& in,
               std::vector<std::complex<double>>& out) {
    const int n = static_cast<int>(in.size());
    out.resize(n / 2 + 1);
    fftw_execute_dft_r2c(
        plans(n).r2c, const_cast<double*>(in.data()),
        reinterpret_cast<fftw_complex*>(out.data()));
  }

  /// Unnormalized inverse of `forward` (caller divides by n). The input
  /// half-spectrum is preserved.
  void inverse(const std::vector<std::complex<double>>& in, int n,
               std::vector<double>& out) {
    out.resize(n);
    fftw_execute_dft_c2r(
        plans(n).c2r,
        reinterpret_cast<fftw_complex*>(
            const_cast<std::complex<double>*>(in.data())),
        out.data());
  }

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

 private:
  struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
  };

  FftEngine() = default;

  ~FftEngine() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.r2c);
      fftw_destroy_plan(p.c2r);
    }
  }

  Plans& plans(int n) {
    std::scoped_lock lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> real(n);
    std::vector<std::complex<double>> cplx(n / 2 + 1);
    Plans p;
    p.r2c = fftw_plan_dft_r2c_1d(
        n, real.data(), reinterpret_cast<fftw_complex*>(cplx.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.c2r = fftw_plan_dft_c2r_1d(
        n, reinterpret_cast<fftw_complex*>(cplx.data()), real.data(),
        FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    return plans_.emplace(n, p).first->second;
  }

  std::mutex mutex_;
  std::map<int, Plans> plans_;
};

}  // namespace solwave::detail
