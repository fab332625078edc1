#pragma once

#include <complex>

namespace semiquant {

/// Cached FFTW plans. Transforms are unnormalised and in place; execution is
/// thread-safe, planning is serialised internally.
class FftPlan {
 public:
  /// Full 2-D transform of a row-major rows x cols array.
  static const FftPlan& grid(int rows, int cols);
  /// `rows` independent 1-D transforms of length `cols` over contiguous rows.
  static const FftPlan& rows(int rows, int cols);

  void forward(std::complex<double>* data) const;
  void backward(std::complex<double>* data) const;

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan();

 private:
  FftPlan(int rows, int cols, bool batched);

  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

}  // namespace semiquant
