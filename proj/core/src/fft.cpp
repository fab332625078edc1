#include "semiquant/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace semiquant {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using PlanKey = std::tuple<int, int, bool>;

std::map<PlanKey, std::unique_ptr<FftPlan>>& plan_cache() {
  static std::map<PlanKey, std::unique_ptr<FftPlan>> cache;
  return cache;
}

}  // namespace

FftPlan::FftPlan(int rows, int cols, bool batched) {
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(rows) * cols);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (batched) {
    int n[] = {cols};
    forward_ = fftw_plan_many_dft(1, n, rows, buf, nullptr, 1, cols, buf, nullptr, 1, cols,
                                  FFTW_FORWARD, flags);
    backward_ = fftw_plan_many_dft(1, n, rows, buf, nullptr, 1, cols, buf, nullptr, 1, cols,
                                   FFTW_BACKWARD, flags);
  } else {
    forward_ = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_BACKWARD, flags);
  }
}

FftPlan::~FftPlan() {
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

const FftPlan& FftPlan::grid(int rows, int cols) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto& slot = plan_cache()[{rows, cols, false}];
  if (!slot) slot.reset(new FftPlan(rows, cols, false));
  return *slot;
}

const FftPlan& FftPlan::rows(int rows, int cols) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto& slot = plan_cache()[{rows, cols, true}];
  if (!slot) slot.reset(new FftPlan(rows, cols, true));
  return *slot;
}

void FftPlan::forward(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(forward_), buf, buf);
}

void FftPlan::backward(std::complex<double>* data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(backward_), buf, buf);
}

}  // namespace semiquant
