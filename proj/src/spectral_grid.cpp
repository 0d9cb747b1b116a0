#include "kam/spectral_grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "kam/errors.hpp"

namespace kam {

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(points_per_axis);
  return total;
}

std::vector<double> GridSpec::point(std::size_t index) const {
  std::vector<double> theta(dim);
  const double h = 2.0 * std::numbers::pi / points_per_axis;
  for (int j = dim - 1; j >= 0; --j) {
    theta[j] = h * static_cast<double>(index % points_per_axis);
    index /= points_per_axis;
  }
  return theta;
}

namespace {

// Plans are created against fftw_malloc'ed scratch buffers and executed
// through the new-array interface on other fftw_malloc'ed buffers, so the
// chosen codelets never depend on the caller's alignment.
struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    std::vector<int> dims(dim, n);
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(n);
    auto* buf = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, dims.data(), buf, buf, sign, FFTW_ESTIMATE);
    fftw_free(buf);
    if (plan == nullptr) throw Error("fftw: plan creation failed");
    plans.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(const GridSpec& grid, std::span<cplx> values, int sign) {
  if (grid.dim < 1 || grid.points_per_axis < 1) throw ShapeError("dft: empty grid");
  const std::size_t total = grid.size();
  if (values.size() != total) throw ShapeError("dft: value count does not match grid");
  fftw_plan plan = cache().get(grid.dim, grid.points_per_axis, sign);
  auto* buf = fftw_alloc_complex(total);
  std::memcpy(buf, values.data(), total * sizeof(fftw_complex));
  fftw_execute_dft(plan, buf, buf);
  std::memcpy(static_cast<void*>(values.data()), buf, total * sizeof(fftw_complex));
  fftw_free(buf);
}

}  // namespace

void dft_forward(const GridSpec& grid, std::span<cplx> values) {
  execute(grid, values, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : values) v *= scale;
}

void dft_inverse(const GridSpec& grid, std::span<cplx> values) {
  execute(grid, values, FFTW_BACKWARD);
}

}  // namespace kam
