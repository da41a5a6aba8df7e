#pragma once

#include <cstddef>
#include <cstdint>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace wearssl::nn {

using Shape = std::vector<std::size_t>;

// Fixed 64-byte alignment keeps Eigen's vectorized reductions from peeling
// differently run to run, which would change results in the last bits.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using AlignedBuffer = std::vector<double, AlignedAllocator<double>>;

std::size_t element_count(const Shape& shape) noexcept;
std::string to_string(const Shape& shape);

/// Dense row-major tensor of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  // Two-dimensional element access for rank-2 tensors.
  double& at(std::size_t row, std::size_t col) noexcept { return values_[row * shape_[1] + col]; }
  double at(std::size_t row, std::size_t col) const noexcept { return values_[row * shape_[1] + col]; }

  /// Same data, new shape; the element count must match.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  void fill(double v) noexcept;
  bool all_finite() const noexcept;
  double l2_norm() const noexcept;

  /// Contiguous rows [begin, end) along axis 0.
  Tensor slice_rows(std::size_t begin, std::size_t end) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  AlignedBuffer values_;
};

/// Stacks tensors of identical shape along a new leading axis.
Tensor stack(std::span<const Tensor> items);

/// Concatenates tensors along axis 0; trailing extents must agree.
Tensor concat_rows(const Tensor& a, const Tensor& b);

/// FNV-1a over the raw bytes of the values, used for bitwise comparisons.
std::uint64_t fingerprint(const Tensor& t, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

}  // namespace wearssl::nn
