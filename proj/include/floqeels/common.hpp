// Shared error type and the (i, k, l) harmonic-coefficient container used
// throughout: index l runs over drive harmonics [-l_max, l_max].
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace floqeels {

class Error : public std::runtime_error {
 public:
  enum class Kind { input, numerical };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Dense tensor T(i, k, l) with l in [-l_max, l_max]. at() treats out-of-range
// l as zero, which matches the convention that truncated harmonics vanish.
template <typename T>
class HarmonicTensor {
 public:
  HarmonicTensor() = default;
  HarmonicTensor(int dim1, int dim2, int l_max)
      : dim1_(dim1), dim2_(dim2), l_max_(l_max),
        data_(static_cast<std::size_t>(dim1) * dim2 * (2 * l_max + 1), T(0)) {}

  int dim1() const { return dim1_; }
  int dim2() const { return dim2_; }
  int l_max() const { return l_max_; }
  bool empty() const { return data_.empty(); }

  T& operator()(int i, int k, int l) { return data_[index(i, k, l)]; }
  const T& operator()(int i, int k, int l) const { return data_[index(i, k, l)]; }

  T at(int i, int k, int l) const {
    if (l < -l_max_ || l > l_max_) return T(0);
    return data_[index(i, k, l)];
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

 private:
  std::size_t index(int i, int k, int l) const {
    return (static_cast<std::size_t>(i) * dim2_ + k) * (2 * l_max_ + 1) + (l + l_max_);
  }

  int dim1_ = 0;
  int dim2_ = 0;
  int l_max_ = 0;
  std::vector<T> data_;
};

using Complex = std::complex<double>;

}  // namespace floqeels
