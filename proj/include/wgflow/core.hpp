#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace wgflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Eigen::Index;

/// Axis-aligned hypercube domain in R^d.
struct Domain {
  Vector lower;
  Vector upper;

  Domain() = default;
  Domain(Vector lo, Vector hi);
  Domain(double lo, double hi);  // 1-D convenience

  Index dim() const { return lower.size(); }
  double volume() const;
  Vector widths() const { return upper - lower; }
  bool contains(const Vector& x, double slack = 0.0) const;

  /// Componentwise intersection; throws if empty.
  Domain clipped_to(const Domain& outer) const;
};

struct InvalidDomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Deterministic stream splitting (splitmix64 over master ^ stream id).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Name recorded in run metadata for reproducibility audits.
inline constexpr const char* kRngName = "mt19937_64/boxmuller";

/// Seedable generator with in-house uniform/normal transforms so that streams
/// are identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value cached).
  double normal();

  Vector normal_vector(Index n);
  Vector uniform_vector(const Vector& lo, const Vector& hi);

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace wgflow
