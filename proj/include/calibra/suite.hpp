#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "calibra/exterior.hpp"

namespace calibra::suite {

/// Deterministic scalar generator for the property suites. Doubles come
/// from the raw 64-bit stream, so the sequence does not depend on the
/// standard library's distribution implementations.
struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform01() { return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    const double u1 = uniform01(), u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::mt19937_64 gen;
};

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double lo, double hi);
NFormD random_form(Rng& rng, int d, int k, double scale);
/// Random orthonormal d x k frame (QR of a Gaussian matrix).
Eigen::MatrixXd random_frame(Rng& rng, int d, int k);

struct CaseResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string tag;
  std::uint64_t seed = 0;
  std::vector<CaseResult> cases;

  bool all_passed() const;
  int failed_count() const;
};

const std::vector<std::string>& suite_tags();

/// Execute the invariant/property suite of the named module
/// (algebra, frames, theta, minimality, comass, certify).
/// Throws SpecError for an unknown tag.
SuiteResult run_suite(const std::string& tag, std::uint64_t seed = 0);

std::string to_junit_xml(const SuiteResult& result);

/// Render "name: PASS/FAIL detail" lines plus a summary line.
std::string to_text(const SuiteResult& result);

}  // namespace calibra::suite
