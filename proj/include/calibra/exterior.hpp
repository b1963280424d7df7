#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "calibra/multi_index.hpp"

namespace calibra {

/// Dense alternating k-form on R^d.
///
/// Coefficients are stored over strictly increasing multi-indices
/// (0-based), addressed by combinadic rank; see multi_index.hpp. The
/// toolkit targets d <= 12, where the dense vector of length C(d,k) is
/// both smaller and faster than any sparse scheme. Values are immutable
/// in spirit: every operation below is a pure function returning a fresh
/// form, so concurrent readers need no synchronization.
template <class Scalar>
class NForm {
 public:
  using CoeffVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  NForm() : NForm(0, 0) {}

  NForm(int ambient_dim, int degree)
      : dim_(ambient_dim), degree_(degree),
        coeffs_(CoeffVector::Zero(binomial(ambient_dim, degree))) {
    CALIBRA_REQUIRE(ambient_dim >= 0 && degree >= 0 && degree <= ambient_dim,
                    "NForm: need 0 <= degree <= ambient_dim");
  }

  /// Basis monomial dx_{i_1} ^ ... ^ dx_{i_k} (indices strictly increasing).
  static NForm basis(int ambient_dim, std::span<const int> index) {
    NForm a(ambient_dim, static_cast<int>(index.size()));
    a.coeffs_[rank_multi_index(index)] = Scalar(1);
    return a;
  }

  /// Degree-1 form sum_i components[i] dx_i.
  template <class Derived>
  static NForm covector(int ambient_dim, const Eigen::MatrixBase<Derived>& components) {
    CALIBRA_REQUIRE(components.size() == ambient_dim, "covector: size mismatch");
    NForm a(ambient_dim, 1);
    a.coeffs_ = components.template cast<Scalar>();
    return a;
  }

  /// Degree-0 form (a scalar).
  static NForm constant(int ambient_dim, Scalar value) {
    NForm a(ambient_dim, 0);
    a.coeffs_[0] = value;
    return a;
  }

  int ambient_dim() const { return dim_; }
  int degree() const { return degree_; }

  const CoeffVector& coeffs() const { return coeffs_; }
  CoeffVector& coeffs() { return coeffs_; }

  Scalar coeff(std::span<const int> index) const {
    CALIBRA_REQUIRE(static_cast<int>(index.size()) == degree_, "coeff: wrong degree");
    return coeffs_[rank_multi_index(index)];
  }
  Scalar& coeff(std::span<const int> index) {
    CALIBRA_REQUIRE(static_cast<int>(index.size()) == degree_, "coeff: wrong degree");
    return coeffs_[rank_multi_index(index)];
  }
  Scalar coeff(std::initializer_list<int> index) const {
    return coeff(std::span<const int>(index.begin(), index.size()));
  }

  NForm& operator+=(const NForm& o) {
    require_same_shape(o);
    coeffs_ += o.coeffs_;
    return *this;
  }
  NForm& operator-=(const NForm& o) {
    require_same_shape(o);
    coeffs_ -= o.coeffs_;
    return *this;
  }
  NForm& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

  friend NForm operator+(NForm a, const NForm& b) { return a += b; }
  friend NForm operator-(NForm a, const NForm& b) { return a -= b; }
  friend NForm operator*(Scalar s, NForm a) { return a *= s; }
  friend NForm operator*(NForm a, Scalar s) { return a *= s; }
  friend NForm operator-(NForm a) { return a *= Scalar(-1); }

 private:
  void require_same_shape(const NForm& o) const {
    CALIBRA_REQUIRE(dim_ == o.dim_ && degree_ == o.degree_,
                    "NForm: ambient dimension or degree mismatch");
  }

  int dim_;
  int degree_;
  CoeffVector coeffs_;
};

/// A k-frame in R^d: the columns span an oriented k-plane. For comass
/// work the columns are kept orthonormal.
template <class Scalar>
struct Frame {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> columns;

  int ambient_dim() const { return static_cast<int>(columns.rows()); }
  int count() const { return static_cast<int>(columns.cols()); }

  /// Max deviation of columns^T columns from the identity.
  Scalar gram_error() const {
    const auto g = (columns.transpose() * columns -
                    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(
                        count(), count()))
                       .cwiseAbs();
    return g.size() == 0 ? Scalar(0) : g.maxCoeff();
  }
};

using NFormD = NForm<double>;
using FrameD = Frame<double>;

/// Exterior product with the usual shuffle signs.
template <class Scalar>
NForm<Scalar> wedge(const NForm<Scalar>& a, const NForm<Scalar>& b) {
  CALIBRA_REQUIRE(a.ambient_dim() == b.ambient_dim(), "wedge: ambient dimension mismatch");
  const int d = a.ambient_dim();
  const int ka = a.degree(), kb = b.degree();
  CALIBRA_REQUIRE(ka + kb <= d, "wedge: degree overflow");
  NForm<Scalar> out(d, ka + kb);

  std::array<int, kBinomialMax> ia{}, ib{}, im{};
  const std::int64_t ca = binomial(d, ka), cb = binomial(d, kb);
  for (std::int64_t ra = 0; ra < ca; ++ra) {
    const Scalar va = a.coeffs()[ra];
    if (va == Scalar(0)) continue;
    unrank_multi_index(ra, ka, std::span<int>(ia.data(), static_cast<std::size_t>(ka)));
    const std::span<const int> sa(ia.data(), static_cast<std::size_t>(ka));
    for (std::int64_t rb = 0; rb < cb; ++rb) {
      const Scalar vb = b.coeffs()[rb];
      if (vb == Scalar(0)) continue;
      unrank_multi_index(rb, kb, std::span<int>(ib.data(), static_cast<std::size_t>(kb)));
      const std::span<const int> sb(ib.data(), static_cast<std::size_t>(kb));
      const int sign = shuffle_sign(sa, sb);
      if (sign == 0) continue;
      merge_multi_index(sa, sb, std::span<int>(im.data(), static_cast<std::size_t>(ka + kb)));
      out.coeffs()[rank_multi_index(
          std::span<const int>(im.data(), static_cast<std::size_t>(ka + kb)))] +=
          Scalar(sign) * va * vb;
    }
  }
  return out;
}

/// Interior product iota_v a; degree drops by one. Linear in both arguments.
template <class Scalar, class Derived>
NForm<Scalar> interior_product(const Eigen::MatrixBase<Derived>& v, const NForm<Scalar>& a) {
  CALIBRA_REQUIRE(v.size() == a.ambient_dim(), "interior_product: dimension mismatch");
  CALIBRA_REQUIRE(a.degree() >= 1, "interior_product: degree-0 input");
  const int d = a.ambient_dim(), k = a.degree();
  NForm<Scalar> out(d, k - 1);

  std::array<int, kBinomialMax> sub{};
  for_each_multi_index(d, k, [&](std::int64_t r, std::span<const int> I) {
    const Scalar c = a.coeffs()[r];
    if (c == Scalar(0)) return;
    for (int t = 0; t < k; ++t) {
      const Scalar vt = Scalar(v[I[t]]);
      if (vt == Scalar(0)) continue;
      int o = 0;
      for (int s = 0; s < k; ++s)
        if (s != t) sub[o++] = I[s];
      const Scalar sign = (t % 2 == 0) ? Scalar(1) : Scalar(-1);
      out.coeffs()[rank_multi_index(
          std::span<const int>(sub.data(), static_cast<std::size_t>(k - 1)))] += sign * vt * c;
    }
  });
  return out;
}

/// Hodge star on the R^n factor (the first n coordinates of R^d), with the
/// standard metric and orientation dx_0 ^ ... ^ dx_{n-1}. The input must be
/// supported on multi-indices inside {0..n-1}; the output lives in the same
/// ambient dimension. Applying it twice gives (-1)^{k(n-k)} times the
/// identity.
template <class Scalar>
NForm<Scalar> hodge_star_rn(const NForm<Scalar>& a, int n) {
  const int d = a.ambient_dim(), k = a.degree();
  CALIBRA_REQUIRE(n >= 0 && n <= d, "hodge_star_rn: invalid n");
  CALIBRA_REQUIRE(k <= n, "hodge_star_rn: degree exceeds n");
  NForm<Scalar> out(d, n - k);

  std::array<int, kBinomialMax> comp{};
  for_each_multi_index(d, k, [&](std::int64_t r, std::span<const int> I) {
    const Scalar c = a.coeffs()[r];
    if (c == Scalar(0)) return;
    CALIBRA_REQUIRE(k == 0 || I[k - 1] < n, "hodge_star_rn: support outside the R^n factor");
    int o = 0;
    {
      int t = 0;
      for (int v = 0; v < n; ++v) {
        if (t < k && I[t] == v) {
          ++t;
        } else {
          comp[o++] = v;
        }
      }
    }
    const std::span<const int> Ic(comp.data(), static_cast<std::size_t>(n - k));
    const int sign = shuffle_sign(I, Ic);
    out.coeffs()[rank_multi_index(Ic)] += Scalar(sign) * c;
  });
  return out;
}

/// Evaluate a k-form on a k-frame: sum_I coeff_I det(rows I of the columns).
/// Multilinear and alternating in the columns; the minors go through LU,
/// not Laplace expansion.
template <class Scalar>
Scalar evaluate(const NForm<Scalar>& a,
                const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& frame_columns) {
  const int d = a.ambient_dim(), k = a.degree();
  CALIBRA_REQUIRE(frame_columns.rows() == d, "evaluate: ambient dimension mismatch");
  CALIBRA_REQUIRE(frame_columns.cols() == k, "evaluate: frame count != degree");
  if (k == 0) return a.coeffs()[0];

  Scalar total(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> minor(k, k);
  for_each_multi_index(d, k, [&](std::int64_t r, std::span<const int> I) {
    const Scalar c = a.coeffs()[r];
    if (c == Scalar(0)) return;
    for (int t = 0; t < k; ++t) minor.row(t) = frame_columns.row(I[t]);
    total += c * minor.determinant();
  });
  return total;
}

template <class Scalar>
Scalar evaluate(const NForm<Scalar>& a, const Frame<Scalar>& fr) {
  return evaluate(a, fr.columns);
}

namespace detail {
/// Cofactor matrix C with C(t,q) = (-1)^{t+q} det(M with row t, col q removed),
/// so that d det(M) = sum_{t,q} C(t,q) dM(t,q).
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cofactor_matrix(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M) {
  const int k = static_cast<int>(M.rows());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> C(k, k);
  if (k == 1) {
    C(0, 0) = Scalar(1);
    return C;
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sub(k - 1, k - 1);
  for (int t = 0; t < k; ++t) {
    for (int q = 0; q < k; ++q) {
      int rr = 0;
      for (int i = 0; i < k; ++i) {
        if (i == t) continue;
        int cc = 0;
        for (int j = 0; j < k; ++j) {
          if (j == q) continue;
          sub(rr, cc++) = M(i, j);
        }
        ++rr;
      }
      const Scalar sign = ((t + q) % 2 == 0) ? Scalar(1) : Scalar(-1);
      C(t, q) = sign * sub.determinant();
    }
  }
  return C;
}
}  // namespace detail

/// Evaluate together with the gradient with respect to every frame entry
/// (exact, via cofactor expansions of the minors).
template <class Scalar>
Scalar evaluate_with_gradient(
    const NForm<Scalar>& a,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& frame_columns,
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& gradient) {
  const int d = a.ambient_dim(), k = a.degree();
  CALIBRA_REQUIRE(frame_columns.rows() == d && frame_columns.cols() == k,
                  "evaluate_with_gradient: shape mismatch");
  gradient.setZero(d, k);
  if (k == 0) return a.coeffs()[0];

  Scalar total(0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> minor(k, k);
  for_each_multi_index(d, k, [&](std::int64_t r, std::span<const int> I) {
    const Scalar c = a.coeffs()[r];
    if (c == Scalar(0)) return;
    for (int t = 0; t < k; ++t) minor.row(t) = frame_columns.row(I[t]);
    total += c * minor.determinant();
    const auto cof = detail::cofactor_matrix(minor);
    for (int t = 0; t < k; ++t) gradient.row(I[t]) += c * cof.row(t);
  });
  return total;
}

}  // namespace calibra
