#pragma once

// Direct solver for shift*I - M where M is the two-species operator: 2x2 blocks
// (u_i, v_i) on a (possibly periodic) chain, with diagonal neighbour blocks.
// shift*I - M is a nonsingular M-matrix once shift exceeds the Perron root, so
// block elimination without pivoting is safe.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "frontlab/error.hpp"

namespace frontlab::detail {

struct Block {
  double a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]
};

inline Block inverse(const Block& m) {
  const double det = m.a * m.d - m.b * m.c;
  if (det == 0.0 || !std::isfinite(det)) {
    throw NumericalError("block solver: singular pivot block");
  }
  return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

/// Chain of n blocks. Row i reads
///   -west[s][i] * w_s[i-1] + (shift - diag[s][i]) * w_s[i] - east[s][i] * w_s[i+1]
///   - coupling[s][i] * w_other[i]
/// with wrap-around neighbours when periodic.
class BlockTridiagonal {
 public:
  BlockTridiagonal(std::array<const std::vector<double>*, 2> west,
                   std::array<const std::vector<double>*, 2> east,
                   std::array<const std::vector<double>*, 2> diag,
                   std::array<const std::vector<double>*, 2> coupling, bool periodic, double shift)
      : n_(diag[0]->size()), periodic_(periodic) {
    const auto& wu = *west[0];
    const auto& wv = *west[1];
    const auto& eu = *east[0];
    const auto& ev = *east[1];
    // Forward elimination: G_i = B_i - W_i G_{i-1}^{-1} E_{i-1}, with W, E diagonal.
    ginv_.resize(n_);
    lower_u_.resize(n_);
    lower_v_.resize(n_);
    upper_u_.resize(n_);
    upper_v_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      Block g{shift - (*diag[0])[i], -(*coupling[0])[i], -(*coupling[1])[i], shift - (*diag[1])[i]};
      // A_i = -W_i (left neighbour), C_i = -E_i (right neighbour).
      lower_u_[i] = -wu[i];
      lower_v_[i] = -wv[i];
      upper_u_[i] = -eu[i];
      upper_v_[i] = -ev[i];
      if (i > 0) {
        const Block& p = ginv_[i - 1];
        // A_i * P * C_{i-1}, all three with A, C diagonal.
        const double au = lower_u_[i], av = lower_v_[i];
        const double cu = upper_u_[i - 1], cv = upper_v_[i - 1];
        g.a -= au * p.a * cu;
        g.b -= au * p.b * cv;
        g.c -= av * p.c * cu;
        g.d -= av * p.d * cv;
      }
      ginv_[i] = inverse(g);
    }
    if (periodic_) {
      // Corner entries as a rank-4 correction: rows (u0, v0, u_{n-1}, v_{n-1}).
      rows_ = {0, 1, 2 * (n_ - 1), 2 * (n_ - 1) + 1};
      cols_ = {2 * (n_ - 1), 2 * (n_ - 1) + 1, 0, 1};
      gains_ = {-wu[0], -wv[0], -eu[n_ - 1], -ev[n_ - 1]};
      for (int k = 0; k < 4; ++k) {
        std::vector<double> e(2 * n_, 0.0);
        e[rows_[k]] = 1.0;
        z_[k] = solve_chain(std::move(e));
      }
      // H = I + G * V^T Z.
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          h_[r][c] = (r == c ? 1.0 : 0.0) + gains_[r] * z_[c][cols_[r]];
        }
      }
      factor_h();
    }
  }

  /// Solves (shift*I - M) x = rhs, rhs in species-major layout (u block, then v block).
  std::vector<double> solve(const std::vector<double>& rhs) const {
    std::vector<double> y(2 * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      y[2 * i] = rhs[i];
      y[2 * i + 1] = rhs[n_ + i];
    }
    y = solve_chain(std::move(y));
    if (periodic_) {
      std::array<double, 4> t{};
      for (int r = 0; r < 4; ++r) t[r] = gains_[r] * y[cols_[r]];
      solve_h(t);
      for (int k = 0; k < 4; ++k) {
        if (t[k] == 0.0) continue;
        for (std::size_t j = 0; j < 2 * n_; ++j) y[j] -= t[k] * z_[k][j];
      }
    }
    std::vector<double> out(2 * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = y[2 * i];
      out[n_ + i] = y[2 * i + 1];
    }
    return out;
  }

 private:
  // Non-periodic block Thomas on the interleaved layout.
  std::vector<double> solve_chain(std::vector<double> y) const {
    // Forward: y_i <- y_i - A_i G_{i-1}^{-1} y_{i-1}.
    for (std::size_t i = 1; i < n_; ++i) {
      const Block& p = ginv_[i - 1];
      const double qu = p.a * y[2 * i - 2] + p.b * y[2 * i - 1];
      const double qv = p.c * y[2 * i - 2] + p.d * y[2 * i - 1];
      y[2 * i] -= lower_u_[i] * qu;
      y[2 * i + 1] -= lower_v_[i] * qv;
    }
    // Backward: x_i = G_i^{-1} (y_i - C_i x_{i+1}).
    for (std::size_t i = n_; i-- > 0;) {
      double ru = y[2 * i], rv = y[2 * i + 1];
      if (i + 1 < n_) {
        ru -= upper_u_[i] * y[2 * i + 2];
        rv -= upper_v_[i] * y[2 * i + 3];
      }
      const Block& p = ginv_[i];
      y[2 * i] = p.a * ru + p.b * rv;
      y[2 * i + 1] = p.c * ru + p.d * rv;
    }
    return y;
  }

  void factor_h() {
    for (int k = 0; k < 4; ++k) perm_[k] = k;
    for (int k = 0; k < 4; ++k) {
      int best = k;
      for (int r = k + 1; r < 4; ++r) {
        if (std::abs(h_[r][k]) > std::abs(h_[best][k])) best = r;
      }
      if (h_[best][k] == 0.0) throw NumericalError("block solver: singular wrap-around correction");
      std::swap(h_[k], h_[best]);
      std::swap(perm_[k], perm_[best]);
      for (int r = k + 1; r < 4; ++r) {
        h_[r][k] /= h_[k][k];
        for (int c = k + 1; c < 4; ++c) h_[r][c] -= h_[r][k] * h_[k][c];
      }
    }
  }

  void solve_h(std::array<double, 4>& t) const {
    std::array<double, 4> b{};
    for (int k = 0; k < 4; ++k) b[k] = t[perm_[k]];
    for (int r = 1; r < 4; ++r) {
      for (int c = 0; c < r; ++c) b[r] -= h_[r][c] * b[c];
    }
    for (int r = 3; r >= 0; --r) {
      for (int c = r + 1; c < 4; ++c) b[r] -= h_[r][c] * b[c];
      b[r] /= h_[r][r];
    }
    t = b;
  }

  std::size_t n_;
  bool periodic_;
  std::vector<Block> ginv_;
  std::vector<double> lower_u_, lower_v_, upper_u_, upper_v_;
  std::array<std::size_t, 4> rows_{}, cols_{};
  std::array<double, 4> gains_{};
  std::array<std::vector<double>, 4> z_;
  std::array<std::array<double, 4>, 4> h_{};
  std::array<int, 4> perm_{};
};

}  // namespace frontlab::detail
