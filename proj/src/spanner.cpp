#include "csg/spanner.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace csg {

namespace {

Eigen::VectorXd to_vec(const std::vector<int>& bits) {
  Eigen::VectorXd v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v(i) = bits[i];
  return v;
}

// Squared r-volume of the parallelepiped spanned by the rows of B.
double gram_det(const Eigen::MatrixXd& B) {
  return (B * B.transpose()).determinant();
}

template <typename F>
void for_each_subset(int n, int k, F&& fn) {
  if (k > n || k == 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

Spanner::Spanner(std::vector<IndicatorEntry> elements, int rank,
                 bool exhaustive)
    : elements_(std::move(elements)), rank_(rank), exhaustive_(exhaustive) {
  if (rank_ == 0) return;
  const int K = static_cast<int>(elements_.front().bits.size());
  Eigen::MatrixXd B(rank_, K);
  for (int i = 0; i < rank_; ++i) B.row(i) = to_vec(elements_[i].bits);
  Eigen::MatrixXd Ginv = (B * B.transpose()).inverse();
  basis_.assign(rank_, std::vector<double>(K));
  gram_inv_.assign(rank_, std::vector<double>(rank_));
  for (int i = 0; i < rank_; ++i) {
    for (int j = 0; j < K; ++j) basis_[i][j] = B(i, j);
    for (int j = 0; j < rank_; ++j) gram_inv_[i][j] = Ginv(i, j);
  }
}

std::vector<double> Spanner::coefficients(const std::vector<int>& bits) const {
  const int K = static_cast<int>(bits.size());
  if (rank_ == 0) {
    for (int b : bits)
      if (b != 0)
        throw std::runtime_error("spanner: nonzero vector with rank-0 spanner");
    return {};
  }
  // lambda = Ginv * B * w  (least squares in the spanned subspace).
  std::vector<double> bw(rank_, 0.0);
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < K; ++j) bw[i] += basis_[i][j] * bits[j];
  std::vector<double> lam(rank_, 0.0);
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) lam[i] += gram_inv_[i][j] * bw[j];
  for (int j = 0; j < K; ++j) {
    double recon = 0.0;
    for (int i = 0; i < rank_; ++i) recon += lam[i] * basis_[i][j];
    if (std::abs(recon - bits[j]) > 1e-6)
      throw std::runtime_error("spanner: vector outside spanned subspace");
  }
  return lam;
}

Spanner barycentric_spanner(const std::vector<IndicatorEntry>& W,
                            int cap_exhaustive) {
  if (W.empty()) throw std::invalid_argument("barycentric_spanner: empty W");
  const int n = static_cast<int>(W.size());
  const int K = static_cast<int>(W.front().bits.size());
  Eigen::MatrixXd all(n, K);
  for (int i = 0; i < n; ++i) all.row(i) = to_vec(W[i].bits);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(all);
  lu.setThreshold(1e-9);
  const int r = static_cast<int>(lu.rank());
  if (r == 0) return Spanner({}, 0, true);

  auto subset_matrix = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd B(static_cast<int>(idx.size()), K);
    for (std::size_t i = 0; i < idx.size(); ++i) B.row(i) = all.row(idx[i]);
    return B;
  };

  std::vector<int> best;
  if (n <= cap_exhaustive) {
    double best_det = -1.0;
    for_each_subset(n, r, [&](const std::vector<int>& idx) {
      double d = std::abs(gram_det(subset_matrix(idx)));
      if (d > best_det + 1e-12) {
        best_det = d;
        best = idx;
      }
    });
    std::vector<IndicatorEntry> elems;
    for (int i : best) elems.push_back(W[i]);
    return Spanner(std::move(elems), r, true);
  }

  // Awerbuch-Kleinberg iterative swap: start from any independent subset,
  // then swap in any element improving |det| by more than the target factor.
  const double kSwapFactor = 1.0 + 1e-6;
  for (int i = 0; i < n && static_cast<int>(best.size()) < r; ++i) {
    best.push_back(i);
    Eigen::MatrixXd B = subset_matrix(best);
    Eigen::FullPivLU<Eigen::MatrixXd> sub(B);
    sub.setThreshold(1e-9);
    if (static_cast<int>(sub.rank()) < static_cast<int>(best.size()))
      best.pop_back();
  }
  double cur = std::abs(gram_det(subset_matrix(best)));
  bool improved = true;
  while (improved) {
    improved = false;
    for (int slot = 0; slot < r && !improved; ++slot) {
      for (int cand = 0; cand < n && !improved; ++cand) {
        std::vector<int> trial = best;
        trial[slot] = cand;
        double d = std::abs(gram_det(subset_matrix(trial)));
        if (d > cur * kSwapFactor * kSwapFactor) {
          best = trial;
          cur = d;
          improved = true;
        }
      }
    }
  }
  std::vector<IndicatorEntry> elems;
  for (int i : best) elems.push_back(W[i]);
  return Spanner(std::move(elems), r, false);
}

}  // namespace csg
