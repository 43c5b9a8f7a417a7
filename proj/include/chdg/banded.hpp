// banded.hpp -- general banded LU with partial pivoting (LAPACK gbtrf-style
// storage). Backs the Newton linear solves; exact and deterministic.

#ifndef CHDG_BANDED_HPP
#define CHDG_BANDED_HPP

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "chdg/errors.hpp"

namespace chdg {

class BandMatrix {
 public:
  BandMatrix(long n, int kl, int ku)
      : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(static_cast<size_t>(ldab_) * n, 0.0), ipiv_(n, 0) {}

  long rows() const { return n_; }
  int lower_bandwidth() const { return kl_; }
  int upper_bandwidth() const { return ku_; }

  // entry (i, j); valid for j - ku <= i <= j + kl
  double& operator()(long i, long j) {
    check_band(i, j);
    return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
  }
  double at(long i, long j) const {
    check_band(i, j);
    return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
  }

  void add(long i, long j, double v) { (*this)(i, j) += v; }

  void reset() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    factored_ = false;
  }

  // in-place LU with row partial pivoting; fill-in lives in the extra kl rows
  void factor() {
    for (long j = 0; j < n_; ++j) {
      const long pivot_last = std::min(j + kl_, n_ - 1);
      long p = j;
      double pmax = std::abs(entry(j, j));
      for (long i = j + 1; i <= pivot_last; ++i) {
        const double v = std::abs(entry(i, j));
        if (v > pmax) {
          pmax = v;
          p = i;
        }
      }
      if (pmax == 0.0)
        throw SolverError("banded LU: singular matrix at column " + std::to_string(j), 0.0,
                          static_cast<int>(j));
      ipiv_[j] = p;
      const long swap_last = std::min(j + kl_ + ku_, n_ - 1);
      if (p != j)
        for (long c = j; c <= swap_last; ++c) std::swap(entry(j, c), entry(p, c));
      const double diag = entry(j, j);
      for (long i = j + 1; i <= pivot_last; ++i) {
        const double m = entry(i, j) / diag;
        entry(i, j) = m;
        if (m != 0.0)
          for (long c = j + 1; c <= swap_last; ++c) entry(i, c) -= m * entry(j, c);
      }
    }
    factored_ = true;
  }

  void solve(std::vector<double>& b) const {
    if (!factored_) throw std::logic_error("banded LU: solve before factor");
    for (long j = 0; j < n_ - 1; ++j) {
      if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
      const long last = std::min(j + kl_, n_ - 1);
      for (long i = j + 1; i <= last; ++i) b[i] -= entry_c(i, j) * b[j];
    }
    for (long j = n_ - 1; j >= 0; --j) {
      const long last = std::min(j + kl_ + ku_, n_ - 1);
      for (long c = j + 1; c <= last; ++c) b[j] -= entry_c(j, c) * b[c];
      b[j] /= entry_c(j, j);
    }
  }

 private:
  void check_band(long i, long j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_ + kl_)
      throw std::out_of_range("banded matrix: entry outside band");
  }
  // during/after factorization the upper bandwidth grows to kl+ku
  double& entry(long i, long j) { return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)]; }
  double entry_c(long i, long j) const {
    return ab_[static_cast<size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
  }

  long n_;
  int kl_, ku_, ldab_;
  std::vector<double> ab_;
  std::vector<long> ipiv_;
  bool factored_ = false;
};

}  // namespace chdg

#endif
