#include "dropletfem/banded.hpp"

#include <lapacke.h>

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dropletfem/errors.hpp"

namespace dropletfem {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(ldab_ * n, 0.0) {
    if (n == 0) throw std::invalid_argument("BandedMatrix: n must be positive");
}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const {
    return i < n_ && j < n_ && (j <= i + ku_) && (i <= j + kl_);
}

std::size_t BandedMatrix::index(std::size_t i, std::size_t j) const {
    // Row kl+ku+i-j of column j in the padded band storage.
    return j * ldab_ + (kl_ + ku_ + i - j);
}

void BandedMatrix::add(std::size_t i, std::size_t j, double value) {
    assert(in_band(i, j));
    ab_[index(i, j)] += value;
}

void BandedMatrix::set(std::size_t i, std::size_t j, double value) {
    assert(in_band(i, j));
    ab_[index(i, j)] = value;
}

double BandedMatrix::at(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? ab_[index(i, j)] : 0.0;
}

void BandedMatrix::clear_row(std::size_t i) {
    // Row i holds columns j with i - j <= kl and j - i <= ku.
    const std::size_t j_lo = (i >= kl_) ? i - kl_ : 0;
    const std::size_t j_hi = std::min(n_ - 1, i + ku_);
    for (std::size_t j = j_lo; j <= j_hi; ++j) ab_[index(i, j)] = 0.0;
}

std::vector<double> BandedMatrix::multiply(const std::vector<double>& x) const {
    assert(x.size() == n_);
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j_lo = (i >= kl_) ? i - kl_ : 0;
        const std::size_t j_hi = std::min(n_ - 1, i + ku_);
        double acc = 0.0;
        for (std::size_t j = j_lo; j <= j_hi; ++j) acc += ab_[index(i, j)] * x[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> BandedMatrix::solve(const std::vector<double>& rhs) const {
    assert(rhs.size() == n_);
    std::vector<double> ab = ab_;
    std::vector<double> x = rhs;
    std::vector<lapack_int> ipiv(n_);
    const lapack_int info = LAPACKE_dgbsv(
        LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), static_cast<lapack_int>(kl_),
        static_cast<lapack_int>(ku_), 1, ab.data(), static_cast<lapack_int>(ldab_),
        ipiv.data(), x.data(), static_cast<lapack_int>(n_));
    if (info > 0)
        throw SingularMatrix("banded solve: zero pivot at row " + std::to_string(info - 1));
    if (info < 0)
        throw std::invalid_argument("banded solve: bad argument " + std::to_string(-info));
    return x;
}

double BandedMatrix::rcond() const {
    // 1-norm of A from the unfactored band.
    double anorm = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        double col = 0.0;
        const std::size_t i_lo = (j >= ku_) ? j - ku_ : 0;
        const std::size_t i_hi = std::min(n_ - 1, j + kl_);
        for (std::size_t i = i_lo; i <= i_hi; ++i) col += std::abs(ab_[index(i, j)]);
        anorm = std::max(anorm, col);
    }
    std::vector<double> ab = ab_;
    std::vector<lapack_int> ipiv(n_);
    lapack_int info = LAPACKE_dgbtrf(
        LAPACK_COL_MAJOR, static_cast<lapack_int>(n_), static_cast<lapack_int>(n_),
        static_cast<lapack_int>(kl_), static_cast<lapack_int>(ku_), ab.data(),
        static_cast<lapack_int>(ldab_), ipiv.data());
    if (info > 0) return 0.0;
    double rc = 0.0;
    info = LAPACKE_dgbcon(LAPACK_COL_MAJOR, '1', static_cast<lapack_int>(n_),
                          static_cast<lapack_int>(kl_), static_cast<lapack_int>(ku_),
                          ab.data(), static_cast<lapack_int>(ldab_), ipiv.data(), anorm, &rc);
    if (info != 0) throw std::runtime_error("banded rcond: dgbcon failed");
    return rc;
}

}  // namespace dropletfem
