#pragma once

#include <cstddef>
#include <vector>

namespace dropletfem {

/// General banded matrix in LAPACK band storage (column-major, with the
/// extra kl fill-in rows dgbtrf needs). Entry (i, j) is admissible when
/// j - i <= ku and i - j <= kl.
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

    std::size_t size() const { return n_; }
    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }

    void add(std::size_t i, std::size_t j, double value);
    void set(std::size_t i, std::size_t j, double value);
    double at(std::size_t i, std::size_t j) const;  // 0 outside the band

    /// Zeros every in-band entry of row i.
    void clear_row(std::size_t i);

    /// y = A x.
    std::vector<double> multiply(const std::vector<double>& x) const;

    /// Solves A x = rhs by banded LU with partial pivoting (dgbsv) on a copy.
    /// Throws SingularMatrix on an exactly singular pivot.
    std::vector<double> solve(const std::vector<double>& rhs) const;

    /// Reciprocal condition number estimate in the 1-norm (dgbtrf + dgbcon);
    /// returns 0 for an exactly singular factorization.
    double rcond() const;

private:
    std::size_t index(std::size_t i, std::size_t j) const;
    bool in_band(std::size_t i, std::size_t j) const;

    std::size_t n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
};

}  // namespace dropletfem
