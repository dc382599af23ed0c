#ifndef PBC_MATRIX_HPP
#define PBC_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace pbc {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    void set_row(std::size_t r, std::span<const double> v) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = v[c];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// New matrix made of the selected rows, in the given order.
    Mat take_rows(const std::vector<std::size_t>& idx) const {
        Mat out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) out.set_row(i, row(idx[i]));
        return out;
    }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// y = A x for a square or rectangular A.
Vec mat_vec(const Mat& a, std::span<const double> x);

/// Mean of the rows; empty matrix gives a zero vector of the column count.
Vec row_mean(const Mat& a);

/// Eigendecomposition of a symmetric matrix: values ascending, vectors in
/// the corresponding columns.
struct SymEigen {
    Vec values;
    Mat vectors;
    int sweeps = 0;
};

/// Cyclic Jacobi iteration. Deterministic; intended for the small symmetric
/// matrices that arise from scatter and second-moment computations.
SymEigen jacobi_eigensystem(Mat a, double tol = 1e-12, int max_sweeps = 128);

}  // namespace pbc

#endif  // PBC_MATRIX_HPP
