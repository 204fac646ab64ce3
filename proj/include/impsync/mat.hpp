#pragma once

// Dense row-major matrix over complex<double>. Real matrices are stored
// with zero imaginary parts; one scalar domain keeps every kernel single.

#include "impsync/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace impsync {

using cxd = std::complex<double>;

class Mat {
public:
    Mat() = default;

    /// rows x cols zero matrix.
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {
        if (rows == 0 || cols == 0)
            throw dimension_error("Mat: dimensions must be at least 1x1");
    }

    Mat(std::size_t rows, std::size_t cols, std::vector<cxd> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (rows == 0 || cols == 0)
            throw dimension_error("Mat: dimensions must be at least 1x1");
        if (a_.size() != rows * cols)
            throw dimension_error("Mat: entry count does not match rows*cols");
    }

    /// Row-major initializer, e.g. Mat::real(2, 2, {0, -1, 1, 0}).
    static Mat real(std::size_t rows, std::size_t cols, std::initializer_list<double> vals) {
        if (vals.size() != rows * cols)
            throw dimension_error("Mat::real: entry count does not match rows*cols");
        Mat m(rows, cols);
        std::size_t i = 0;
        for (double v : vals) m.a_[i++] = cxd(v, 0.0);
        return m;
    }

    static Mat real(std::size_t rows, std::size_t cols, const std::vector<double>& vals) {
        if (vals.size() != rows * cols)
            throw dimension_error("Mat::real: entry count does not match rows*cols");
        Mat m(rows, cols);
        for (std::size_t i = 0; i < vals.size(); ++i) m.a_[i] = cxd(vals[i], 0.0);
        return m;
    }

    static Mat complex(std::size_t rows, std::size_t cols, std::initializer_list<cxd> vals) {
        if (vals.size() != rows * cols)
            throw dimension_error("Mat::complex: entry count does not match rows*cols");
        Mat m(rows, cols);
        std::size_t i = 0;
        for (cxd v : vals) m.a_[i++] = v;
        return m;
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }

    /// Column vector from real data.
    static Mat col(const std::vector<double>& vals) { return real(vals.size(), 1, vals); }

    /// Row vector from real data.
    static Mat row(const std::vector<double>& vals) { return real(1, vals.size(), vals); }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool empty() const { return a_.empty(); }
    [[nodiscard]] bool square() const { return rows_ == cols_ && rows_ > 0; }

    cxd& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    cxd operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    [[nodiscard]] const std::vector<cxd>& data() const { return a_; }

    [[nodiscard]] Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    /// Conjugate transpose.
    [[nodiscard]] Mat adjoint() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
        return t;
    }

    [[nodiscard]] Mat block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
        if (i0 + r > rows_ || j0 + c > cols_)
            throw dimension_error("Mat::block: out of range");
        Mat b(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
        return b;
    }

    [[nodiscard]] Mat row_at(std::size_t i) const { return block(i, 0, 1, cols_); }
    [[nodiscard]] Mat col_at(std::size_t j) const { return block(0, j, rows_, 1); }

    void set_block(std::size_t i0, std::size_t j0, const Mat& b) {
        if (i0 + b.rows_ > rows_ || j0 + b.cols_ > cols_)
            throw dimension_error("Mat::set_block: out of range");
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    Mat& operator+=(const Mat& o) {
        check_same_shape(o, "+");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }

    Mat& operator-=(const Mat& o) {
        check_same_shape(o, "-");
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }

    Mat& operator*=(cxd s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, cxd s) { return a *= s; }
    friend Mat operator*(cxd s, Mat a) { return a *= s; }
    friend Mat operator*(Mat a, double s) { return a *= cxd(s, 0.0); }
    friend Mat operator*(double s, Mat a) { return a *= cxd(s, 0.0); }
    friend Mat operator-(Mat a) { return a *= cxd(-1.0, 0.0); }

    /// Matrix product.
    friend Mat operator*(const Mat& a, const Mat& b) { return matmul(a, b); }

    friend Mat matmul(const Mat& a, const Mat& b) {
        if (a.cols_ != b.rows_)
            throw dimension_error("matmul: inner dimensions disagree");
        Mat c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cxd aik = a(i, k);
                if (aik == cxd{}) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    /// Kronecker product; block (i,j) equals a(i,j) * b.
    friend Mat kron(const Mat& a, const Mat& b) {
        Mat c(a.rows_ * b.rows_, a.cols_ * b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) {
                const cxd aij = a(i, j);
                for (std::size_t p = 0; p < b.rows_; ++p)
                    for (std::size_t q = 0; q < b.cols_; ++q)
                        c(i * b.rows_ + p, j * b.cols_ + q) = aij * b(p, q);
            }
        return c;
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Induced 1-norm (max absolute column sum).
    [[nodiscard]] double one_norm() const {
        double m = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    [[nodiscard]] double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }

    [[nodiscard]] double max_imag() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v.imag()));
        return m;
    }

    /// True when every imaginary part is at most tol in magnitude.
    [[nodiscard]] bool is_real(double tol = 0.0) const { return max_imag() <= tol; }

    /// Real parts in row-major order.
    [[nodiscard]] std::vector<double> real_data() const {
        std::vector<double> r(a_.size());
        for (std::size_t i = 0; i < a_.size(); ++i) r[i] = a_[i].real();
        return r;
    }

    [[nodiscard]] std::string to_string(int precision = 6) const {
        std::ostringstream os;
        os.precision(precision);
        for (std::size_t i = 0; i < rows_; ++i) {
            os << (i == 0 ? "[" : " ");
            for (std::size_t j = 0; j < cols_; ++j) {
                const cxd v = (*this)(i, j);
                if (v.imag() == 0.0)
                    os << v.real();
                else
                    os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
                if (j + 1 < cols_) os << ", ";
            }
            os << (i + 1 < rows_ ? ";\n" : "]");
        }
        return os.str();
    }

private:
    void check_same_shape(const Mat& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw dimension_error(std::string("Mat: shape mismatch in operator") + op);
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cxd> a_;
};

/// Largest entrywise |a - b|.
inline double max_abs_diff(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw dimension_error("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

/// a^p by repeated multiplication (p >= 0).
inline Mat mat_pow(const Mat& a, std::size_t p) {
    if (!a.square()) throw dimension_error("mat_pow: matrix must be square");
    Mat r = Mat::identity(a.rows());
    for (std::size_t k = 0; k < p; ++k) r = r * a;
    return r;
}

} // namespace impsync
