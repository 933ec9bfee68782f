#include "fbls/matrix.hpp"

#include <cmath>
#include <string>

namespace fbls {

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Matrix::require_finite(const char* what) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            if (!std::isfinite((*this)(i, j))) {
                throw DataError(std::string(what) + ": non-finite value at (" +
                                std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* src = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = src[j];
        }
    }
    return t;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.rows() != b.rows()) {
        throw DimensionError("hcat: row counts differ (" + std::to_string(a.rows()) +
                             " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* dst = out.row(i);
        const double* ra = a.row(i);
        const double* rb = b.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = ra[j];
        for (std::size_t j = 0; j < b.cols(); ++j) dst[a.cols() + j] = rb[j];
    }
    return out;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double v = std::fabs(a.data()[i]);
        if (v > m) m = v;
    }
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double v = std::fabs(a.data()[i] - b.data()[i]);
        if (v > m) m = v;
    }
    return m;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a.data()[i] * a.data()[i];
    }
    return std::sqrt(s);
}

} // namespace fbls
