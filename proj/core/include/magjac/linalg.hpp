#ifndef MAGJAC_LINALG_HPP
#define MAGJAC_LINALG_HPP

#include <Eigen/Dense>
#include <cassert>
#include <vector>

namespace magjac {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense 3-index array with runtime extents, row-major flat storage.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int n0, int n1, int n2) : n0_(n0), n1_(n1), n2_(n2), data_(std::size_t(n0) * n1 * n2, 0.0) {}

    double& operator()(int i, int j, int k) { return data_[idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[idx(i, j, k)]; }

    int extent(int d) const { return d == 0 ? n0_ : d == 1 ? n1_ : n2_; }
    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t idx(int i, int j, int k) const {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_ && k >= 0 && k < n2_);
        return (std::size_t(i) * n1_ + j) * n2_ + k;
    }
    int n0_ = 0, n1_ = 0, n2_ = 0;
    std::vector<double> data_;
};

/// Dense 4-index array with runtime extents.
class Tensor4 {
public:
    Tensor4() = default;
    Tensor4(int n0, int n1, int n2, int n3)
        : n0_(n0), n1_(n1), n2_(n2), n3_(n3), data_(std::size_t(n0) * n1 * n2 * n3, 0.0) {}

    double& operator()(int i, int j, int k, int l) { return data_[idx(i, j, k, l)]; }
    double operator()(int i, int j, int k, int l) const { return data_[idx(i, j, k, l)]; }

    int extent(int d) const { return d == 0 ? n0_ : d == 1 ? n1_ : d == 2 ? n2_ : n3_; }
    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t idx(int i, int j, int k, int l) const {
        assert(i >= 0 && i < n0_ && j >= 0 && j < n1_ && k >= 0 && k < n2_ && l >= 0 && l < n3_);
        return ((std::size_t(i) * n1_ + j) * n2_ + k) * n3_ + l;
    }
    int n0_ = 0, n1_ = 0, n2_ = 0, n3_ = 0;
    std::vector<double> data_;
};

} // namespace magjac

#endif
