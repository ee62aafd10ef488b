#include "ppp/pfaffian.hpp"

#include "ppp/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ppp {

AntisymmetricMatrix::AntisymmetricMatrix(std::size_t dim, std::vector<double> entries)
    : n_(dim), a_(std::move(entries)) {
    if (n_ == 0 || n_ % 2 != 0) throw ContractViolation("antisymmetric matrix needs even positive order");
    if (a_.size() != n_ * n_) throw ContractViolation("antisymmetric matrix: entry count mismatch");
    double scale = 0;
    for (double v : a_) scale = std::max(scale, std::abs(v));
    double tol = 1e-12 * std::max(scale, 1.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i; j < n_; ++j) {
            double u = a_[i * n_ + j], l = a_[j * n_ + i];
            if (std::abs(u + l) > tol) throw ContractViolation("matrix is not antisymmetric");
            double m = 0.5 * (u - l);
            a_[i * n_ + j] = m;
            a_[j * n_ + i] = -m;
        }
    }
}

AntisymmetricMatrix AntisymmetricMatrix::from_upper(
    std::size_t dim, const std::function<double(std::size_t, std::size_t)>& entry) {
    if (dim == 0 || dim % 2 != 0) throw ContractViolation("antisymmetric matrix needs even positive order");
    AntisymmetricMatrix m;
    m.n_ = dim;
    m.a_.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i + 1; j < dim; ++j) {
            double v = entry(i, j);
            m.a_[i * dim + j] = v;
            m.a_[j * dim + i] = -v;
        }
    }
    return m;
}

// Parlett-Reid reduction to tridiagonal form (L T L^T), pivoting on the
// largest entry of each column; every interchange flips the sign.
PfaffianResult pfaffian_checked(const AntisymmetricMatrix& m) {
    const std::size_t n = m.dim();
    std::vector<double> a = m.data();
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

    double scale = 0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0) return {0.0, true};
    const double tiny = 1e-14 * scale;

    double pf = 1.0;
    std::vector<double> tau(n);
    for (std::size_t k = 0; k + 1 < n; k += 2) {
        std::size_t kp = k + 1;
        double best = std::abs(at(k + 1, k));
        for (std::size_t i = k + 2; i < n; ++i) {
            if (std::abs(at(i, k)) > best) {
                best = std::abs(at(i, k));
                kp = i;
            }
        }
        if (kp != k + 1) {
            for (std::size_t j = 0; j < n; ++j) std::swap(at(k + 1, j), at(kp, j));
            for (std::size_t i = 0; i < n; ++i) std::swap(at(i, k + 1), at(i, kp));
            pf = -pf;
        }
        if (best < tiny) return {0.0, true};

        double piv = at(k, k + 1);
        pf *= piv;
        if (k + 2 < n) {
            for (std::size_t i = k + 2; i < n; ++i) tau[i] = at(k, i) / piv;
            for (std::size_t i = k + 2; i < n; ++i) {
                double ci = at(i, k + 1);
                for (std::size_t j = k + 2; j < n; ++j)
                    at(i, j) += tau[i] * at(j, k + 1) - ci * tau[j];
            }
        }
    }
    return {pf, false};
}

double pfaffian(const AntisymmetricMatrix& a) {
    return pfaffian_checked(a).value;
}

}  // namespace ppp
