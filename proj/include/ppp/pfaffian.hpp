#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ppp {

// Real antisymmetric matrix of even order, row-major.
class AntisymmetricMatrix {
public:
    // Antisymmetrizes `entries`; rejects odd order and asymmetry beyond 1e-12 relative.
    AntisymmetricMatrix(std::size_t dim, std::vector<double> entries);

    // Builds from the strict upper triangle, entry(i, j) for i < j.
    static AntisymmetricMatrix from_upper(std::size_t dim,
                                          const std::function<double(std::size_t, std::size_t)>& entry);

    std::size_t dim() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<double>& data() const { return a_; }

private:
    AntisymmetricMatrix() = default;
    std::size_t n_ = 0;
    std::vector<double> a_;
};

struct PfaffianResult {
    double value;
    bool degenerate;  // a pivot fell below 1e-14 * max|a_ij|
};

PfaffianResult pfaffian_checked(const AntisymmetricMatrix& a);
double pfaffian(const AntisymmetricMatrix& a);

}  // namespace ppp
