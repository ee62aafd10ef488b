#include "ppp/ensembles.hpp"

#include "ppp/error.hpp"
#include "ppp/io.hpp"
#include "ppp/occupation.hpp"
#include "ppp/quad.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace ppp {

Philox4x32::Philox4x32(std::uint64_t key, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)}, stream_(stream) {}

Philox4x32::Block Philox4x32::bijection(Block c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u, W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        if (r) {
            k[0] += W0;
            k[1] += W1;
        }
        std::uint64_t p0 = std::uint64_t(M0) * c[0], p1 = std::uint64_t(M1) * c[2];
        std::uint32_t hi0 = p0 >> 32, lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t hi1 = p1 >> 32, lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

Philox4x32::result_type Philox4x32::operator()() {
    if (used_ == 4) {
        Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        buf_ = bijection(ctr, key_);
        ++block_;
        used_ = 0;
    }
    return buf_[used_++];
}

void EnsembleSpec::validate() const {
    if (beta != 1 && beta != 2 && beta != 4) throw ContractViolation("beta must be 1, 2 or 4");
    if (N < 1) throw ContractViolation("N must be at least 1");
    if (weight == Weight::Laguerre && !(a > -1)) throw ContractViolation("Laguerre exponent must exceed -1");
}

namespace {

double chi(Philox4x32& g, double dof) {
    std::gamma_distribution<double> gam(dof / 2, 2.0);
    return std::sqrt(gam(g));
}

Configuration tridiagonal_eigenvalues(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
    if (d.size() == 1) return {d[0]};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ResourceError("tridiagonal eigensolver did not converge");
    Configuration out(es.eigenvalues().data(), es.eigenvalues().data() + d.size());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

namespace {

// Symmetric tridiagonal model of one sample; eigenvalues times `scale` are the points.
struct Tridiagonal {
    Eigen::VectorXd d, e;
    double scale = 1;
};

Tridiagonal tridiagonal_model(const EnsembleSpec& spec, std::uint64_t index) {
    Philox4x32 g(spec.seed, index);
    const int N = spec.N;
    const double beta = spec.beta;
    Tridiagonal t;
    t.d.resize(N);
    t.e.resize(N - 1);
    if (spec.weight == Weight::Hermite) {
        std::normal_distribution<double> normal(0.0, 1.0);
        // (1/sqrt 2) tridiag(N(0, 2), chi_{beta (N - i)}) has density exp(-x^2/2) |Delta|^beta.
        for (int i = 0; i < N; ++i) t.d[i] = normal(g);
        for (int i = 0; i + 1 < N; ++i) t.e[i] = chi(g, beta * (N - 1 - i)) / std::sqrt(2.0);
        return t;
    }
    // B B^T with B lower bidiagonal: diag chi_{2c - beta i}, subdiag chi_{beta (N - 1 - i)};
    // eigenvalues have density lambda^{c - 1 - beta (N - 1)/2} e^{-lambda/2} |Delta|^beta.
    double c = spec.a + 1 + beta * (N - 1) / 2.0;
    Eigen::VectorXd bd(N), be(std::max(N - 1, 0));
    for (int i = 0; i < N; ++i) bd[i] = chi(g, 2 * c - beta * i);
    for (int i = 0; i + 1 < N; ++i) be[i] = chi(g, beta * (N - 1 - i));
    for (int i = 0; i < N; ++i) t.d[i] = bd[i] * bd[i] + (i ? be[i - 1] * be[i - 1] : 0.0);
    for (int i = 0; i + 1 < N; ++i) t.e[i] = be[i] * bd[i];
    // lambda = beta x turns e^{-lambda/2} into e^{-beta x/2}.
    t.scale = 1 / beta;
    return t;
}

// Number of eigenvalues below s (Sturm sequence of the LDL^T pivots).
int eigen_count_below(const Tridiagonal& t, double s) {
    int n = 0;
    double q = 1;
    for (Eigen::Index i = 0; i < t.d.size(); ++i) {
        double off = i ? t.e[i - 1] * t.e[i - 1] : 0.0;
        q = t.d[i] - s - (i ? off / q : 0.0);
        if (q == 0) q = -1e-300;
        if (q < 0) ++n;
    }
    return n;
}

}  // namespace

Configuration sample(const EnsembleSpec& spec, std::uint64_t index) {
    spec.validate();
    auto t = tridiagonal_model(spec, index);
    auto ev = tridiagonal_eigenvalues(t.d, t.e);
    for (double& x : ev) x *= t.scale;
    return ev;
}

std::vector<Configuration> sample_batch(const EnsembleSpec& spec, std::size_t count, Exec exec) {
    spec.validate();
    std::vector<Configuration> out(count);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) out[i] = sample(spec, i);
    } else {
        for (std::size_t i = 0; i < count; ++i) out[i] = sample(spec, i);
    }
    return out;
}

Configuration rescale(const Configuration& pts, const RescaleMode& mode) {
    Configuration out = pts;
    switch (mode.kind) {
    case RescaleMode::Kind::Identity:
        break;
    case RescaleMode::Kind::Bulk:
        if (!(mode.density > 0)) throw ContractViolation("bulk rescale needs a positive density");
        for (double& x : out) x = (x - mode.center) * mode.density;
        break;
    case RescaleMode::Kind::HardEdge:
        if (mode.N < 1) throw ContractViolation("hard-edge rescale needs N >= 1");
        for (double& x : out) x *= 4.0 * mode.N;
        break;
    }
    return out;
}

double hermite_bulk_density(int beta, int N) {
    return std::sqrt(2.0 * beta * N) / (std::numbers::pi * beta);
}

double laguerre_exponent_for_bessel(KernelName name, double s) {
    if (!(s > 0)) throw ContractViolation("s must be positive");
    if (name == KernelName::bessel4) return 2 * s;
    if (name == KernelName::bessel1) return s / 2;
    throw ContractViolation("hard-edge mapping exists only for Bessel kernels");
}

int count_in(const Configuration& c, double a, double b) {
    int n = 0;
    for (double x : c)
        if (x > a && x <= b) ++n;
    return n;
}

std::vector<int> sample_counts(const EnsembleSpec& spec, std::size_t count, const RescaleMode& mode, double a,
                               double b, Exec exec) {
    spec.validate();
    // Pull (a, b] back through the increasing rescale map.
    double lo = a, hi = b;
    if (mode.kind == RescaleMode::Kind::Bulk) {
        if (!(mode.density > 0)) throw ContractViolation("bulk rescale needs a positive density");
        lo = mode.center + a / mode.density;
        hi = mode.center + b / mode.density;
    } else if (mode.kind == RescaleMode::Kind::HardEdge) {
        if (mode.N < 1) throw ContractViolation("hard-edge rescale needs N >= 1");
        lo = a / (4.0 * mode.N);
        hi = b / (4.0 * mode.N);
    }
    std::vector<int> out(count);
    auto one = [&](std::size_t i) {
        if (!(hi > lo)) {
            out[i] = 0;
            return;
        }
        auto t = tridiagonal_model(spec, i);
        out[i] = eigen_count_below(t, hi / t.scale) - eigen_count_below(t, lo / t.scale);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) one(i);
    } else {
        for (std::size_t i = 0; i < count; ++i) one(i);
    }
    return out;
}

CountStats empirical_count_stats(const std::vector<int>& counts) {
    const std::size_t n = counts.size();
    if (n < 1000) throw ResourceError("empirical_count_stats needs at least 1000 samples");
    CountStats s;
    s.samples = n;
    double mean = 0;
    for (int c : counts) mean += c;
    mean /= n;
    double m2 = 0, m4 = 0;
    for (int c : counts) {
        double d = c - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    s.mean = mean;
    s.variance = m2 * n / (n - 1.0);
    s.stderr_mean = std::sqrt(s.variance / n);
    s.stderr_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    return s;
}

CountStats empirical_count_stats(const std::vector<Configuration>& samples, double a, double b) {
    std::vector<int> counts;
    counts.reserve(samples.size());
    for (const auto& c : samples) counts.push_back(count_in(c, a, b));
    return empirical_count_stats(counts);
}

ValidationResult validate_sine1_variance(int N, std::size_t samples, std::uint64_t seed) {
    EnsembleSpec spec{1, Weight::Hermite, 0, N, seed};
    auto counts = sample_counts(spec, samples, RescaleMode::bulk(0, hermite_bulk_density(1, N)), -0.5, 0.5);
    auto st = empirical_count_stats(counts);
    ValidationResult r;
    r.name = "sine1 unit-interval count variance";
    r.empirical = st.variance;
    r.stderr_ = st.stderr_variance;
    r.analytic = occupation_cov(matrix_kernel(KernelName::sine1), 1.0, 0);
    r.allowance = 3 * r.stderr_ + 0.05;
    r.pass = std::abs(r.empirical - r.analytic) <= r.allowance;
    r.stats = st;
    return r;
}

ValidationResult validate_bessel4_mean(double s, int N, std::size_t samples, std::uint64_t seed, double X) {
    EnsembleSpec spec{4, Weight::Laguerre, laguerre_exponent_for_bessel(KernelName::bessel4, s), N, seed};
    auto counts = sample_counts(spec, samples, RescaleMode::hard_edge(N), 0, X);
    auto st = empirical_count_stats(counts);
    auto k = matrix_kernel(KernelName::bessel4, s);
    quad::Options o;
    o.rel_tol = 1e-10;
    o.singularity = quad::Singularity::Left;
    ValidationResult r;
    r.name = "bessel4 hard-edge mean count";
    r.empirical = st.mean;
    r.stderr_ = st.stderr_mean;
    r.analytic = quad::integrate([&](double x) { return rho1(k, x); }, 0, X, o).value;
    r.allowance = 0.1 * r.analytic;
    r.pass = std::abs(r.empirical - r.analytic) <= r.allowance;
    r.stats = st;
    return r;
}

void write_counts_csv(std::ostream& os, const std::vector<int>& counts) {
    os << "sample,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i) os << i << ',' << counts[i] << '\n';
}

std::string validation_json(const ValidationResult& r) {
    const CountStats& st = r.stats;
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["samples"] = st.samples;
    j["mean"] = st.mean;
    j["variance"] = st.variance;
    j["stderr_mean"] = st.stderr_mean;
    j["stderr_variance"] = st.stderr_variance;
    j["empirical"] = r.empirical;
    j["analytic"] = r.analytic;
    j["allowance"] = r.allowance;
    j["pass"] = r.pass;
    return j.dump(2);
}

}  // namespace ppp
