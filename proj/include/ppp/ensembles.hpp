#pragma once

#include "ppp/kernels.hpp"
#include "ppp/parallel.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ppp {

// Philox4x32-10 counter-based generator. Each (key, stream) pair is an
// independent sequence; block counter advances every four outputs.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t key, std::uint64_t stream);

    static Block bijection(Block ctr, std::array<std::uint32_t, 2> key);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block buf_{};
    int used_ = 4;
};

enum class Weight { Hermite, Laguerre };

// Density const * prod w(x_i) prod |x_i - x_j|^beta with
// hermite: w(x) = exp(-x^2/2); laguerre: w(x) = x^a exp(-beta x/2) on (0, inf).
struct EnsembleSpec {
    int beta = 2;
    Weight weight = Weight::Hermite;
    double a = 0;
    int N = 1;
    std::uint64_t seed = 0;
    void validate() const;
};

using Configuration = std::vector<double>;

// Sample number `index` of the stream fixed by spec.seed.
Configuration sample(const EnsembleSpec& spec, std::uint64_t index = 0);
std::vector<Configuration> sample_batch(const EnsembleSpec& spec, std::size_t count, Exec exec = Exec::Parallel);

struct RescaleMode {
    enum class Kind { Identity, Bulk, HardEdge };
    Kind kind = Kind::Identity;
    double center = 0;   // bulk
    double density = 1;  // bulk: intensity at center
    int N = 0;           // hard edge
    static RescaleMode identity() { return {}; }
    static RescaleMode bulk(double center, double density) { return {Kind::Bulk, center, density, 0}; }
    static RescaleMode hard_edge(int N) { return {Kind::HardEdge, 0, 1, N}; }
};

// bulk: (x - center) * density; hard edge: 4N x.
Configuration rescale(const Configuration& pts, const RescaleMode& mode);

// Semicircle intensity at 0 for the Hermite weight exp(-x^2/2).
double hermite_bulk_density(int beta, int N);

// Laguerre exponent a whose hard-edge limit matches the Bessel matrix kernel with parameter s.
double laguerre_exponent_for_bessel(KernelName name, double s);

struct CountStats {
    double mean = 0;
    double variance = 0;
    double stderr_mean = 0;
    double stderr_variance = 0;
    std::size_t samples = 0;
};

// Number of points in (a, b].
int count_in(const Configuration& c, double a, double b);

// Counts per sample drawn and rescaled on the fly.
std::vector<int> sample_counts(const EnsembleSpec& spec, std::size_t count, const RescaleMode& mode, double a,
                               double b, Exec exec = Exec::Parallel);

CountStats empirical_count_stats(const std::vector<int>& counts);
CountStats empirical_count_stats(const std::vector<Configuration>& samples, double a, double b);

struct ValidationResult {
    std::string name;
    double empirical = 0;
    double stderr_ = 0;
    double analytic = 0;
    double allowance = 0;
    bool pass = false;
    CountStats stats;
};

// Bulk Gaussian beta = 1 count variance in a unit interval against sine1.
ValidationResult validate_sine1_variance(int N, std::size_t samples, std::uint64_t seed);
// Hard-edge Laguerre beta = 4 mean count in (0, X] against int rho1 of bessel4.
ValidationResult validate_bessel4_mean(double s, int N, std::size_t samples, std::uint64_t seed, double X = 2);

void write_counts_csv(std::ostream& os, const std::vector<int>& counts);
std::string validation_json(const ValidationResult& r);

}  // namespace ppp
