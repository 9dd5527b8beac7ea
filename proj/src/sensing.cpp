#include "ucs/sensing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "ucs/rng.hpp"

namespace ucs {

namespace {

constexpr char matrix_magic[8] = {'U', 'C', 'S', 'M', 'A', 'T', '0', '1'};

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xFF);
        return r;
    }
    return v;
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    const std::uint64_t le = to_little_endian(v);
    out.write(reinterpret_cast<const char*>(&le), sizeof le);
}

std::uint64_t get_u64(std::ifstream& in) {
    std::uint64_t le = 0;
    in.read(reinterpret_cast<char*>(&le), sizeof le);
    return to_little_endian(le);
}

}  // namespace

Matrix gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed) {
    if (m == 0 || n == 0) throw std::domain_error("measurement matrix dimensions must be positive");
    Rng rng(seed);
    Matrix A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = rng.normal();
    }
    return A;
}

Vector measure(const Matrix& A, std::span<const double> x, const NoiseSpec& noise,
               std::uint64_t noise_seed) {
    if (static_cast<std::size_t>(A.cols()) != x.size()) {
        throw std::domain_error("measure: matrix has " + std::to_string(A.cols()) +
                                " columns but signal has length " + std::to_string(x.size()));
    }
    const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Vector y = A * xv;
    if (noise.kind == NoiseSpec::Kind::none) return y;
    if (noise.level < 0.0) throw std::domain_error("noise level must be nonnegative");

    Rng rng(noise_seed);
    Vector z(y.size());
    for (auto& v : z) v = rng.normal();
    if (noise.kind == NoiseSpec::Kind::gaussian) {
        y += noise.level * z;
    } else {
        const double norm = z.norm();
        if (norm > 0.0) y += (noise.level / norm) * z;
    }
    return y;
}

MeasurementSet make_measurements(std::span<const double> x, std::size_t m, std::uint64_t matrix_seed,
                                 const NoiseSpec& noise, std::uint64_t noise_seed) {
    MeasurementSet ms;
    ms.A = gaussian_matrix(m, x.size(), matrix_seed);
    ms.y = measure(ms.A, x, noise, noise_seed);
    ms.matrix_seed = matrix_seed;
    ms.noise = noise;
    return ms;
}

SigmaMaxCheck sigma_max_check(const Matrix& A, double rel_tol, std::size_t max_iter) {
    const double bound = std::sqrt(static_cast<double>(A.cols())) + 2.0 * std::sqrt(static_cast<double>(A.rows()));
    Rng rng(0x51C3A);
    Vector v(A.cols());
    for (auto& e : v) e = rng.normal();
    v.normalize();

    double lambda = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const Vector w = A.transpose() * (A * v);
        const double next = w.norm();
        if (next == 0.0) return {0.0, bound, true, it};
        v = w / next;
        if (std::abs(next - lambda) <= rel_tol * next) {
            const double sigma = std::sqrt(next);
            return {sigma, bound, sigma <= bound, it};
        }
        lambda = next;
    }
    throw std::runtime_error("sigma_max power iteration did not converge in " +
                             std::to_string(max_iter) + " iterations");
}

double chi2_lower_tail_bound(std::size_t m, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("lower chi2 tail needs 0 < tau < 1");
    return std::exp(0.5 * static_cast<double>(m) * (tau + std::log1p(-tau)));
}

double chi2_upper_tail_bound(std::size_t m, double tau) {
    if (!(tau > 0.0)) throw std::domain_error("upper chi2 tail needs tau > 0");
    return std::exp(-0.5 * static_cast<double>(m) * (tau - std::log1p(tau)));
}

Chi2TailBounds chi2_tail_bounds(std::size_t m, double tau) {
    return {chi2_lower_tail_bound(m, tau), chi2_upper_tail_bound(m, tau)};
}

Chi2Empirical chi2_empirical_tails(std::size_t m, double tau, std::size_t draws, std::uint64_t seed) {
    if (m == 0 || draws == 0) throw std::domain_error("chi2 Monte-Carlo needs m, draws >= 1");
    Rng rng(seed);
    const double md = static_cast<double>(m);
    std::size_t below = 0;
    std::size_t above = 0;
    for (std::size_t d = 0; d < draws; ++d) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double u = rng.normal();
            sum += u * u;
        }
        if (sum < md * (1.0 - tau)) ++below;
        if (sum > md * (1.0 + tau)) ++above;
    }
    const double total = static_cast<double>(draws);
    return {static_cast<double>(below) / total, static_cast<double>(above) / total};
}

MeasurementCount measurement_count(std::size_t n, double d_o, double delta,
                                   std::optional<std::size_t> m_min) {
    if (n == 0) throw std::domain_error("measurement_count needs n >= 1");
    if (!(d_o >= 0.0 && d_o <= 1.0)) throw std::domain_error("d_o must lie in [0, 1]");
    if (!(delta > 0.0)) throw std::domain_error("delta must be positive");
    if (d_o == 0.0) {
        const auto floor_m = m_min.value_or(
            static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))));
        return {std::clamp<std::size_t>(floor_m, 1, n), true};
    }
    const double raw = std::ceil((1.0 + delta) * d_o * static_cast<double>(n));
    const auto m = static_cast<std::size_t>(std::clamp(raw, 1.0, static_cast<double>(n)));
    return {m, false};
}

void write_matrix_binary(const Matrix& A, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(matrix_magic, sizeof matrix_magic);
    put_u64(out, static_cast<std::uint64_t>(A.rows()));
    put_u64(out, static_cast<std::uint64_t>(A.cols()));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(A(i, j)));
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Matrix read_matrix_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, matrix_magic, sizeof magic) != 0) {
        throw std::runtime_error(path.string() + ": not a matrix file (bad magic)");
    }
    const auto m = get_u64(in);
    const auto n = get_u64(in);
    if (!in || m == 0 || n == 0) throw std::runtime_error(path.string() + ": bad matrix header");
    Matrix A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) A(i, j) = std::bit_cast<double>(get_u64(in));
    }
    if (!in) throw std::runtime_error(path.string() + ": truncated matrix data");
    return A;
}

}  // namespace ucs
