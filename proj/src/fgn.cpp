#include "netkrig/fgn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "netkrig/errors.hpp"

namespace netkrig {

double fgn_autocovariance(double hurst, double sigma2, long lag) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("hurst index must lie in (0,1), got " +
                                    std::to_string(hurst));
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("variance must be positive, got " + std::to_string(sigma2));
    const double k = std::abs(static_cast<double>(lag));
    const double h2 = 2.0 * hurst;
    return 0.5 * sigma2 *
           (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

std::vector<std::complex<double>> make_fft_twiddles(std::size_t m) {
    std::vector<std::complex<double>> tw(m / 2);
    const double step = -2.0 * M_PI / static_cast<double>(m);
    for (std::size_t k = 0; k < m / 2; ++k)
        tw[k] = std::polar(1.0, step * static_cast<double>(k));
    return tw;
}

void fft_radix2(std::vector<std::complex<double>>& data,
                const std::vector<std::complex<double>>& twiddles) {
    const std::size_t m = data.size();
    if (m == 0 || (m & (m - 1)) != 0)
        throw std::invalid_argument("fft size must be a power of two, got " + std::to_string(m));
    if (twiddles.size() != m / 2) throw std::invalid_argument("fft twiddle table size mismatch");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= m; len <<= 1) {
        const std::size_t stride = m / len;
        for (std::size_t base = 0; base < m; base += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w = twiddles[k * stride];
                std::complex<double> u = data[base + k];
                std::complex<double> v = data[base + k + len / 2] * w;
                data[base + k] = u + v;
                data[base + k + len / 2] = u - v;
            }
        }
    }
}

void fft_radix2(std::vector<std::complex<double>>& data) {
    fft_radix2(data, make_fft_twiddles(data.size()));
}

FgnGenerator::FgnGenerator(double hurst, long length) : hurst_(hurst), n_(length) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw std::invalid_argument("hurst index must lie in (0,1), got " +
                                    std::to_string(hurst));
    if (length < 1)
        throw std::invalid_argument("sample length must be >= 1, got " + std::to_string(length));

    m_ = 1;
    while (m_ < 2 * static_cast<std::size_t>(length)) m_ <<= 1;

    // first row of the circulant embedding of the Toeplitz covariance
    std::vector<std::complex<double>> c(m_);
    for (std::size_t j = 0; j < m_; ++j) {
        const std::size_t lag = std::min(j, m_ - j);
        c[j] = fgn_autocovariance(hurst_, 1.0, static_cast<long>(lag));
    }
    twiddles_ = make_fft_twiddles(m_);
    fft_radix2(c, twiddles_);

    double max_lambda = 0;
    for (const auto& v : c) max_lambda = std::max(max_lambda, v.real());
    const double tol = -1e-10 * max_lambda;
    auto lambda_at = [&](std::size_t j) {
        double lam = c[j].real();
        if (lam < tol)
            throw numerical_error("fgn_spectrum",
                                  "circulant embedding has negative eigenvalue " +
                                      std::to_string(lam) + " at index " + std::to_string(j));
        return std::max(lam, 0.0);
    };

    const double dm = static_cast<double>(m_);
    coef_zero_ = std::sqrt(lambda_at(0) / dm);
    coef_mid_ = std::sqrt(lambda_at(m_ / 2) / dm);
    coef_half_.resize(m_ / 2);  // index j in (0, m/2); slot 0 unused
    for (std::size_t j = 1; j < m_ / 2; ++j)
        coef_half_[j] = std::sqrt(lambda_at(j) / (2.0 * dm));
}

void FgnGenerator::sample(std::uint64_t seed, double* out) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::complex<double>> w(m_);
    w[0] = coef_zero_ * gauss(rng);
    w[m_ / 2] = coef_mid_ * gauss(rng);
    for (std::size_t j = 1; j < m_ / 2; ++j) {
        const double a = gauss(rng);
        const double b = gauss(rng);
        w[j] = std::complex<double>(coef_half_[j] * a, coef_half_[j] * b);
        w[m_ - j] = std::conj(w[j]);
    }
    fft_radix2(w, twiddles_);
    for (long i = 0; i < n_; ++i) out[i] = w[i].real();
}

std::vector<double> FgnGenerator::sample(std::uint64_t seed) const {
    std::vector<double> out(n_);
    sample(seed, out.data());
    return out;
}

std::vector<double> generate_fgn(double hurst, double sigma2, long length, std::uint64_t seed) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("variance must be positive, got " + std::to_string(sigma2));
    std::vector<double> z = FgnGenerator(hurst, length).sample(seed);
    const double s = std::sqrt(sigma2);
    for (double& v : z) v *= s;
    return z;
}

}  // namespace netkrig
