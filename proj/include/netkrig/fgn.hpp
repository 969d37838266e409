#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace netkrig {

// Autocovariance of fractional Gaussian noise with Hurst index `hurst` and
// marginal variance `sigma2` at integer lag `lag`:
//   (sigma2/2) * (|k+1|^2H - 2|k|^2H + |k-1|^2H)
// Requires hurst in (0,1) and sigma2 > 0.
double fgn_autocovariance(double hurst, double sigma2, long lag);

// Iterative radix-2 complex FFT (forward, unnormalized), in place.
// data.size() must be a power of two.  `twiddles` must hold
// exp(-2*pi*i*k/m) for k in [0, m/2) as produced by make_fft_twiddles(m).
std::vector<std::complex<double>> make_fft_twiddles(std::size_t m);
void fft_radix2(std::vector<std::complex<double>>& data,
                const std::vector<std::complex<double>>& twiddles);
void fft_radix2(std::vector<std::complex<double>>& data);

// One-shot fGn draw with marginal variance sigma2; reuses FgnGenerator.
std::vector<double> generate_fgn(double hurst, double sigma2, long length, std::uint64_t seed);

// Exact sampler for unit-variance fractional Gaussian noise via circulant
// embedding.  The embedded covariance spectrum is computed once per
// (hurst, length); each sample() costs one FFT and is a pure function of its
// seed, so draws are reproducible and independent across seeds.
class FgnGenerator {
public:
    FgnGenerator(double hurst, long length);

    double hurst() const { return hurst_; }
    long length() const { return n_; }
    std::size_t embedding_size() const { return m_; }

    void sample(std::uint64_t seed, double* out) const;
    std::vector<double> sample(std::uint64_t seed) const;

private:
    double hurst_;
    long n_;
    std::size_t m_;
    std::vector<double> coef_half_;    // sqrt(lambda_j/(2m)), j in (0, m/2)
    double coef_zero_ = 0;             // sqrt(lambda_0/m)
    double coef_mid_ = 0;              // sqrt(lambda_{m/2}/m)
    std::vector<std::complex<double>> twiddles_;
};

}  // namespace netkrig
