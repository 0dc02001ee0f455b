#pragma once

// Thin RAII layer over FFTW for the complex transforms used by the
// pseudo-spectral paths (cubic convolution, split-step cross-check).

#include <complex>
#include <span>

#include <fftw3.h>

namespace nfnls::fft {

/// Complex-to-complex transform pair of fixed length with owned buffers.
/// Plans are created once per length and thread; instances are not shared.
class Workspace {
public:
    explicit Workspace(int length);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    int length() const noexcept { return length_; }
    std::span<std::complex<double>> buffer() noexcept;

    /// buffer <- sum_k buffer[k] e^{+2 pi i jk/L}  (grid values from coefficients)
    void to_grid();
    /// buffer <- sum_j buffer[j] e^{-2 pi i jk/L} / L  (coefficients from grid values)
    void to_coefficients();

private:
    int length_;
    fftw_complex* data_;
    fftw_plan backward_;
    fftw_plan forward_;
};

/// Per-thread cached workspace for the given length.
Workspace& workspace(int length);

}  // namespace nfnls::fft
