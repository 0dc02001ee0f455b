#include "nfnls/fft.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <new>

namespace nfnls::fft {

namespace {
// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Workspace::Workspace(int length) : length_(length) {
    std::lock_guard lock(planner_mutex());
    data_ = fftw_alloc_complex(static_cast<std::size_t>(length));
    if (data_ == nullptr) throw std::bad_alloc();
    backward_ = fftw_plan_dft_1d(length, data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
    forward_ = fftw_plan_dft_1d(length, data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
}

Workspace::~Workspace() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(backward_);
    fftw_destroy_plan(forward_);
    fftw_free(data_);
}

std::span<std::complex<double>> Workspace::buffer() noexcept {
    return {reinterpret_cast<std::complex<double>*>(data_), static_cast<std::size_t>(length_)};
}

void Workspace::to_grid() { fftw_execute(backward_); }

void Workspace::to_coefficients() {
    fftw_execute(forward_);
    const double scale = 1.0 / length_;
    for (auto& c : buffer()) c *= scale;
}

Workspace& workspace(int length) {
    thread_local std::map<int, std::unique_ptr<Workspace>> cache;
    auto& slot = cache[length];
    if (!slot) slot = std::make_unique<Workspace>(length);
    return *slot;
}

}  // namespace nfnls::fft
