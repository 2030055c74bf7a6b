#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "tdc/error.hpp"

namespace tdc::detail {
namespace {

enum class PlanKind { R2C, C2R, C2CBackward };

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(PlanKind kind, std::size_t n) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(kind, n);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const int size = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        double* real = fftw_alloc_real(n);
        fftw_complex* cplx = fftw_alloc_complex(n);
        fftw_complex* cplx2 = fftw_alloc_complex(n);
        fftw_plan plan = nullptr;
        switch (kind) {
        case PlanKind::R2C: plan = fftw_plan_dft_r2c_1d(size, real, cplx, flags); break;
        case PlanKind::C2R: plan = fftw_plan_dft_c2r_1d(size, cplx, real, flags); break;
        case PlanKind::C2CBackward:
            plan = fftw_plan_dft_1d(size, cplx, cplx2, FFTW_BACKWARD, flags);
            break;
        }
        fftw_free(real);
        fftw_free(cplx);
        fftw_free(cplx2);
        if (plan == nullptr) throw Error(ErrorKind::InvalidArgument, "FFTW planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<PlanKind, std::size_t>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<Complex> rfft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    std::vector<double> in(x.begin(), x.end());
    std::vector<Complex> out(n / 2 + 1);
    fftw_execute_dft_r2c(cache().get(PlanKind::R2C, n), in.data(), as_fftw(out.data()));
    return out;
}

std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n) {
    if (n == 0) return {};
    if (spectrum.size() != n / 2 + 1)
        throw Error(ErrorKind::DimensionMismatch, "irfft: spectrum size does not match n");
    // c2r overwrites its input.
    std::vector<Complex> in(spectrum.begin(), spectrum.end());
    std::vector<double> out(n);
    fftw_execute_dft_c2r(cache().get(PlanKind::C2R, n), as_fftw(in.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

std::vector<Complex> ifft(std::span<const Complex> spectrum) {
    const std::size_t n = spectrum.size();
    if (n == 0) return {};
    std::vector<Complex> in(spectrum.begin(), spectrum.end());
    std::vector<Complex> out(n);
    fftw_execute_dft(cache().get(PlanKind::C2CBackward, n), as_fftw(in.data()),
                     as_fftw(out.data()));
    const double scale = 1.0 / static_cast<double>(n);
    for (Complex& v : out) v *= scale;
    return out;
}

}  // namespace tdc::detail
