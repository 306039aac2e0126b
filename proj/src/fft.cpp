#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "ellsys/errors.hpp"

namespace ellsys::detail {

namespace {

// The FFTW planner is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class Plan {
public:
    Plan(int n, int G) {
        std::size_t total = 1;
        std::vector<int> dims(static_cast<std::size_t>(n), G);
        for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(G);
        size_ = total;
        std::lock_guard lock(planner_mutex());
        buffer_ = fftw_alloc_complex(total);
        forward_ = fftw_plan_dft(n, dims.data(), buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft(n, dims.data(), buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!forward_ || !backward_) throw Error("FFTW failed to create a plan");
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buffer_);
    }

    void run(std::span<std::complex<double>> data, int sign) {
        std::memcpy(buffer_, data.data(), size_ * sizeof(fftw_complex));
        fftw_execute(sign < 0 ? forward_ : backward_);
        std::memcpy(data.data(), buffer_, size_ * sizeof(fftw_complex));
    }

    std::size_t size() const { return size_; }

private:
    std::size_t size_ = 0;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace

void fft_inplace(int n, int G, std::span<std::complex<double>> data, int sign) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<Plan>> cache;
    auto& slot = cache[{n, G}];
    if (!slot) slot = std::make_unique<Plan>(n, G);
    if (data.size() != slot->size()) throw DimensionError("fft: buffer size does not match grid");
    slot->run(data, sign);
}

}  // namespace ellsys::detail
