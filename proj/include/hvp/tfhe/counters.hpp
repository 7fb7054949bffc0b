#ifndef HVP_TFHE_COUNTERS_HPP
#define HVP_TFHE_COUNTERS_HPP

#include <atomic>
#include <cstdint>

namespace hvp::tfhe {

// Global operation counters, used by tests to check the analytic cost
// model against what actually ran. Cheap enough to keep always on.
struct OpCounters {
    std::atomic<uint64_t> cmux{0};
    std::atomic<uint64_t> blindRotate{0};
    std::atomic<uint64_t> identityKeySwitch{0};
    std::atomic<uint64_t> privateKeySwitch{0};
    std::atomic<uint64_t> circuitBootstrap{0};

    void reset()
    {
        cmux = 0;
        blindRotate = 0;
        identityKeySwitch = 0;
        privateKeySwitch = 0;
        circuitBootstrap = 0;
    }
};

OpCounters& opCounters();

}  // namespace hvp::tfhe

#endif
