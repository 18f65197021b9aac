#include <cstdlib>
#include <string>

#include "dprls/kernels.hpp"

namespace dprls::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

namespace {

const KernelTable& select() {
    const char* env = std::getenv("DPRLS_SIMD");
    const std::string want = env ? env : "";
    if (want == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace dprls::kernels
