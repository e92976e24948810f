#include "pelab/types.hpp"

namespace pelab {

namespace {
std::atomic<std::int64_t> g_dim_cap{1 << 14};
}

std::int64_t dim_cap() { return g_dim_cap.load(std::memory_order_relaxed); }

void set_dim_cap(std::int64_t cap) {
    if (cap < 2) throw contract_error("dim cap must be at least 2");
    g_dim_cap.store(cap, std::memory_order_relaxed);
}

void check_dim_cap(std::int64_t dim, const std::string& context) {
    if (dim > dim_cap()) {
        throw resource_error(context + ": dimension " + std::to_string(dim) +
                             " exceeds cap " + std::to_string(dim_cap()));
    }
}

int qubit_count_for_dim(std::int64_t dim) {
    if (!is_power_of_two(dim)) {
        throw contract_error("dimension " + std::to_string(dim) + " is not a power of two");
    }
    int q = 0;
    while ((std::int64_t{1} << q) < dim) ++q;
    return q;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace pelab
