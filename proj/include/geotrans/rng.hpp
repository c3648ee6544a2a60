#pragma once

#include <cstdint>
#include <random>

namespace geotrans {

// splitmix64 finalizer. Used to derive substream seeds so that the stream for
// a subtree depends only on (master seed, subtree identity), never on
// traversal order.
inline uint64_t mix64(uint64_t x) {
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(a ^ mix64(b)); }

// Reproducible generator: mt19937_64 has a fully specified sequence, and the
// double conversion below avoids the implementation-defined distributions.
class Rng {
public:
	explicit Rng(uint64_t seed) : gen_(mix64(seed)) {}

	uint64_t next() { return gen_(); }

	// uniform in [0,1)
	double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

	// uniform in [lo,hi)
	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

	// uniform integer in [0,n)
	uint64_t below(uint64_t n) { return n ? next() % n : 0; }

private:
	std::mt19937_64 gen_;
};

} // namespace geotrans
