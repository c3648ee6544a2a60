#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geotrans {

// Runtime dimension cap. Keeps per-point storage bounded and the subcell
// region keys packable into 63 bits.
inline constexpr int kMaxDim = 8;

// Raised for malformed inputs (bad files, unbalanced supplies, out-of-range
// parameters). The CLI maps it to exit code 2.
struct ValidationError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Raised when an internal invariant breaks. CLI exit code 4.
struct InternalError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Point set with one signed supply per point. Coordinates are stored flat,
// row-major, stride = dim. Immutable after validation.
struct TransportInstance {
	int dim = 0;
	std::vector<double> coords;
	std::vector<double> supplies;

	int size() const { return static_cast<int>(supplies.size()); }

	std::span<const double> point(int i) const {
		return {coords.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
	}
};

struct MapEntry {
	int src = 0;
	int dst = 0;
	double amount = 0.0;
};

// Sparse transport map: src sends amount to dst. Amounts are strictly
// positive; src != dst.
struct TransportationMap {
	std::vector<MapEntry> entries;
};

double euclid(std::span<const double> a, std::span<const double> b);

// Checks shape, finiteness, and that supplies balance to zero within
// tolerance (relative to total absolute supply). The residual is folded into
// the point of largest absolute supply so downstream code sees an exact-ish
// zero sum.
TransportInstance validate_instance(int dim, std::vector<double> coords,
                                    std::vector<double> supplies,
                                    double tolerance = 1e-9);

// Total cost: sum of amount * distance(src, dst) over entries.
double map_cost(const TransportInstance& inst, const TransportationMap& map);

// Net outflow per point: row sums minus column sums of the map.
std::vector<double> map_divergence(const TransportInstance& inst,
                                   const TransportationMap& map);

double total_abs_supply(const TransportInstance& inst);

// Text formats.
//   instance: header "d n", then n lines of d coordinates and a supply.
//   map:      one "src dst amount" line per entry, 0-based indices.
TransportInstance read_instance(const std::string& path);
void write_instance(const std::string& path, const TransportInstance& inst);
TransportationMap read_map(const std::string& path);
void write_map(const std::string& path, const TransportationMap& map);

} // namespace geotrans
