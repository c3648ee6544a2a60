#include "geotrans/core.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geotrans {

double euclid(std::span<const double> a, std::span<const double> b) {
	double s = 0.0;
	for (size_t j = 0; j < a.size(); ++j) {
		const double t = a[j] - b[j];
		s += t * t;
	}
	return std::sqrt(s);
}

double total_abs_supply(const TransportInstance& inst) {
	double s = 0.0;
	for (double m : inst.supplies) s += std::abs(m);
	return s;
}

TransportInstance validate_instance(int dim, std::vector<double> coords,
                                    std::vector<double> supplies,
                                    double tolerance) {
	if (dim < 1 || dim > kMaxDim)
		throw ValidationError("dimension must be in [1, " + std::to_string(kMaxDim) +
		                      "], got " + std::to_string(dim));
	const size_t n = supplies.size();
	if (n == 0) throw ValidationError("instance must contain at least one point");
	if (coords.size() != n * static_cast<size_t>(dim))
		throw ValidationError("coordinate count does not match n * dim");
	for (double c : coords)
		if (!std::isfinite(c)) throw ValidationError("non-finite coordinate");

	double sum = 0.0, abssum = 0.0;
	for (double m : supplies) {
		if (!std::isfinite(m)) throw ValidationError("non-finite supply");
		sum += m;
		abssum += std::abs(m);
	}
	if (std::abs(sum) > tolerance * std::max(abssum, 1e-300) && abssum > 0.0)
		throw ValidationError("supplies do not balance: sum = " + std::to_string(sum));
	if (abssum == 0.0 && sum != 0.0) throw ValidationError("supplies do not balance");

	// Fold the residual into the largest-|supply| point (lowest index on
	// ties). One extra pass usually lands the sum on exact zero; anything
	// further is below the resolution of every tolerance used downstream.
	for (int pass = 0; pass < 3 && sum != 0.0 && abssum > 0.0; ++pass) {
		size_t k = 0;
		for (size_t i = 1; i < n; ++i)
			if (std::abs(supplies[i]) > std::abs(supplies[k])) k = i;
		supplies[k] -= sum;
		sum = 0.0;
		for (double m : supplies) sum += m;
	}

	TransportInstance inst;
	inst.dim = dim;
	inst.coords = std::move(coords);
	inst.supplies = std::move(supplies);
	return inst;
}

double map_cost(const TransportInstance& inst, const TransportationMap& map) {
	double c = 0.0;
	for (const MapEntry& e : map.entries)
		c += e.amount * euclid(inst.point(e.src), inst.point(e.dst));
	return c;
}

std::vector<double> map_divergence(const TransportInstance& inst,
                                   const TransportationMap& map) {
	std::vector<double> div(inst.size(), 0.0);
	for (const MapEntry& e : map.entries) {
		if (e.src < 0 || e.src >= inst.size() || e.dst < 0 || e.dst >= inst.size())
			throw ValidationError("map entry references unknown point");
		div[e.src] += e.amount;
		div[e.dst] -= e.amount;
	}
	return div;
}

namespace {

std::string fmt_double(double v) {
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

} // namespace

TransportInstance read_instance(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw ValidationError("cannot open instance file: " + path);
	int d = 0;
	long long n = 0;
	if (!(in >> d >> n)) throw ValidationError("bad instance header in " + path);
	if (d < 1 || d > kMaxDim) throw ValidationError("bad dimension in " + path);
	if (n < 1 || n > (1LL << 31)) throw ValidationError("bad point count in " + path);
	std::vector<double> coords(static_cast<size_t>(n) * d);
	std::vector<double> supplies(static_cast<size_t>(n));
	for (long long i = 0; i < n; ++i) {
		for (int j = 0; j < d; ++j)
			if (!(in >> coords[static_cast<size_t>(i) * d + j]))
				throw ValidationError("truncated instance file: " + path);
		if (!(in >> supplies[static_cast<size_t>(i)]))
			throw ValidationError("truncated instance file: " + path);
	}
	return validate_instance(d, std::move(coords), std::move(supplies));
}

void write_instance(const std::string& path, const TransportInstance& inst) {
	std::ofstream out(path);
	if (!out) throw ValidationError("cannot open output file: " + path);
	out << inst.dim << ' ' << inst.size() << '\n';
	for (int i = 0; i < inst.size(); ++i) {
		for (int j = 0; j < inst.dim; ++j)
			out << fmt_double(inst.coords[static_cast<size_t>(i) * inst.dim + j]) << ' ';
		out << fmt_double(inst.supplies[i]) << '\n';
	}
	if (!out) throw ValidationError("failed writing " + path);
}

TransportationMap read_map(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw ValidationError("cannot open map file: " + path);
	TransportationMap map;
	std::string line;
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		std::istringstream ls(line);
		MapEntry e;
		if (!(ls >> e.src >> e.dst >> e.amount))
			throw ValidationError("bad map line: " + line);
		map.entries.push_back(e);
	}
	return map;
}

void write_map(const std::string& path, const TransportationMap& map) {
	std::ofstream out(path);
	if (!out) throw ValidationError("cannot open output file: " + path);
	for (const MapEntry& e : map.entries)
		out << e.src << ' ' << e.dst << ' ' << fmt_double(e.amount) << '\n';
	if (!out) throw ValidationError("failed writing " + path);
}

} // namespace geotrans
