#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geotrans/core.hpp"

namespace geotrans {

// Construction parameters. eps0 controls the per-cell grid resolution
// (1/eps0 is a power of two, eps0 <= 1/2). The exponents size the two
// polynomial guards: points should stay side-distance >= side/n^moat_exponent
// away from box walls, and a cell whose points span less than
// eps0*side/(3*n^rule2_exponent) collapses into an independently shifted
// nested tree.
struct QuadtreeParams {
	double eps0 = 0.25;
	int n = 0; // instance size, set at build
	uint64_t seed = 0;
	int moat_exponent = 4;
	int rule2_exponent = 8;
	double eps0_scale = 1.0; // the c in eps0 = eps / (c * ceil(log2 n))

	// Derives eps0 from the target approximation parameter: divide by
	// c*ceil(log2 n), then round 1/eps0 up to the next power of two (and
	// never below 2).
	static QuadtreeParams from_epsilon(double eps, int n, uint64_t seed,
	                                   double c = 1.0, int moat_exp = 4,
	                                   int rule2_exp = 8);
};

// One region of a cell's grid that actually holds points. The region's
// center is the cell's representative vertex ("net point") in the sparse
// graph.
struct Subcell {
	int cell = -1;
	int64_t key = 0;   // packed per-dim region indices
	int npoints = 0;
	int first_point = -1;       // lowest-order representative inside, for fallbacks
	int net_vertex = -1;        // graph vertex id (points come first)
	int parent_subcell = -1;    // subcell of the parent cell containing this one
	int parent_net = -1;        // its net vertex, -1 at the top cell
};

struct Cell {
	std::array<double, kMaxDim> corner{}; // low corner; box is [corner, corner+side) per dim
	double side = 0.0;
	int parent = -1;
	int first_child = -1;
	int next_sibling = -1;
	int begin = 0, end = 0; // range in Quadtree::order
	int rule = 0;           // 1 leaf, 2 nested-tree jump, 3 grid split
	bool subtree_root = false;
	int subtree = -1;       // simple-subtree id
	int sub_begin = 0, sub_end = 0; // range in Quadtree::subcells
};

struct PropertyViolation {
	int property = 0; // 1 cell count, 2 wall distance, 3 nested-tree containment
	std::string what;
};

struct PropertyReport {
	bool pass = true;
	bool cell_count_ok = true;
	bool wall_distance_ok = true;
	bool nesting_ok = true;
	long cells = 0;
	double cell_bound = 0.0; // pinned c1 * n * log2(n/eps0)
	std::vector<PropertyViolation> violations;
};

// Hierarchical subdivision of the input points under a randomly shifted top
// box of side 3*diameter. Cells with a tiny point spread relative to their
// side give way to independently shifted nested trees ("simple subtrees"),
// which keeps the total cell count near-linear regardless of spread.
//
// Exactly coincident input points are merged up front into one
// representative with the summed supply; rep_of/rep_original record the
// mapping so transport on representatives can be re-expanded at zero cost.
struct Quadtree {
	int dim = 0;
	QuadtreeParams params;

	// working (deduplicated) point set
	std::vector<double> coords;
	std::vector<double> supplies;
	std::vector<int> rep_of;       // original index -> representative
	std::vector<int> rep_original; // representative -> lowest original index
	int n_original = 0;
	bool has_duplicates = false;

	// stash of the validated input, so resampling rebuilds from scratch
	std::vector<double> orig_coords;
	std::vector<double> orig_supplies;

	std::vector<Cell> cells; // cells[0] is the top cell; parents precede children
	std::vector<int> order;  // representative ids, contiguous per cell
	std::vector<int> leaf_of; // representative -> leaf cell

	// filled by subdivide_and_net
	bool subdivided = false;
	std::vector<Subcell> subcells; // grouped per cell, cell order
	std::vector<double> net_coords; // region centers, net-local index * dim
	int net_count = 0;
	std::vector<int> point_leaf_subcell; // representative -> its leaf's subcell

	std::vector<int> subtree_root_cell; // subtree id -> root cell (id 0 = top tree)
	std::vector<int> subtree_order;     // subtree ids, every subtree before its enclosing one
	std::vector<int> cell_postorder;    // children before parents

	int points() const { return static_cast<int>(supplies.size()); }

	std::span<const double> point(int i) const {
		return {coords.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
	}
	std::span<const double> net_point(int net_local) const {
		return {net_coords.data() + static_cast<size_t>(net_local) * dim,
		        static_cast<size_t>(dim)};
	}

	int inv_eps0() const { return static_cast<int>(1.0 / params.eps0 + 0.5); }

	// Region index of a coordinate vector inside cell c's grid, clamped.
	int64_t region_key(int c, std::span<const double> p) const;
	void region_coords(int64_t key, int* out) const;
	void subcell_center(const Subcell& s, double* out) const;

	// Cells of one simple subtree, root first, parents before children.
	std::vector<int> subtree_cells(int subtree_id) const;
};

Quadtree build_quadtree(const TransportInstance& inst, const QuadtreeParams& params);

// Materializes per-cell grids and net points. Idempotent.
void subdivide_and_net(Quadtree& tree);

// Rebuild from the stored instance with a different shift seed. Parameters
// are kept.
Quadtree resample(const Quadtree& tree, uint64_t new_seed);

// Checks the three structural properties the cost analysis leans on:
// near-linear cell count, wall clearance for every point, and containment of
// nested-tree boxes inside one region of the enclosing cell. Violations are
// expected with small probability; callers resample on failure.
PropertyReport check_properties(const Quadtree& tree);

// Text dump, one line per cell followed by its subcell lines.
//   cell <id> <parent> <side> <corner...> <npoints> <rule> <flags>
//   sub  <cellid> <center...> <netvertex> <parentnetvertex>
std::string dump_tree(const Quadtree& tree);

} // namespace geotrans
