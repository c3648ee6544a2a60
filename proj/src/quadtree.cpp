#include "geotrans/quadtree.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "geotrans/rng.hpp"

namespace geotrans {

namespace {

int ceil_log2(long n) {
	int k = 0;
	while ((1L << k) < n) ++k;
	return k;
}

} // namespace

QuadtreeParams QuadtreeParams::from_epsilon(double eps, int n, uint64_t seed,
                                            double c, int moat_exp, int rule2_exp) {
	if (!(eps > 0.0) || !std::isfinite(eps))
		throw ValidationError("epsilon must be positive and finite");
	if (!(c > 0.0)) throw ValidationError("eps0 scale must be positive");
	if (n < 1) throw ValidationError("instance size must be at least 1");
	const int logn = std::max(1, ceil_log2(n));
	const double raw = eps / (c * logn);
	int k = 1; // 1/eps0 = 2^k, k >= 1 so eps0 <= 1/2
	while ((1L << k) < 1.0 / raw && k < 40) ++k;
	QuadtreeParams p;
	p.eps0 = std::ldexp(1.0, -k);
	p.n = n;
	p.seed = seed;
	p.moat_exponent = moat_exp;
	p.rule2_exponent = rule2_exp;
	p.eps0_scale = c;
	return p;
}

int64_t Quadtree::region_key(int c, std::span<const double> p) const {
	const Cell& cell = cells[c];
	const int inv = inv_eps0();
	const double s = params.eps0 * cell.side;
	int64_t key = 0;
	int64_t mult = 1;
	for (int j = 0; j < dim; ++j) {
		long r = static_cast<long>(std::floor((p[j] - cell.corner[j]) / s));
		r = std::clamp(r, 0L, static_cast<long>(inv - 1));
		key += r * mult;
		mult *= inv;
	}
	return key;
}

void Quadtree::region_coords(int64_t key, int* out) const {
	const int inv = inv_eps0();
	for (int j = 0; j < dim; ++j) {
		out[j] = static_cast<int>(key % inv);
		key /= inv;
	}
}

void Quadtree::subcell_center(const Subcell& s, double* out) const {
	const Cell& cell = cells[s.cell];
	const double side = params.eps0 * cell.side;
	int r[kMaxDim];
	region_coords(s.key, r);
	for (int j = 0; j < dim; ++j) out[j] = cell.corner[j] + (r[j] + 0.5) * side;
}

std::vector<int> Quadtree::subtree_cells(int subtree_id) const {
	std::vector<int> out;
	for (int c = 0; c < static_cast<int>(cells.size()); ++c)
		if (cells[c].subtree == subtree_id) out.push_back(c);
	return out;
}

namespace {

// Build-time point set: one intrusive doubly-linked list per dimension, each
// sorted by that coordinate (ties by id). Splitting a box walks the split
// dimension from both ends at once and relocates only the less populated
// side, so every point pays O(d + log) per relocation.
struct Group {
	std::array<int32_t, kMaxDim> head{};
	std::array<int32_t, kMaxDim> tail{};
	int count = 0;
};

enum class SplitResult { AllLow, AllHigh, ExtractedLow, ExtractedHigh };

struct Builder {
	int d = 0;
	int n = 0;
	const double* coords = nullptr;
	QuadtreeParams params;
	std::vector<int32_t> nxt, prv; // d lists, index j*n+i
	Quadtree* tree = nullptr;
	std::vector<int> leaf_point;      // per cell
	std::vector<int> last_child;      // per cell
	std::vector<int> subtree_parent;  // per subtree id

	double at(int i, int j) const { return coords[static_cast<size_t>(i) * d + j]; }

	void link_sorted(Group& g, int j, std::vector<int>& ids) {
		std::sort(ids.begin(), ids.end(), [&](int a, int b) {
			const double ca = at(a, j), cb = at(b, j);
			return ca < cb || (ca == cb && a < b);
		});
		g.head[j] = ids.front();
		g.tail[j] = ids.back();
		for (size_t k = 0; k < ids.size(); ++k) {
			prv[static_cast<size_t>(j) * n + ids[k]] = k ? ids[k - 1] : -1;
			nxt[static_cast<size_t>(j) * n + ids[k]] =
			    k + 1 < ids.size() ? ids[k + 1] : -1;
		}
	}

	void unlink(Group& g, int j, int i) {
		const size_t base = static_cast<size_t>(j) * n;
		const int p = prv[base + i], q = nxt[base + i];
		if (p == -1) g.head[j] = q;
		else nxt[base + p] = q;
		if (q == -1) g.tail[j] = p;
		else prv[base + q] = p;
	}

	// Splits g at coordinate c along dimension j. The completed (smaller)
	// side is moved into out; the remainder stays in g.
	SplitResult split(Group& g, int j, double c, Group& out) {
		const size_t base = static_cast<size_t>(j) * n;
		int x = g.head[j], nl = 0;
		int y = g.tail[j], nr = 0;
		int side;
		for (;;) {
			if (nl + nr >= g.count || at(x, j) >= c) {
				side = 1;
				break;
			}
			x = nxt[base + x];
			++nl;
			if (nl + nr >= g.count || at(y, j) < c) {
				side = 2;
				break;
			}
			y = prv[base + y];
			++nr;
		}
		int take;
		bool low;
		if (side == 1) {
			take = nl;
			low = true;
		} else {
			take = nr;
			low = false;
		}
		if (low && take == 0) return SplitResult::AllHigh;
		if (low && take == g.count) return SplitResult::AllLow;
		if (!low && take == 0) return SplitResult::AllLow;
		if (!low && take == g.count) return SplitResult::AllHigh;

		// Collect the completed side in dim-j order.
		std::vector<int> ids(take);
		if (low) {
			int it = g.head[j];
			for (int k = 0; k < take; ++k) {
				ids[k] = it;
				it = nxt[base + it];
			}
		} else {
			int it = g.tail[j];
			for (int k = take - 1; k >= 0; --k) {
				ids[k] = it;
				it = prv[base + it];
			}
		}
		for (int id : ids)
			for (int k = 0; k < d; ++k) unlink(g, k, id);
		g.count -= take;

		out = Group{};
		out.count = take;
		// dim j order is already sorted; the others get re-sorted. Each point
		// moves O(log n) times, so the sorting stays within the near-linear
		// budget at the sizes this is used for.
		std::vector<int> tmp = ids;
		for (int k = 0; k < d; ++k) {
			if (k == j) {
				g_link_presorted(out, k, ids);
			} else {
				link_sorted(out, k, tmp);
			}
		}
		return low ? SplitResult::ExtractedLow : SplitResult::ExtractedHigh;
	}

	void g_link_presorted(Group& g, int j, const std::vector<int>& ids) {
		g.head[j] = ids.front();
		g.tail[j] = ids.back();
		for (size_t k = 0; k < ids.size(); ++k) {
			prv[static_cast<size_t>(j) * n + ids[k]] = k ? ids[k - 1] : -1;
			nxt[static_cast<size_t>(j) * n + ids[k]] =
			    k + 1 < ids.size() ? ids[k + 1] : -1;
		}
	}

	void bbox(const Group& g, double* lo, double* hi) const {
		for (int j = 0; j < d; ++j) {
			lo[j] = at(g.head[j], j);
			hi[j] = at(g.tail[j], j);
		}
	}

	int min_id(const Group& g) const {
		int m = g.head[0];
		for (int it = g.head[0]; it != -1; it = nxt[it]) m = std::min(m, it);
		return m;
	}

	int new_cell(int parent, double side, const double* corner, int subtree) {
		Cell c;
		c.side = side;
		for (int j = 0; j < d; ++j) c.corner[j] = corner[j];
		c.parent = parent;
		c.subtree = subtree;
		const int id = static_cast<int>(tree->cells.size());
		if (parent >= 0) {
			if (last_child[parent] == -1) tree->cells[parent].first_child = id;
			else tree->cells[last_child[parent]].next_sibling = id;
			last_child[parent] = id;
		}
		tree->cells.push_back(c);
		leaf_point.push_back(-1);
		last_child.push_back(-1);
		return id;
	}

	// Starts an independently shifted tree over the points of g. The stream
	// seed depends only on the point set identity (min id, count), so
	// resampling with a new master seed stays reproducible.
	int start_subtree(Group& g, int parent_cell, int parent_subtree) {
		const int sid = static_cast<int>(tree->subtree_root_cell.size());
		double lo[kMaxDim], hi[kMaxDim], corner[kMaxDim];
		double spread = 0.0;
		bbox(g, lo, hi);
		for (int j = 0; j < d; ++j) spread = std::max(spread, hi[j] - lo[j]);
		double side;
		if (spread > 0.0) {
			Rng rng(mix64(params.seed,
			              mix64(static_cast<uint64_t>(min_id(g)),
			                    static_cast<uint64_t>(g.count))));
			side = 3.0 * spread;
			for (int j = 0; j < d; ++j) {
				const double center = 0.5 * (lo[j] + hi[j]);
				corner[j] = center - 1.5 * spread + rng.uniform(0.0, spread);
			}
		} else {
			// single point: any positive box centered on it
			side = 1.0;
			for (int j = 0; j < d; ++j) corner[j] = lo[j] - 0.5;
		}
		const int cell = new_cell(parent_cell, side, corner, sid);
		tree->cells[cell].subtree_root = true;
		tree->subtree_root_cell.push_back(cell);
		subtree_parent.push_back(parent_subtree);
		return cell;
	}

	void run() {
		struct Work {
			int cell;
			Group g;
		};
		std::vector<Work> stack;
		{
			Group all;
			all.count = n;
			std::vector<int> ids(n);
			std::iota(ids.begin(), ids.end(), 0);
			std::vector<int> tmp = ids;
			for (int j = 0; j < d; ++j) {
				tmp = ids;
				link_sorted(all, j, tmp);
			}
			const int root = start_subtree(all, -1, -1);
			stack.push_back({root, all});
		}
		const double nb = std::pow(static_cast<double>(params.n),
		                           static_cast<double>(params.rule2_exponent));
		while (!stack.empty()) {
			Work w = std::move(stack.back());
			stack.pop_back();
			Cell& cell = tree->cells[w.cell];
			if (w.g.count == 1) {
				cell.rule = 1;
				leaf_point[w.cell] = w.g.head[0];
				continue;
			}
			double lo[kMaxDim], hi[kMaxDim];
			bbox(w.g, lo, hi);
			double spread = 0.0;
			for (int j = 0; j < d; ++j) spread = std::max(spread, hi[j] - lo[j]);
			if (spread <= 0.0)
				throw InternalError("coincident points survived deduplication");
			if (spread < params.eps0 * cell.side / (3.0 * nb)) {
				cell.rule = 2;
				const int child = start_subtree(w.g, w.cell, cell.subtree);
				stack.push_back({child, std::move(w.g)});
				continue;
			}
			cell.rule = 3;
			// one dimension at a time, low half before high half
			std::vector<std::pair<int, Group>> parts;
			parts.emplace_back(0, std::move(w.g));
			for (int j = 0; j < d; ++j) {
				std::vector<std::pair<int, Group>> next;
				next.reserve(parts.size() * 2);
				const double c = cell.corner[j] + 0.5 * cell.side;
				for (auto& [bits, grp] : parts) {
					Group out;
					switch (split(grp, j, c, out)) {
						case SplitResult::AllLow:
							next.emplace_back(bits, std::move(grp));
							break;
						case SplitResult::AllHigh:
							next.emplace_back(bits | (1 << j), std::move(grp));
							break;
						case SplitResult::ExtractedLow:
							next.emplace_back(bits, std::move(out));
							next.emplace_back(bits | (1 << j), std::move(grp));
							break;
						case SplitResult::ExtractedHigh:
							next.emplace_back(bits, std::move(grp));
							next.emplace_back(bits | (1 << j), std::move(out));
							break;
					}
				}
				parts = std::move(next);
			}
			const double half = 0.5 * cell.side;
			const int cid = w.cell;
			for (auto& [bits, grp] : parts) {
				double corner[kMaxDim];
				for (int j = 0; j < d; ++j)
					corner[j] = tree->cells[cid].corner[j] + ((bits >> j) & 1 ? half : 0.0);
				const int child =
				    new_cell(cid, half, corner, tree->cells[cid].subtree);
				stack.push_back({child, std::move(grp)});
			}
		}
	}
};

} // namespace

Quadtree build_quadtree(const TransportInstance& inst, const QuadtreeParams& params_in) {
	Quadtree tree;
	tree.dim = inst.dim;
	tree.params = params_in;
	tree.n_original = inst.size();
	tree.orig_coords = inst.coords;
	tree.orig_supplies = inst.supplies;

	if (!(params_in.eps0 > 0.0) || params_in.eps0 > 0.5)
		throw ValidationError("eps0 must lie in (0, 1/2]");
	{
		const double inv = 1.0 / params_in.eps0;
		if (std::abs(inv - std::round(inv)) > 1e-9 ||
		    (static_cast<long>(std::round(inv)) & (static_cast<long>(std::round(inv)) - 1)))
			throw ValidationError("1/eps0 must be a power of two");
		double bits = inst.dim * std::log2(inv);
		if (bits > 62.0)
			throw ValidationError("eps0 too small for this dimension (region keys overflow)");
	}

	// Merge exactly coincident points into representatives with summed
	// supplies. The tree then only ever sees distinct points.
	const int n0 = inst.size();
	std::vector<int> idx(n0);
	std::iota(idx.begin(), idx.end(), 0);
	std::sort(idx.begin(), idx.end(), [&](int a, int b) {
		for (int j = 0; j < inst.dim; ++j) {
			const double ca = inst.coords[static_cast<size_t>(a) * inst.dim + j];
			const double cb = inst.coords[static_cast<size_t>(b) * inst.dim + j];
			if (ca != cb) return ca < cb;
		}
		return a < b;
	});
	tree.rep_of.assign(n0, -1);
	for (int t = 0; t < n0;) {
		int u = t;
		while (u < n0) {
			bool same = true;
			for (int j = 0; j < inst.dim; ++j)
				if (inst.coords[static_cast<size_t>(idx[t]) * inst.dim + j] !=
				    inst.coords[static_cast<size_t>(idx[u]) * inst.dim + j]) {
					same = false;
					break;
				}
			if (!same) break;
			++u;
		}
		// group [t, u): lowest original index becomes the representative
		int lead = idx[t];
		for (int v = t; v < u; ++v) lead = std::min(lead, idx[v]);
		const int rep = static_cast<int>(tree.rep_original.size());
		tree.rep_original.push_back(lead);
		double supply = 0.0;
		for (int v = t; v < u; ++v) {
			tree.rep_of[idx[v]] = rep;
			supply += inst.supplies[idx[v]];
		}
		for (int j = 0; j < inst.dim; ++j)
			tree.coords.push_back(inst.coords[static_cast<size_t>(lead) * inst.dim + j]);
		tree.supplies.push_back(supply);
		if (u - t > 1) tree.has_duplicates = true;
		t = u;
	}
	// Re-number representatives by lead index so the working order is stable.
	{
		const int nr = static_cast<int>(tree.rep_original.size());
		std::vector<int> perm(nr);
		std::iota(perm.begin(), perm.end(), 0);
		std::sort(perm.begin(), perm.end(), [&](int a, int b) {
			return tree.rep_original[a] < tree.rep_original[b];
		});
		std::vector<int> inv(nr);
		for (int i = 0; i < nr; ++i) inv[perm[i]] = i;
		std::vector<double> c2(static_cast<size_t>(nr) * inst.dim);
		std::vector<double> s2(nr);
		std::vector<int> ro2(nr);
		for (int i = 0; i < nr; ++i) {
			const int from = perm[i];
			ro2[i] = tree.rep_original[from];
			s2[i] = tree.supplies[from];
			for (int j = 0; j < inst.dim; ++j)
				c2[static_cast<size_t>(i) * inst.dim + j] =
				    tree.coords[static_cast<size_t>(from) * inst.dim + j];
		}
		for (int& r : tree.rep_of) r = inv[r];
		tree.coords = std::move(c2);
		tree.supplies = std::move(s2);
		tree.rep_original = std::move(ro2);
	}

	tree.params.n = tree.points();

	Builder b;
	b.d = tree.dim;
	b.n = tree.points();
	b.coords = tree.coords.data();
	b.params = tree.params;
	b.nxt.assign(static_cast<size_t>(b.d) * b.n, -1);
	b.prv.assign(static_cast<size_t>(b.d) * b.n, -1);
	b.tree = &tree;
	b.run();

	// Leaf-first walk: point ranges, postorder, leaf links.
	tree.order.reserve(tree.points());
	tree.leaf_of.assign(tree.points(), -1);
	tree.cell_postorder.reserve(tree.cells.size());
	{
		std::vector<std::pair<int, bool>> stack{{0, false}};
		while (!stack.empty()) {
			auto [c, done] = stack.back();
			stack.pop_back();
			if (done) {
				tree.cells[c].end = static_cast<int>(tree.order.size());
				tree.cell_postorder.push_back(c);
				continue;
			}
			tree.cells[c].begin = static_cast<int>(tree.order.size());
			stack.emplace_back(c, true);
			if (tree.cells[c].rule == 1) {
				const int pt = b.leaf_point[c];
				tree.leaf_of[pt] = c;
				tree.order.push_back(pt);
			} else {
				// reverse child order so the first child is processed first
				std::vector<int> kids;
				for (int k = tree.cells[c].first_child; k != -1;
				     k = tree.cells[k].next_sibling)
					kids.push_back(k);
				for (auto it = kids.rbegin(); it != kids.rend(); ++it)
					stack.emplace_back(*it, false);
			}
		}
	}

	// Subtree processing order: every nested tree before the tree it sits in.
	{
		const int ns = static_cast<int>(tree.subtree_root_cell.size());
		std::vector<std::vector<int>> kids(ns);
		for (int s = 1; s < ns; ++s) kids[b.subtree_parent[s]].push_back(s);
		std::vector<std::pair<int, bool>> stack{{0, false}};
		while (!stack.empty()) {
			auto [s, done] = stack.back();
			stack.pop_back();
			if (done) {
				tree.subtree_order.push_back(s);
				continue;
			}
			stack.emplace_back(s, true);
			for (auto it = kids[s].rbegin(); it != kids[s].rend(); ++it)
				stack.emplace_back(*it, false);
		}
	}
	return tree;
}

void subdivide_and_net(Quadtree& tree) {
	if (tree.subdivided) return;
	const int d = tree.dim;
	tree.subcells.clear();
	tree.net_coords.clear();
	tree.point_leaf_subcell.assign(tree.points(), -1);

	// Group each cell's points by region. Keys are sorted so iteration order
	// never depends on hashing.
	std::unordered_map<int64_t, std::pair<int, int>> buckets; // key -> (count, first)
	for (int c = 0; c < static_cast<int>(tree.cells.size()); ++c) {
		Cell& cell = tree.cells[c];
		buckets.clear();
		for (int t = cell.begin; t < cell.end; ++t) {
			const int p = tree.order[t];
			const int64_t key = tree.region_key(c, tree.point(p));
			auto [it, fresh] = buckets.try_emplace(key, 0, p);
			it->second.first += 1;
			if (!fresh) it->second.second = std::min(it->second.second, p);
		}
		std::vector<int64_t> keys;
		keys.reserve(buckets.size());
		for (const auto& kv : buckets) keys.push_back(kv.first);
		std::sort(keys.begin(), keys.end());
		cell.sub_begin = static_cast<int>(tree.subcells.size());
		for (int64_t key : keys) {
			Subcell s;
			s.cell = c;
			s.key = key;
			s.npoints = buckets[key].first;
			s.first_point = buckets[key].second;
			tree.subcells.push_back(s);
		}
		cell.sub_end = static_cast<int>(tree.subcells.size());
	}

	tree.net_count = static_cast<int>(tree.subcells.size());
	tree.net_coords.resize(static_cast<size_t>(tree.net_count) * d);
	for (int s = 0; s < tree.net_count; ++s) {
		tree.subcells[s].net_vertex = tree.points() + s;
		tree.subcell_center(tree.subcells[s], tree.net_coords.data() +
		                                          static_cast<size_t>(s) * d);
	}

	// Parent linkage: the region of the enclosing cell that contains this
	// subcell's center; if rounding lands the center in an empty region (only
	// possible across nested-tree boundaries), fall back to the region of a
	// contained point, which is nonempty by construction.
	auto find_subcell = [&](int c, int64_t key) -> int {
		const Cell& cell = tree.cells[c];
		int lo = cell.sub_begin, hi = cell.sub_end;
		while (lo < hi) {
			const int mid = (lo + hi) / 2;
			if (tree.subcells[mid].key < key) lo = mid + 1;
			else hi = mid;
		}
		if (lo < cell.sub_end && tree.subcells[lo].key == key) return lo;
		return -1;
	};
	for (int s = 0; s < tree.net_count; ++s) {
		Subcell& sc = tree.subcells[s];
		const int c = sc.cell;
		const int parent = tree.cells[c].parent;
		if (parent < 0) continue;
		double center[kMaxDim];
		tree.subcell_center(sc, center);
		int ps = find_subcell(parent, tree.region_key(parent, {center, static_cast<size_t>(d)}));
		if (ps < 0)
			ps = find_subcell(parent,
			                  tree.region_key(parent, tree.point(sc.first_point)));
		if (ps < 0) throw InternalError("parent region lookup failed");
		sc.parent_subcell = ps;
		sc.parent_net = tree.subcells[ps].net_vertex;
	}

	for (int c = 0; c < static_cast<int>(tree.cells.size()); ++c) {
		const Cell& cell = tree.cells[c];
		if (cell.rule != 1) continue;
		if (cell.sub_end - cell.sub_begin != 1)
			throw InternalError("leaf cell must own exactly one subcell");
		tree.point_leaf_subcell[tree.order[cell.begin]] = cell.sub_begin;
	}
	tree.subdivided = true;
}

Quadtree resample(const Quadtree& tree, uint64_t new_seed) {
	TransportInstance inst;
	inst.dim = tree.dim;
	inst.coords = tree.orig_coords;
	inst.supplies = tree.orig_supplies;
	QuadtreeParams p = tree.params;
	p.seed = new_seed;
	p.n = tree.n_original;
	Quadtree out = build_quadtree(inst, p);
	if (tree.subdivided) subdivide_and_net(out);
	return out;
}

PropertyReport check_properties(const Quadtree& tree) {
	PropertyReport rep;
	const int n = tree.points();
	const int d = tree.dim;
	auto flag = [&](int prop, std::string what) {
		if (rep.violations.size() < 32)
			rep.violations.push_back({prop, std::move(what)});
	};

	// near-linear cell count; the constant is a pinned regression guard
	const double c1 = 10.0;
	rep.cells = static_cast<long>(tree.cells.size());
	rep.cell_bound =
	    c1 * std::max(1, n) * std::log2(std::max(2.0, n / tree.params.eps0));
	if (rep.cells > rep.cell_bound) {
		rep.cell_count_ok = false;
		flag(1, "cell count " + std::to_string(rep.cells) + " exceeds bound " +
		            std::to_string(rep.cell_bound));
	}

	if (n > 1) {
		const double na =
		    std::pow(static_cast<double>(n), static_cast<double>(tree.params.moat_exponent));
		for (int c = 0; c < static_cast<int>(tree.cells.size()) &&
		                rep.violations.size() < 32;
		     ++c) {
			const Cell& cell = tree.cells[c];
			const double wall = cell.side / na;
			const double sub_side = tree.params.eps0 * cell.side;
			const double sub_wall = sub_side / na;
			for (int t = cell.begin; t < cell.end; ++t) {
				const int p = tree.order[t];
				auto pt = tree.point(p);
				for (int j = 0; j < d; ++j) {
					const double off = pt[j] - cell.corner[j];
					if (off < wall || cell.side - off < wall) {
						rep.wall_distance_ok = false;
						flag(2, "point " + std::to_string(p) + " within " +
						            std::to_string(std::min(off, cell.side - off)) +
						            " of cell " + std::to_string(c) + " wall (limit " +
						            std::to_string(wall) + ")");
						break;
					}
					double rel = std::floor(off / sub_side);
					rel = std::clamp(rel, 0.0, 1.0 / tree.params.eps0 - 1.0);
					const double roff = off - rel * sub_side;
					if (roff < sub_wall || sub_side - roff < sub_wall) {
						rep.wall_distance_ok = false;
						flag(2, "point " + std::to_string(p) + " within " +
						            std::to_string(std::min(roff, sub_side - roff)) +
						            " of a region wall in cell " + std::to_string(c));
						break;
					}
				}
			}
		}
	}

	// every nested-tree box sits inside one region of the enclosing cell
	for (size_t s = 1; s < tree.subtree_root_cell.size(); ++s) {
		const int c = tree.subtree_root_cell[s];
		const Cell& cell = tree.cells[c];
		const int parent = cell.parent;
		const Cell& pcell = tree.cells[parent];
		const double sub_side = tree.params.eps0 * pcell.side;
		double center[kMaxDim];
		for (int j = 0; j < d; ++j) center[j] = cell.corner[j] + 0.5 * cell.side;
		const int64_t key = tree.region_key(parent, {center, static_cast<size_t>(d)});
		int r[kMaxDim];
		tree.region_coords(key, r);
		const double slack = 1e-12 * sub_side;
		for (int j = 0; j < d; ++j) {
			const double lo = pcell.corner[j] + r[j] * sub_side;
			if (cell.corner[j] < lo - slack ||
			    cell.corner[j] + cell.side > lo + sub_side + slack) {
				rep.nesting_ok = false;
				flag(3, "nested tree at cell " + std::to_string(c) +
				            " crosses a region wall of cell " + std::to_string(parent));
				break;
			}
		}
	}

	rep.pass = rep.cell_count_ok && rep.wall_distance_ok && rep.nesting_ok;
	return rep;
}

std::string dump_tree(const Quadtree& tree) {
	std::ostringstream out;
	char buf[64];
	auto num = [&](double v) {
		std::snprintf(buf, sizeof buf, "%.17g", v);
		return std::string(buf);
	};
	for (int c = 0; c < static_cast<int>(tree.cells.size()); ++c) {
		const Cell& cell = tree.cells[c];
		out << "cell " << c << ' ' << cell.parent << ' ' << num(cell.side);
		for (int j = 0; j < tree.dim; ++j) out << ' ' << num(cell.corner[j]);
		out << ' ' << (cell.end - cell.begin) << ' ' << cell.rule << ' '
		    << (cell.subtree_root ? "R" : "-") << cell.subtree << '\n';
		if (!tree.subdivided) continue;
		for (int s = cell.sub_begin; s < cell.sub_end; ++s) {
			const Subcell& sc = tree.subcells[s];
			double center[kMaxDim];
			tree.subcell_center(sc, center);
			out << "sub " << c;
			for (int j = 0; j < tree.dim; ++j) out << ' ' << num(center[j]);
			out << ' ' << sc.net_vertex << ' ' << sc.parent_net << '\n';
		}
	}
	return out.str();
}

} // namespace geotrans
