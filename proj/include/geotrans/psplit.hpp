#pragma once

#include <cstdint>
#include <vector>

namespace geotrans {

// Self-adjusting binary tree over an ordered sequence of weighted, labeled
// nodes. Each node keeps its own weight w and the total weight W of its
// subtree, maintained through rotations, which makes weight-prefix queries
// and splits O(log m) amortized.
//
// Node handles stay valid across splays. A node split by prefix_split is
// consumed and replaced by two fresh nodes carrying the same label.
class PrefixSplitTree {
public:
	struct Node {
		int label = -1;
		double w = 0.0;
		double subtree = 0.0; // w + subtree(left) + subtree(right)
		Node* left = nullptr;
		Node* right = nullptr;
		Node* parent = nullptr;
	};

	PrefixSplitTree() = default;
	~PrefixSplitTree();
	PrefixSplitTree(PrefixSplitTree&& o) noexcept : root_(o.root_) { o.root_ = nullptr; }
	PrefixSplitTree& operator=(PrefixSplitTree&& o) noexcept;
	PrefixSplitTree(const PrefixSplitTree&) = delete;
	PrefixSplitTree& operator=(const PrefixSplitTree&) = delete;

	bool empty() const { return root_ == nullptr; }
	double total_weight() const { return root_ ? root_->subtree : 0.0; }

	// Appends a node at the end of the order. Weight must be positive.
	Node* insert(int label, double w);

	// Removes x; its neighbors in the order join up.
	void erase(Node* x);

	// Sets w(x).
	void update_weight(Node* x, double w);

	// First node of the order (smallest prefix). Null when empty.
	Node* first();

	// Appends the contents of other after the last node of this tree.
	// Consumes other.
	void merge(PrefixSplitTree&& other);

	// Detaches the maximal order prefix whose weight equals t and returns it;
	// the remainder stays. If t falls strictly inside a node, the node is
	// consumed and two pieces carrying its label complete both sides. A
	// boundary within 1e-12 * total_weight() is snapped to the nearest node
	// edge instead of creating split pieces.
	PrefixSplitTree prefix_split(double t);

	// In-order (label, weight) pairs; read-only walk for audits.
	std::vector<std::pair<int, double>> items() const;

	// Recomputes subtree sums bottom-up and reports the largest relative
	// discrepancy found. Debug aid.
	double audit_subtree_sums() const;

private:
	Node* root_ = nullptr;

	explicit PrefixSplitTree(Node* r) : root_(r) {
		if (root_) root_->parent = nullptr;
	}

	static void pull(Node* x);
	static void rotate(Node* x);
	void splay(Node* x);
	void free_all(Node* x);
	Node* leftmost_raw() const;
	Node* rightmost_raw() const;
};

} // namespace geotrans
