#include "geotrans/psplit.hpp"

#include <cmath>
#include <utility>

#include "geotrans/core.hpp"

namespace geotrans {

PrefixSplitTree::~PrefixSplitTree() { free_all(root_); }

PrefixSplitTree& PrefixSplitTree::operator=(PrefixSplitTree&& o) noexcept {
	if (this != &o) {
		free_all(root_);
		root_ = o.root_;
		o.root_ = nullptr;
	}
	return *this;
}

void PrefixSplitTree::free_all(Node* x) {
	// Iterative teardown: splay shapes can be deep chains.
	Node* cur = x;
	while (cur) {
		if (cur->left) {
			Node* l = cur->left;
			cur->left = l->right;
			l->right = cur;
			cur = l;
		} else {
			Node* r = cur->right;
			delete cur;
			cur = r;
		}
	}
}

void PrefixSplitTree::pull(Node* x) {
	x->subtree = x->w;
	if (x->left) x->subtree += x->left->subtree;
	if (x->right) x->subtree += x->right->subtree;
}

void PrefixSplitTree::rotate(Node* x) {
	Node* p = x->parent;
	Node* g = p->parent;
	if (p->left == x) {
		p->left = x->right;
		if (x->right) x->right->parent = p;
		x->right = p;
	} else {
		p->right = x->left;
		if (x->left) x->left->parent = p;
		x->left = p;
	}
	p->parent = x;
	x->parent = g;
	if (g) {
		if (g->left == p) g->left = x;
		else g->right = x;
	}
	pull(p);
	pull(x);
}

void PrefixSplitTree::splay(Node* x) {
	while (x->parent) {
		Node* p = x->parent;
		Node* g = p->parent;
		if (g) {
			const bool zigzig = (g->left == p) == (p->left == x);
			if (zigzig) rotate(p);
			else rotate(x);
		}
		rotate(x);
	}
	root_ = x;
}

PrefixSplitTree::Node* PrefixSplitTree::leftmost_raw() const {
	Node* x = root_;
	while (x && x->left) x = x->left;
	return x;
}

PrefixSplitTree::Node* PrefixSplitTree::rightmost_raw() const {
	Node* x = root_;
	while (x && x->right) x = x->right;
	return x;
}

PrefixSplitTree::Node* PrefixSplitTree::insert(int label, double w) {
	if (!(w > 0.0) || !std::isfinite(w))
		throw ValidationError("node weight must be positive and finite");
	Node* x = new Node;
	x->label = label;
	x->w = w;
	x->subtree = w;
	if (!root_) {
		root_ = x;
		return x;
	}
	Node* r = rightmost_raw();
	r->right = x;
	x->parent = r;
	pull(r);
	for (Node* a = r->parent; a; a = a->parent) pull(a);
	splay(x);
	return x;
}

void PrefixSplitTree::erase(Node* x) {
	splay(x);
	Node* l = x->left;
	Node* r = x->right;
	if (l) l->parent = nullptr;
	if (r) r->parent = nullptr;
	delete x;
	if (!l) {
		root_ = r;
		return;
	}
	root_ = l;
	if (r) {
		PrefixSplitTree rest(r);
		merge(std::move(rest));
	}
}

void PrefixSplitTree::update_weight(Node* x, double w) {
	if (!(w > 0.0) || !std::isfinite(w))
		throw ValidationError("node weight must be positive and finite");
	splay(x);
	x->w = w;
	pull(x);
}

PrefixSplitTree::Node* PrefixSplitTree::first() {
	Node* x = leftmost_raw();
	if (x) splay(x);
	return x;
}

void PrefixSplitTree::merge(PrefixSplitTree&& other) {
	if (this == &other) throw InternalError("merge of a tree with itself");
	if (!other.root_) return;
	if (!root_) {
		root_ = other.root_;
		other.root_ = nullptr;
		return;
	}
	Node* x = rightmost_raw();
	splay(x); // x has no right child now
	x->right = other.root_;
	other.root_->parent = x;
	other.root_ = nullptr;
	pull(x);
}

PrefixSplitTree PrefixSplitTree::prefix_split(double t) {
	const double total = total_weight();
	if (!(t > 0.0)) throw ValidationError("prefix_split target must be positive");
	const double tol = 1e-12 * total;
	if (t > total + tol) throw ValidationError("prefix_split target exceeds total weight");
	if (t >= total - tol) {
		// Whole tree is the prefix.
		PrefixSplitTree out(root_);
		root_ = nullptr;
		return out;
	}

	// Find the boundary node y: first node whose running prefix exceeds t.
	Node* y = root_;
	double target = t;
	for (;;) {
		const double lw = y->left ? y->left->subtree : 0.0;
		if (target < lw && y->left) {
			y = y->left;
			continue;
		}
		target -= lw;
		if (target < y->w || !y->right) break;
		target -= y->w;
		y = y->right;
	}
	splay(y);

	// Authoritative prefix weight before y.
	const double before = y->left ? y->left->subtree : 0.0;
	Node* l = y->left;
	Node* r = y->right;

	if (t - before <= tol) {
		// Snap to the boundary before y: prefix = left subtree.
		y->left = nullptr;
		if (l) l->parent = nullptr;
		pull(y);
		return PrefixSplitTree(l);
	}
	if ((before + y->w) - t <= tol) {
		// Snap after y: y joins the prefix.
		y->right = nullptr;
		pull(y);
		if (r) r->parent = nullptr;
		root_ = r;
		return PrefixSplitTree(y);
	}

	// True split: y is consumed, two pieces carry its label. The first piece
	// completes the prefix to weight exactly t; the second keeps the rest.
	const double w1 = t - before;
	const double w2 = y->w - w1;
	Node* y1 = new Node;
	y1->label = y->label;
	y1->w = w1;
	y1->left = l;
	if (l) l->parent = y1;
	pull(y1);
	Node* y2 = new Node;
	y2->label = y->label;
	y2->w = w2;
	y2->right = r;
	if (r) r->parent = y2;
	pull(y2);
	delete y;
	root_ = y2;
	return PrefixSplitTree(y1);
}

std::vector<std::pair<int, double>> PrefixSplitTree::items() const {
	std::vector<std::pair<int, double>> out;
	std::vector<const Node*> stack;
	const Node* x = root_;
	while (x || !stack.empty()) {
		while (x) {
			stack.push_back(x);
			x = x->left;
		}
		x = stack.back();
		stack.pop_back();
		out.emplace_back(x->label, x->w);
		x = x->right;
	}
	return out;
}

double PrefixSplitTree::audit_subtree_sums() const {
	// Post-order recomputation without touching stored sums.
	double worst = 0.0;
	struct Frame {
		const Node* n;
		int state;
		double acc;
	};
	if (!root_) return 0.0;
	std::vector<Frame> stack{{root_, 0, 0.0}};
	std::vector<double> results;
	while (!stack.empty()) {
		Frame& f = stack.back();
		if (f.state == 0) {
			f.state = 1;
			if (f.n->left) stack.push_back({f.n->left, 0, 0.0});
		} else if (f.state == 1) {
			f.acc = f.n->left ? results.back() : 0.0;
			if (f.n->left) results.pop_back();
			f.state = 2;
			if (f.n->right) stack.push_back({f.n->right, 0, 0.0});
		} else {
			double sum = f.acc + f.n->w + (f.n->right ? results.back() : 0.0);
			if (f.n->right) results.pop_back();
			const double denom = std::max(std::abs(sum), 1e-300);
			worst = std::max(worst, std::abs(sum - f.n->subtree) / denom);
			results.push_back(sum);
			stack.pop_back();
		}
	}
	return worst;
}

} // namespace geotrans
