#include "nfnls/trees.hpp"

#include <algorithm>
#include <string>

#include "nfnls/errors.hpp"

namespace nfnls {

OrderedTree::OrderedTree() { chron_[0] = 0; }

OrderedTree OrderedTree::from_chronicle(std::span<const int> chronicle) {
    if (chronicle.empty() || chronicle[0] != 0) throw DomainError("chronicle must start with the root (0)");
    if (chronicle.size() > static_cast<std::size_t>(kMaxGenerations)) {
        throw SizeError("chronicle longer than " + std::to_string(kMaxGenerations) + " generations");
    }
    OrderedTree tree;
    for (std::size_t k = 1; k < chronicle.size(); ++k) tree = tree.grow(chronicle[k]);
    return tree;
}

std::vector<int> OrderedTree::chronicle() const { return {chron_.begin(), chron_.begin() + size_}; }

int OrderedTree::converted(int k) const {
    if (k < 1 || k > size_) throw DomainError("generation out of range");
    return chron_[k - 1];
}

bool OrderedTree::is_terminal(int node) const {
    if (node < 0 || node >= node_count()) throw DomainError("node id out of range: " + std::to_string(node));
    return std::find(chron_.begin(), chron_.begin() + size_, node) == chron_.begin() + size_;
}

std::vector<int> OrderedTree::terminals() const {
    std::vector<int> out;
    for (int a = 1; a < node_count(); ++a) {
        if (is_terminal(a)) out.push_back(a);
    }
    return out;
}

std::vector<int> OrderedTree::non_terminals() const {
    std::vector<int> out = chronicle();
    std::sort(out.begin(), out.end());
    return out;
}

int OrderedTree::parent(int node) const {
    if (node <= 0) return -1;
    if (node >= node_count()) throw DomainError("node id out of range: " + std::to_string(node));
    return chron_[(node - 1) / 3];
}

int OrderedTree::position(int node) noexcept { return node <= 0 ? -1 : (node - 1) % 3; }

std::array<int, 3> OrderedTree::children(int node) const {
    for (int k = 0; k < size_; ++k) {
        if (chron_[k] == node) return {3 * k + 1, 3 * k + 2, 3 * k + 3};
    }
    throw DomainError("node " + std::to_string(node) + " is terminal");
}

bool OrderedTree::conjugated(int node) const {
    bool conj = false;
    for (; node > 0; node = parent(node)) conj ^= position(node) == 1;
    return conj;
}

OrderedTree OrderedTree::grow(int terminal) const {
    if (size_ >= kMaxGenerations) throw SizeError("tree already has the maximum number of generations");
    if (!is_terminal(terminal) || terminal == 0) {
        throw DomainError("cannot grow non-terminal node " + std::to_string(terminal));
    }
    OrderedTree out = *this;
    out.chron_[out.size_++] = static_cast<std::uint8_t>(terminal);
    return out;
}

std::uint64_t tree_count(int J) {
    if (J < 1) throw DomainError("J must be >= 1");
    std::uint64_t c = 1;
    for (int k = 1; k <= J; ++k) c *= static_cast<std::uint64_t>(2 * k - 1);
    return c;
}

void for_each_tree(int J, const std::function<void(const OrderedTree&)>& visit) {
    if (J < 1) throw DomainError("J must be >= 1");
    if (J > kMaxGenerations) {
        throw SizeError("J = " + std::to_string(J) + " exceeds the guard " + std::to_string(kMaxGenerations));
    }
    std::function<void(const OrderedTree&)> rec = [&](const OrderedTree& tree) {
        if (tree.generations() == J) {
            visit(tree);
            return;
        }
        for (int leaf : tree.terminals()) rec(tree.grow(leaf));
    };
    rec(OrderedTree());
}

std::vector<OrderedTree> enumerate_trees(int J) {
    std::vector<OrderedTree> out;
    out.reserve(static_cast<std::size_t>(tree_count(std::min(J, kMaxGenerations))));
    for_each_tree(J, [&](const OrderedTree& t) { out.push_back(t); });
    return out;
}

namespace {

int terminal_count_below(const OrderedTree& tree, int node) {
    if (tree.is_terminal(node)) return 1;
    int total = 0;
    for (int c : tree.children(node)) total += terminal_count_below(tree, c);
    return total;
}

bool admissible(std::int64_t n, std::int64_t n1, std::int64_t n2, std::int64_t n3) {
    return n == n1 - n2 + n3 && n != n1 && n != n3 && n2 != n1 && n2 != n3;
}

}  // namespace

void for_each_index(const OrderedTree& tree, std::int64_t root_freq, int n_max,
                    const std::function<void(const IndexAssignment&)>& visit, LatticePolicy policy) {
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    const int nodes = tree.node_count();
    std::vector<std::int64_t> bound(nodes);
    for (int a = 0; a < nodes; ++a) {
        bound[a] = policy == LatticePolicy::all_nodes ? n_max
                                                      : std::int64_t(terminal_count_below(tree, a)) * n_max;
    }
    if (root_freq < -bound[0] || root_freq > bound[0]) return;

    IndexAssignment idx(nodes, 0);
    idx[0] = root_freq;
    const int J = tree.generations();
    std::function<void(int)> rec = [&](int k) {
        if (k > J) {
            visit(idx);
            return;
        }
        const auto [c1, c2, c3] = tree.children(tree.converted(k));
        const std::int64_t m = idx[tree.converted(k)];
        for (std::int64_t m1 = -bound[c1]; m1 <= bound[c1]; ++m1) {
            for (std::int64_t m3 = -bound[c3]; m3 <= bound[c3]; ++m3) {
                const std::int64_t m2 = m1 + m3 - m;
                if (m2 < -bound[c2] || m2 > bound[c2] || !admissible(m, m1, m2, m3)) continue;
                idx[c1] = m1;
                idx[c2] = m2;
                idx[c3] = m3;
                rec(k + 1);
            }
        }
    };
    rec(1);
}

std::vector<IndexAssignment> enumerate_indices(const OrderedTree& tree, std::int64_t root_freq, int n_max,
                                               LatticePolicy policy) {
    std::vector<IndexAssignment> out;
    for_each_index(tree, root_freq, n_max, [&](const IndexAssignment& idx) { out.push_back(idx); }, policy);
    return out;
}

bool is_valid_index(const OrderedTree& tree, const IndexAssignment& idx) {
    if (static_cast<int>(idx.size()) != tree.node_count()) return false;
    for (int k = 1; k <= tree.generations(); ++k) {
        const int a = tree.converted(k);
        const auto [c1, c2, c3] = tree.children(a);
        if (!admissible(idx[a], idx[c1], idx[c2], idx[c3])) return false;
    }
    return true;
}

std::int64_t generation_phase(const OrderedTree& tree, const IndexAssignment& idx, int k) {
    const int a = tree.converted(k);
    const auto [c1, c2, c3] = tree.children(a);
    return 2 * (idx[a] - idx[c1]) * (idx[a] - idx[c3]);
}

std::int64_t signed_phase(const OrderedTree& tree, const IndexAssignment& idx, int j) {
    if (j < 1 || j > tree.generations()) throw DomainError("signed_phase: generation out of range");
    std::int64_t total = 0;
    for (int k = 1; k <= j; ++k) {
        const std::int64_t mu = generation_phase(tree, idx, k);
        total += tree.conjugated(tree.converted(k)) ? -mu : mu;
    }
    return total;
}

nlohmann::json to_json(const OrderedTree& tree) {
    return {{"chronicle", tree.chronicle()}, {"terminals", 2 * tree.generations() + 1}};
}

}  // namespace nfnls
