#pragma once

// Ordered ternary trees with a growth history (chronicle).
//
// Nodes are numbered in creation order: the root is 0 and the growth step
// of generation k (k >= 1) creates the three children 3k-2, 3k-1, 3k of the
// node chronicle[k-1]. A tree of generation j is therefore identified by its
// chronicle alone: chronicle[0] = 0 and chronicle[k] is the terminal that was
// turned into a non-terminal at generation k+1. The middle child of every
// node carries the opposite conjugation flag of its parent.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

namespace nfnls {

/// Hard cap on generations; the chronicle is stored inline.
inline constexpr int kMaxGenerations = 8;
inline constexpr int kMaxNodes = 3 * kMaxGenerations + 1;

class OrderedTree {
public:
    /// The 1-generation tree: root plus three leaves.
    OrderedTree();

    /// Replays a chronicle; throws DomainError unless chronicle[0] == 0 and
    /// each later entry names a terminal of the tree built so far.
    static OrderedTree from_chronicle(std::span<const int> chronicle);

    int generations() const noexcept { return size_; }
    int node_count() const noexcept { return 3 * size_ + 1; }
    std::vector<int> chronicle() const;

    /// Node converted at generation k, 1 <= k <= generations().
    int converted(int k) const;

    bool is_terminal(int node) const;
    /// Terminal ids in increasing order (2j + 1 of them).
    std::vector<int> terminals() const;
    std::vector<int> non_terminals() const;

    /// -1 for the root.
    int parent(int node) const;
    /// 0, 1 or 2 among the parent's children; -1 for the root.
    static int position(int node) noexcept;
    /// Children of a non-terminal; throws DomainError for terminals.
    std::array<int, 3> children(int node) const;
    /// True when the node enters its summand complex-conjugated.
    bool conjugated(int node) const;

    /// Generation j+1 tree obtained by growing the given terminal.
    OrderedTree grow(int terminal) const;

    friend bool operator==(const OrderedTree&, const OrderedTree&) = default;

private:
    std::array<std::uint8_t, kMaxGenerations> chron_{};
    std::uint8_t size_ = 1;
};

/// (2J-1)!!
std::uint64_t tree_count(int J);

/// All trees of generation J in chronicle-lexicographic order; count is
/// (2J-1)!!. Throws SizeError for J > kMaxGenerations.
std::vector<OrderedTree> enumerate_trees(int J);
void for_each_tree(int J, const std::function<void(const OrderedTree&)>& visit);

/// Frequencies on every node, indexed by node id.
using IndexAssignment = std::vector<std::int64_t>;

enum class LatticePolicy {
    terminals,  ///< only terminal frequencies must lie in [-n_max, n_max]
    all_nodes,  ///< every node, internal ones included, lies in the lattice
};

/// Streams every assignment with root frequency root_freq satisfying
/// n_a = n_{a1} - n_{a2} + n_{a3} and {n_a, n_{a2}} disjoint from
/// {n_{a1}, n_{a3}} at each non-terminal. Built generation by generation
/// following the chronicle, so the order is deterministic but not
/// lexicographic in the terminals.
void for_each_index(const OrderedTree& tree, std::int64_t root_freq, int n_max,
                    const std::function<void(const IndexAssignment&)>& visit,
                    LatticePolicy policy = LatticePolicy::terminals);
std::vector<IndexAssignment> enumerate_indices(const OrderedTree& tree, std::int64_t root_freq, int n_max,
                                               LatticePolicy policy = LatticePolicy::terminals);

/// True when idx satisfies both index-function conditions on tree.
bool is_valid_index(const OrderedTree& tree, const IndexAssignment& idx);

/// mu_k = 2 (m - m1)(m - m3) at the node converted at generation k.
std::int64_t generation_phase(const OrderedTree& tree, const IndexAssignment& idx, int k);

/// sum_{k <= j} sigma_k mu_k with sigma_k = -1 when the node converted at
/// generation k is conjugated.
std::int64_t signed_phase(const OrderedTree& tree, const IndexAssignment& idx, int j);

nlohmann::json to_json(const OrderedTree& tree);

}  // namespace nfnls
