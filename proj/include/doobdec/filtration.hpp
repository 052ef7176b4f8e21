#pragma once

#include <memory>
#include <string>
#include <vector>

#include "doobdec/errors.hpp"

namespace doobdec {

// One atom of the filtration: level in [0, depth], 0-based index within the level.
struct AtomId {
    int level = 0;
    int index = 0;
    bool operator==(const AtomId&) const = default;
};

std::string to_string(const AtomId& a);

// Finite filtration on a finite sample space. Level 0 holds the single atom
// (the whole space); level N atoms are the sample points ("leaves"); the atoms
// of level n+1 refine those of level n via per-atom child lists. Instances are
// immutable after construction.
class FiltrationTree {
public:
    // Uniform branching: counts[n] children for every atom of level n.
    // Throws StructureError on an empty list or a count < 1.
    static FiltrationTree build(const std::vector<int>& counts);

    // General branching: counts_per_atom[n][s] children for atom s of level n.
    // Throws StructureError on empty levels or counts < 1.
    static FiltrationTree build_general(const std::vector<std::vector<int>>& counts_per_atom);

    // Assembles a tree from raw child lists without validating the partition
    // laws. Used to load external data and to build deliberately malformed
    // instances for the condition checker; run check_condition_a to vet it.
    // children[n][s] lists level-(n+1) atom indices under atom s of level n.
    static FiltrationTree from_parts(std::vector<int> level_sizes,
                                     std::vector<std::vector<std::vector<int>>> children);

    int depth() const { return static_cast<int>(level_sizes_.size()) - 1; }
    int atom_count(int level) const;
    int leaf_count() const { return atom_count(depth()); }

    const std::vector<int>& children(int level, int index) const;
    // Parent index at level-1 for an atom of the given level (level >= 1).
    // Throws StructureError if the atom has no or several parents.
    int parent(int level, int index) const;

    // Leaf indices contained in the given atom, sorted. For trees built by
    // build/build_general this is a contiguous range.
    const std::vector<int>& leaves_under(int level, int index) const;

private:
    FiltrationTree() = default;
    void index_structure();

    std::vector<int> level_sizes_;
    // children_[n][s]: next-level atom indices under atom s of level n; size depth().
    std::vector<std::vector<std::vector<int>>> children_;
    // parents_[n][j]: all level-(n-1) atoms claiming atom j of level n; size depth()+1, entry 0 unused.
    std::vector<std::vector<std::vector<int>>> parents_;
    std::vector<std::vector<std::vector<int>>> leaf_sets_;
};

// Partition-law report, one entry per clause. The minimality clause of the
// definition bites only for infinite filtrations; on finite trees it holds
// vacuously and is recorded as such.
struct ConditionAReport {
    bool disjoint = true;      // no atom claimed by two parents (levelwise overlap)
    bool covering = true;      // every atom reached from the root, single root
    bool nested = true;        // every non-leaf atom refined by at least one child, links valid
    bool minimality = true;    // vacuous at finite depth
    std::vector<std::string> violations;
    std::string minimality_note;
    bool pass() const { return disjoint && covering && nested && minimality; }
};

ConditionAReport check_condition_a(const FiltrationTree& tree);

}  // namespace doobdec
