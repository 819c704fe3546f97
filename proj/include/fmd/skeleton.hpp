#pragma once

#include <string>
#include <vector>

namespace fmd {

// Joint topology: names plus a parent index per joint. Exactly one root,
// marked with parent index -1. Bones connect each non-root joint to its
// parent; they are enumerated by ascending non-root joint index, which fixes
// the row order of every derived representation.
struct Skeleton {
    std::vector<std::string> joint_names;
    std::vector<int> parents;

    int joints() const { return static_cast<int>(parents.size()); }
    int bones() const { return joints() - 1; }

    // Throws TopologyError unless parents encodes a tree with one root and
    // at least two joints.
    void validate() const;

    // Child joint of bone b: the (b+1)-th joint when skipping the root,
    // in ascending joint-index order.
    std::vector<int> bone_children() const;

    // Joint indices ordered so that every parent precedes its children.
    std::vector<int> topological_order() const;

    // 17-joint humanoid used as the harness default.
    static Skeleton humanoid17();

    // Simple chain topology: joint i-1 is the parent of joint i.
    static Skeleton chain(int joints);
};

bool operator==(const Skeleton& a, const Skeleton& b);

}  // namespace fmd
