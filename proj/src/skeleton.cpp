#include "fmd/skeleton.hpp"

#include <string>

#include "fmd/errors.hpp"

namespace fmd {

void Skeleton::validate() const {
    const int j = joints();
    if (j < 2) throw TopologyError("skeleton needs at least 2 joints, got " + std::to_string(j));
    if (joint_names.size() != parents.size()) {
        throw TopologyError("joint_names and parents disagree in length");
    }
    int roots = 0;
    for (int i = 0; i < j; ++i) {
        const int p = parents[i];
        if (p == -1) {
            ++roots;
        } else if (p < 0 || p >= j) {
            throw TopologyError("joint " + std::to_string(i) + " has parent index " +
                                std::to_string(p) + " outside [0, " + std::to_string(j) + ")");
        } else if (p == i) {
            throw TopologyError("joint " + std::to_string(i) + " is its own parent");
        }
    }
    if (roots != 1) {
        throw TopologyError("expected exactly one root, found " + std::to_string(roots));
    }
    // Cycle check: every joint must reach the root in < J steps.
    for (int i = 0; i < j; ++i) {
        int cur = i;
        int steps = 0;
        while (cur != -1) {
            if (++steps > j) {
                throw TopologyError("parent cycle involving joint " + std::to_string(i));
            }
            cur = parents[cur];
        }
    }
}

std::vector<int> Skeleton::bone_children() const {
    std::vector<int> children;
    children.reserve(parents.size() - 1);
    for (int i = 0; i < joints(); ++i) {
        if (parents[i] != -1) children.push_back(i);
    }
    return children;
}

std::vector<int> Skeleton::topological_order() const {
    const int j = joints();
    std::vector<int> order;
    order.reserve(j);
    std::vector<char> placed(j, 0);
    // O(J^2) insertion is fine at skeleton scale.
    while (static_cast<int>(order.size()) < j) {
        bool progressed = false;
        for (int i = 0; i < j; ++i) {
            if (placed[i]) continue;
            if (parents[i] == -1 || placed[parents[i]]) {
                order.push_back(i);
                placed[i] = 1;
                progressed = true;
            }
        }
        if (!progressed) throw TopologyError("parent array is not a tree");
    }
    return order;
}

Skeleton Skeleton::humanoid17() {
    Skeleton s;
    s.joint_names = {"pelvis",     "spine",      "chest",   "neck",    "head",    "l_shoulder",
                     "l_elbow",    "l_wrist",    "r_shoulder", "r_elbow", "r_wrist", "l_hip",
                     "l_knee",     "l_ankle",    "r_hip",   "r_knee",  "r_ankle"};
    s.parents = {-1, 0, 1, 2, 3, 2, 5, 6, 2, 8, 9, 0, 11, 12, 0, 14, 15};
    return s;
}

Skeleton Skeleton::chain(int joints) {
    Skeleton s;
    s.joint_names.reserve(joints);
    s.parents.reserve(joints);
    for (int i = 0; i < joints; ++i) {
        s.joint_names.push_back("joint_" + std::to_string(i));
        s.parents.push_back(i - 1);
    }
    return s;
}

bool operator==(const Skeleton& a, const Skeleton& b) {
    return a.joint_names == b.joint_names && a.parents == b.parents;
}

}  // namespace fmd
